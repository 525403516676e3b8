#pragma once

#include <Eigen/SparseCore>
#include <cstddef>
#include <span>
#include <vector>

namespace mfg {

/// Allowed band for the dx/h ratio.
struct RatioBand {
    double lo = 0.1;
    double hi = 10.0;

    bool operator==(const RatioBand&) const = default;
};

/// Uniform wealth grid x_i = x_lo + i dx, i = 0..n_nodes-1, with time step h.
class Grid {
public:
    Grid(double x_lo, double x_max, std::size_t n_nodes, double h, RatioBand band = RatioBand{});

    double x_lo() const { return x_lo_; }
    double x_max() const { return x_max_; }
    double dx() const { return dx_; }
    double h() const { return h_; }
    std::size_t n_nodes() const { return n_nodes_; }
    std::size_t last() const { return n_nodes_ - 1; }

    /// Node position; the last node is x_max exactly.
    double x(std::size_t i) const { return i == last() ? x_max_ : x_lo_ + static_cast<double>(i) * dx_; }

    std::vector<double> nodes() const;

    /// Same wealth interval and dx/h ratio with n_intervals multiplied by `factor`.
    Grid refined(std::size_t factor) const;

private:
    double x_lo_;
    double x_max_;
    double dx_;
    double h_;
    std::size_t n_nodes_;
};

/// Q1 hat-function weights at z: weight `left` on node k, `right` on node k + 1.
/// Outside the grid all weight goes to the nearest end node.
struct BasisWeights {
    std::size_t k;
    double left;
    double right;
};

BasisWeights basis_weights(const Grid& grid, double z);

double interpolate(const Grid& grid, std::span<const double> phi, double z);

/// Row-stochastic semi-Lagrangian operator; row i holds the basis weights at
/// x_i + h s_i. Two stored entries per row.
class TransitionMatrix {
public:
    TransitionMatrix(const Grid& grid, std::span<const double> drift);

    std::size_t size() const { return rows_.size(); }
    const BasisWeights& row(std::size_t i) const { return rows_[i]; }

    /// (M φ)_i = Σ_k M_ik φ_k.
    std::vector<double> apply(std::span<const double> phi) const;
    /// (Mᵀ g)_k = Σ_i M_ik g_i.
    std::vector<double> apply_transpose(std::span<const double> g) const;

    /// Maximum |i - k| over nonzero entries; 1 means tridiagonal.
    std::size_t bandwidth() const;

    /// Appends `scale * M` (or its transpose) at block offset (row0, col0).
    void append_triplets(std::vector<Eigen::Triplet<double>>& out, double scale, std::size_t row0,
                         std::size_t col0, bool transpose) const;

private:
    std::vector<BasisWeights> rows_;
};

TransitionMatrix build_transition_matrix(const Grid& grid, std::span<const double> drift);

}  // namespace mfg
