#include "mfg/grid.hpp"

#include "mfg/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mfg {

Grid::Grid(double x_lo, double x_max, std::size_t n_nodes, double h, RatioBand band)
    : x_lo_(x_lo), x_max_(x_max), dx_(0.0), h_(h), n_nodes_(n_nodes) {
    if (n_nodes < 2) throw ValidationError("grid: n_nodes must be at least 2");
    if (!(x_max > x_lo)) throw ValidationError("grid: x_max must exceed x_lo");
    if (!(h > 0.0)) throw ValidationError("grid: h must be positive");
    dx_ = (x_max - x_lo) / static_cast<double>(n_nodes - 1);
    const double ratio = dx_ / h_;
    if (ratio < band.lo || ratio > band.hi) {
        throw ValidationError("grid: dx/h = " + std::to_string(ratio) + " outside [" +
                              std::to_string(band.lo) + ", " + std::to_string(band.hi) + "]");
    }
}

std::vector<double> Grid::nodes() const {
    std::vector<double> out(n_nodes_);
    for (std::size_t i = 0; i < n_nodes_; ++i) out[i] = x(i);
    return out;
}

Grid Grid::refined(std::size_t factor) const {
    const std::size_t intervals = (n_nodes_ - 1) * factor;
    const double h = h_ / static_cast<double>(factor);
    const double ratio = dx_ / h_;
    return Grid(x_lo_, x_max_, intervals + 1, h, {ratio * 0.999, ratio * 1.001});
}

BasisWeights basis_weights(const Grid& grid, double z) {
    const std::size_t last = grid.last();
    if (!(z > grid.x_lo())) return {0, 1.0, 0.0};
    if (z >= grid.x_max()) return {last - 1, 0.0, 1.0};
    const double t = (z - grid.x_lo()) / grid.dx();
    auto k = static_cast<std::size_t>(t);
    if (k >= last) k = last - 1;
    while (k + 1 < last && z >= grid.x(k + 1)) ++k;
    while (k > 0 && z < grid.x(k)) --k;
    double right = (z - grid.x(k)) / grid.dx();
    right = std::clamp(right, 0.0, 1.0);
    return {k, 1.0 - right, right};
}

double interpolate(const Grid& grid, std::span<const double> phi, double z) {
    const BasisWeights w = basis_weights(grid, z);
    return w.left * phi[w.k] + w.right * phi[w.k + 1];
}

TransitionMatrix::TransitionMatrix(const Grid& grid, std::span<const double> drift) {
    if (drift.size() != grid.n_nodes()) throw ValidationError("transition matrix: drift size mismatch");
    rows_.reserve(drift.size());
    for (std::size_t i = 0; i < drift.size(); ++i) {
        rows_.push_back(basis_weights(grid, grid.x(i) + grid.h() * drift[i]));
    }
}

std::vector<double> TransitionMatrix::apply(std::span<const double> phi) const {
    std::vector<double> out(rows_.size());
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        const auto& w = rows_[i];
        out[i] = w.left * phi[w.k] + w.right * phi[w.k + 1];
    }
    return out;
}

std::vector<double> TransitionMatrix::apply_transpose(std::span<const double> g) const {
    std::vector<double> out(rows_.size(), 0.0);
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        const auto& w = rows_[i];
        out[w.k] += w.left * g[i];
        out[w.k + 1] += w.right * g[i];
    }
    return out;
}

std::size_t TransitionMatrix::bandwidth() const {
    std::size_t band = 0;
    auto dist = [](std::size_t a, std::size_t b) { return a > b ? a - b : b - a; };
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        const auto& w = rows_[i];
        if (w.left != 0.0) band = std::max(band, dist(i, w.k));
        if (w.right != 0.0) band = std::max(band, dist(i, w.k + 1));
    }
    return band;
}

void TransitionMatrix::append_triplets(std::vector<Eigen::Triplet<double>>& out, double scale,
                                       std::size_t row0, std::size_t col0, bool transpose) const {
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        const auto& w = rows_[i];
        const std::pair<std::size_t, double> entries[2] = {{w.k, w.left}, {w.k + 1, w.right}};
        for (const auto& [k, value] : entries) {
            if (value == 0.0) continue;
            const auto r = static_cast<int>(row0 + (transpose ? k : i));
            const auto c = static_cast<int>(col0 + (transpose ? i : k));
            out.emplace_back(r, c, scale * value);
        }
    }
}

TransitionMatrix build_transition_matrix(const Grid& grid, std::span<const double> drift) {
    return TransitionMatrix(grid, drift);
}

}  // namespace mfg
