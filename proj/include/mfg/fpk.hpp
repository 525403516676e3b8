#pragma once

#include "mfg/fields.hpp"
#include "mfg/grid.hpp"
#include "mfg/model.hpp"

#include <array>
#include <functional>

namespace mfg {

/// Stationary distribution of the dual scheme
///   G_j = (1 - λ_j h) Mᵀ(s_j) G_j + λ_other h G_other,   Σ G dx = 1,
/// computed by replacing the last equation with the normalization row.
/// Throws ValidationError when the system is degenerate or the solution has
/// negative weights beyond rounding noise.
DistributionField solve_invariant(const TypeVectors& saving, const Grid& grid, const ModelParams& params);

/// One explicit step of the forward equation with fixed saving field.
DistributionField forward_fpk_step(const DistributionField& G, const TypeVectors& saving, const Grid& grid,
                                   const ModelParams& params);

/// Same step with prebuilt transition matrices (one per type).
DistributionField forward_fpk_step(const DistributionField& G, const std::array<TransitionMatrix, 2>& M,
                                   const Grid& grid, const ModelParams& params);

using Density = std::function<double(double)>;

/// Projects densities g_j on [x_lo, x_max] plus atoms μ_j at x_lo onto the grid:
/// doubled half-cell average at node 0, cell averages elsewhere, μ_j/dx added at
/// node 0. The density part of each type is rescaled to carry exactly ∫ g_j.
DistributionField project_initial_density(const std::array<Density, 2>& g, std::array<double, 2> atoms,
                                          const Grid& grid);

struct Aggregates {
    double K = 0.0;                           // Σ x G dx
    double N = 0.0;                           // closed form (y1 λ2 + y2 λ1)/(λ1 + λ2)
    double total_mass = 0.0;
    std::array<double, 2> type_mass{};        // Σ_i G[j][i] dx
    std::array<double, 2> boundary_mass{};    // G[j][0] dx: atom plus half-cell density
};

Aggregates aggregates(const DistributionField& G, const Grid& grid, const ModelParams& params);

/// Per-type cumulative mass F_j(x_k) = Σ_{i ≤ k} G[j][i] dx.
TypeVectors cumulative_mass(const DistributionField& G, const Grid& grid);

/// max over types and nodes of |F_a - F_b|.
double sup_cdf_distance(const DistributionField& a, const DistributionField& b, const Grid& grid);

}  // namespace mfg
