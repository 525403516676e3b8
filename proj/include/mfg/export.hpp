#pragma once

#include "mfg/equilibrium.hpp"
#include "mfg/fields.hpp"
#include "mfg/grid.hpp"
#include "mfg/model.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace mfg {

/// 17 significant digits.
std::string format_number(double v);

/// Writes value.csv, policy.csv, distribution.csv, equilibrium.csv and mpc.csv.
/// `params.r` is ignored; the result's rate is used.
std::vector<std::filesystem::path> export_stationary(const EquilibriumResult& result, const Grid& grid,
                                                     const ModelParams& params,
                                                     const std::filesystem::path& out_dir);

/// Writes r_path.csv (t, r, K), one row per time step.
std::filesystem::path export_transition(const TransitionResult& result, const Grid& grid,
                                        const std::filesystem::path& out_dir);

/// Writes x, G1, G2 for a distribution (used for the simulated histogram).
std::filesystem::path export_distribution(const DistributionField& G, const Grid& grid,
                                          const std::filesystem::path& file);

}  // namespace mfg
