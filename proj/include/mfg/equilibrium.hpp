#pragma once

#include "mfg/fields.hpp"
#include "mfg/fpk.hpp"
#include "mfg/grid.hpp"
#include "mfg/hjb.hpp"
#include "mfg/model.hpp"

#include <optional>
#include <span>
#include <vector>

namespace mfg {

/// r = A α (K/N)^{α-1} - δ. Throws ValidationError for K ≤ 0 or N ≤ 0.
double aiyagari_rate(double K, double N, double A, double alpha, double delta);

struct OuterStep {
    double r;
    double K;
};

struct EquilibriumResult {
    double r = 0.0;
    ValueField V;
    DistributionField G;
    PolicyField policy;
    Aggregates agg;
    std::vector<OuterStep> trace;
};

/// HJB at a fixed rate followed by the invariant distribution and aggregates.
EquilibriumResult solve_stationary_at_rate(double r, const ModelParams& params, const Grid& grid,
                                           const HowardOptions& howard = {}, const PolicyField* warm = nullptr);

struct AiyagariOptions {
    double tol = 1e-5;
    std::size_t max_iter = 300;
    double relaxation = 0.5;   // initial ω in r ← (1-ω) r + ω r_next; halved whenever |r_next - r| fails to shrink
    double rate_margin = 1e-6; // candidate r is kept in (-δ, ρ - margin]
    HowardOptions howard;
};

EquilibriumResult solve_stationary_aiyagari(const ModelParams& params, const Grid& grid,
                                            const AiyagariOptions& options = {});

struct HuggettOptions {
    std::optional<double> r_lo;  // default -δ + 1e-3
    std::optional<double> r_hi;  // default ρ - 1e-3
    double tol = 1e-5;
    std::size_t max_iter = 200;
    HowardOptions howard;
};

struct HuggettBracket {
    double lo;
    double hi;
};

HuggettBracket huggett_bracket(const ModelParams& params, const HuggettOptions& options);

/// Bisection on K(r) - B with a bracket that shrinks every step.
EquilibriumResult solve_stationary_huggett(const ModelParams& params, const Grid& grid,
                                           const HuggettOptions& options = {});

struct TransitionOptions {
    double tol = 1e-4;
    std::size_t max_iter = 2000;
    double relaxation = 0.2;
    double rate_margin = 1e-6;
    PolicyOptions policy;
    bool store_paths = true;
};

struct TransitionResult {
    std::vector<double> r_path;              // N_t rates
    std::vector<double> K_path;              // K at the start of each step
    std::vector<double> N_path;
    std::vector<ValueField> V_path;          // V^0..V^{N_t} when stored
    std::vector<DistributionField> G_path;   // G^0..G^{N_t} when stored
    std::vector<PolicyField> policy_path;    // when stored
    DistributionField G_final;
    std::vector<double> sweep_trace;         // max_n |r_n change| per sweep
};

/// Backward-forward sweeps for the perfect-foresight rate path. `initial_rates`
/// defaults to params.r at every step.
TransitionResult solve_transition(const ModelParams& params, const Grid& grid, std::span<const double> A_path,
                                  const DistributionField& initial_distribution, const ValueField& terminal_V,
                                  const TransitionOptions& options = {},
                                  std::span<const double> initial_rates = {});

}  // namespace mfg
