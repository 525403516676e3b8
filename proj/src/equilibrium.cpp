#include "mfg/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace mfg {

namespace {

std::string format_trace(const std::vector<OuterStep>& trace) {
    std::ostringstream out;
    out.precision(17);
    out << "iteration,r,K\n";
    for (std::size_t k = 0; k < trace.size(); ++k) out << k << ',' << trace[k].r << ',' << trace[k].K << '\n';
    return out.str();
}

double clamp_rate(double r, const ModelParams& params, double margin) {
    return std::clamp(r, -params.delta + margin, params.rho - margin);
}

}  // namespace

double aiyagari_rate(double K, double N, double A, double alpha, double delta) {
    if (!(K > 0.0)) throw ValidationError("capital must be positive for the Aiyagari closure (K = " + std::to_string(K) + ")");
    if (!(N > 0.0)) throw ValidationError("labor must be positive for the Aiyagari closure");
    return A * alpha * std::pow(K / N, alpha - 1.0) - delta;
}

EquilibriumResult solve_stationary_at_rate(double r, const ModelParams& params, const Grid& grid,
                                           const HowardOptions& howard, const PolicyField* warm) {
    std::optional<PolicyField> start;
    if (warm) start = clip_to_admissible(warm->c, grid, r, params);
    HowardResult hjb = howard_solve(r, grid, params, howard, start ? &*start : nullptr);
    EquilibriumResult out;
    out.r = r;
    out.G = solve_invariant(hjb.policy.s, grid, params);
    out.agg = aggregates(out.G, grid, params);
    out.V = std::move(hjb.V);
    out.policy = std::move(hjb.policy);
    out.trace.push_back({r, out.agg.K});
    return out;
}

EquilibriumResult solve_stationary_aiyagari(const ModelParams& params, const Grid& grid,
                                            const AiyagariOptions& options) {
    validate_params(params);
    check_step_size(grid, params);
    double r = clamp_rate(params.r, params, options.rate_margin);
    std::vector<OuterStep> trace;
    std::optional<PolicyField> warm;
    double omega = options.relaxation;
    double previous_gap = kInf;
    for (std::size_t it = 0; it < options.max_iter; ++it) {
        EquilibriumResult step = solve_stationary_at_rate(r, params, grid, options.howard, warm ? &*warm : nullptr);
        trace.push_back({r, step.agg.K});
        const double r_next =
            clamp_rate(aiyagari_rate(step.agg.K, step.agg.N, params.A, params.alpha, params.delta), params,
                       options.rate_margin);
        const double gap = std::abs(r_next - r);
        if (gap < options.tol) {
            step.trace = std::move(trace);
            return step;
        }
        // The map r -> r_next can have slope below -1; damp harder when the gap stops shrinking.
        if (gap >= previous_gap) omega *= 0.5;
        previous_gap = gap;
        warm = std::move(step.policy);
        r = (1.0 - omega) * r + omega * r_next;
    }
    throw ConvergenceError("solve_stationary_aiyagari: no convergence after " + std::to_string(options.max_iter) +
                               " outer iterations",
                           format_trace(trace));
}

HuggettBracket huggett_bracket(const ModelParams& params, const HuggettOptions& options) {
    HuggettBracket b{options.r_lo.value_or(-params.delta + 1e-3), options.r_hi.value_or(params.rho - 1e-3)};
    if (!(b.lo < b.hi) || !(b.hi < params.rho)) {
        throw ValidationError("huggett bracket [" + std::to_string(b.lo) + ", " + std::to_string(b.hi) +
                              "] must satisfy r_lo < r_hi < rho");
    }
    return b;
}

EquilibriumResult solve_stationary_huggett(const ModelParams& params, const Grid& grid,
                                           const HuggettOptions& options) {
    validate_params(params);
    check_step_size(grid, params);
    HuggettBracket bracket = huggett_bracket(params, options);
    std::vector<OuterStep> trace;

    EquilibriumResult lo = solve_stationary_at_rate(bracket.lo, params, grid, options.howard);
    EquilibriumResult hi = solve_stationary_at_rate(bracket.hi, params, grid, options.howard);
    trace.push_back({bracket.lo, lo.agg.K});
    trace.push_back({bracket.hi, hi.agg.K});
    const double excess_lo = lo.agg.K - params.B;
    const double excess_hi = hi.agg.K - params.B;
    auto finish = [&](EquilibriumResult res) {
        res.trace = trace;
        return res;
    };
    if (std::abs(excess_lo) < options.tol) return finish(std::move(lo));
    if (std::abs(excess_hi) < options.tol) return finish(std::move(hi));
    if ((excess_lo > 0.0) == (excess_hi > 0.0)) {
        throw ValidationError("huggett bracket [" + std::to_string(bracket.lo) + ", " + std::to_string(bracket.hi) +
                              "] has no sign change of K - B (K(r_lo) - B = " + std::to_string(excess_lo) +
                              ", K(r_hi) - B = " + std::to_string(excess_hi) + ")");
    }
    const bool lo_positive = excess_lo > 0.0;
    PolicyField warm = lo.policy;
    for (std::size_t it = 0; it < options.max_iter; ++it) {
        const double mid = 0.5 * (bracket.lo + bracket.hi);
        EquilibriumResult res = solve_stationary_at_rate(mid, params, grid, options.howard, &warm);
        trace.push_back({mid, res.agg.K});
        const double excess = res.agg.K - params.B;
        if (std::abs(excess) < options.tol) return finish(std::move(res));
        if ((excess > 0.0) == lo_positive) {
            bracket.lo = mid;
        } else {
            bracket.hi = mid;
        }
        warm = std::move(res.policy);
    }
    throw ConvergenceError("solve_stationary_huggett: no convergence after " + std::to_string(options.max_iter) +
                               " bisection steps",
                           format_trace(trace));
}

TransitionResult solve_transition(const ModelParams& params, const Grid& grid, std::span<const double> A_path,
                                  const DistributionField& initial_distribution, const ValueField& terminal_V,
                                  const TransitionOptions& options, std::span<const double> initial_rates) {
    validate_params(params);
    check_step_size(grid, params);
    const std::size_t steps = A_path.size();
    if (steps == 0) throw ValidationError("solve_transition: empty productivity path");
    if (!initial_rates.empty() && initial_rates.size() != steps) {
        throw ValidationError("solve_transition: initial rate path has the wrong length");
    }
    std::vector<double> r_path(steps, params.r);
    if (!initial_rates.empty()) std::copy(initial_rates.begin(), initial_rates.end(), r_path.begin());
    const double N = params.labor();

    TransitionResult out;
    std::vector<double> r_next(steps);
    std::vector<double> K(steps);
    for (std::size_t sweep = 0; sweep < options.max_iter; ++sweep) {
        BackwardPassResult backward = backward_hjb_pass(terminal_V, r_path, grid, params, options.policy);
        DistributionField G = initial_distribution;
        std::vector<DistributionField> G_path;
        if (options.store_paths) G_path.reserve(steps + 1);
        for (std::size_t n = 0; n < steps; ++n) {
            if (options.store_paths) G_path.push_back(G);
            K[n] = aggregates(G, grid, params).K;
            const auto& s = backward.policies[n].s;
            const std::array<TransitionMatrix, 2> M{TransitionMatrix(grid, s[IncomeType::Low]),
                                                    TransitionMatrix(grid, s[IncomeType::High])};
            G = forward_fpk_step(G, M, grid, params);
        }
        if (options.store_paths) G_path.push_back(G);

        double change = 0.0;
        for (std::size_t n = 0; n < steps; ++n) {
            r_next[n] = clamp_rate(aiyagari_rate(K[n], N, A_path[n], params.alpha, params.delta), params,
                                   options.rate_margin);
            change = std::max(change, std::abs(r_next[n] - r_path[n]));
        }
        out.sweep_trace.push_back(change);
        if (change < options.tol) {
            out.r_path = r_path;
            out.K_path = K;
            out.N_path.assign(steps, N);
            out.G_final = std::move(G);
            if (options.store_paths) {
                out.V_path = std::move(backward.values);
                out.G_path = std::move(G_path);
                out.policy_path = std::move(backward.policies);
            }
            return out;
        }
        for (std::size_t n = 0; n < steps; ++n) {
            r_path[n] = (1.0 - options.relaxation) * r_path[n] + options.relaxation * r_next[n];
        }
    }
    std::ostringstream trace;
    trace.precision(17);
    trace << "sweep,max_rate_change\n";
    for (std::size_t k = 0; k < out.sweep_trace.size(); ++k) trace << k << ',' << out.sweep_trace[k] << '\n';
    throw ConvergenceError("solve_transition: no convergence after " + std::to_string(options.max_iter) + " sweeps",
                           trace.str());
}

}  // namespace mfg
