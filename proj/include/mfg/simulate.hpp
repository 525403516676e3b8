#pragma once

#include "mfg/fields.hpp"
#include "mfg/grid.hpp"
#include "mfg/hjb.hpp"
#include "mfg/model.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace mfg {

struct AgentState {
    double x;
    IncomeType j;
};

/// splitmix64 finalizer; used to derive one independent stream per agent.
std::uint64_t splitmix64(std::uint64_t z);

/// Generator for agent `agent` under master seed `seed`.
std::mt19937_64 agent_stream(std::uint64_t seed, std::uint64_t agent);

/// Simulates x_{n+1} = x_n + h (r x_n + y_n - c_n) when the type does not
/// switch (probability 1 - λ_j h), and x_{n+1} = x_n otherwise. Consumption is
/// interpolated from the policy. Returns n_steps + 1 states.
std::vector<AgentState> simulate_chain(double x0, IncomeType j0, const PolicyField& policy, double r,
                                       const Grid& grid, const ModelParams& params, std::size_t n_steps,
                                       std::uint64_t seed);

struct EmpiricalOptions {
    std::size_t n_agents = 100000;
    std::size_t n_steps = 10000;
    std::size_t burn_in = 0;     // 0 means n_steps / 2
    std::size_t threads = 1;
};

/// Agents start with stationary type shares and uniform wealth on the grid.
/// All states after the burn-in are binned onto the grid with hat-function
/// weights and normalized to a density (Σ G dx = 1). Independent of `threads`.
DistributionField empirical_distribution(const PolicyField& policy, double r, const Grid& grid,
                                         const ModelParams& params, std::uint64_t seed,
                                         const EmpiricalOptions& options = {});

struct PayoffEstimate {
    double mean;
    double std_error;
    std::size_t n_steps;  // horizon actually used
    std::size_t n_paths;
};

/// Horizon after which the discounted tail of any consumption stream of the
/// policy is below `tail_tol`.
std::size_t payoff_horizon(const PolicyField& policy, const Grid& grid, const ModelParams& params,
                           double tail_tol = 1e-6);

/// Monte Carlo estimate of E Σ_n h (1-ρh)^n u(c_n) from (x0, j0). n_steps = 0
/// picks payoff_horizon.
PayoffEstimate discounted_payoff(double x0, IncomeType j0, const PolicyField& policy, double r, const Grid& grid,
                                 const ModelParams& params, std::size_t n_steps, std::size_t n_paths,
                                 std::uint64_t seed, std::size_t threads = 1);

}  // namespace mfg
