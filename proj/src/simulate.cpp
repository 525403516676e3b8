#include "mfg/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace mfg {

namespace {

constexpr std::size_t kChunk = 1024;

void check_switching(const Grid& grid, const ModelParams& params) {
    for (IncomeType j : kIncomeTypes) {
        if (params.lambda(j) * grid.h() > 1.0) throw ValidationError("simulation requires lambda_j h <= 1");
    }
}

double uniform01(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

struct Stepper {
    const PolicyField& policy;
    const Grid& grid;
    const ModelParams& params;
    double r;

    double consumption(const AgentState& a) const { return interpolate(grid, policy.c[a.j], a.x); }

    void advance(AgentState& a, std::mt19937_64& g) const {
        const double u = uniform01(g);
        if (u < params.lambda(a.j) * grid.h()) {
            a.j = complement(a.j);
            return;
        }
        a.x += grid.h() * (r * a.x + params.y(a.j) - consumption(a));
    }
};

// Runs body(chunk_index) for every chunk on up to `threads` workers. Chunks are
// claimed statically so the mapping from chunk to work never depends on timing.
template <class Body>
void for_chunks(std::size_t n_chunks, std::size_t threads, Body body) {
    threads = std::max<std::size_t>(1, std::min(threads, n_chunks));
    if (threads == 1) {
        for (std::size_t c = 0; c < n_chunks; ++c) body(c);
        return;
    }
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t c = t; c < n_chunks; c += threads) body(c);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::mt19937_64 agent_stream(std::uint64_t seed, std::uint64_t agent) {
    return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(agent + 0x632be59bd9b4e019ULL)));
}

std::vector<AgentState> simulate_chain(double x0, IncomeType j0, const PolicyField& policy, double r,
                                       const Grid& grid, const ModelParams& params, std::size_t n_steps,
                                       std::uint64_t seed) {
    check_switching(grid, params);
    if (x0 < grid.x_lo() || x0 > grid.x_max()) throw ValidationError("simulate_chain: x0 outside the grid");
    Stepper step{policy, grid, params, r};
    std::mt19937_64 g = agent_stream(seed, 0);
    std::vector<AgentState> path;
    path.reserve(n_steps + 1);
    AgentState a{x0, j0};
    path.push_back(a);
    for (std::size_t n = 0; n < n_steps; ++n) {
        step.advance(a, g);
        path.push_back(a);
    }
    return path;
}

DistributionField empirical_distribution(const PolicyField& policy, double r, const Grid& grid,
                                         const ModelParams& params, std::uint64_t seed,
                                         const EmpiricalOptions& options) {
    check_switching(grid, params);
    const std::size_t burn_in = options.burn_in == 0 ? options.n_steps / 2 : options.burn_in;
    if (burn_in >= options.n_steps) throw ValidationError("empirical_distribution: burn-in must be below n_steps");
    const std::size_t n = grid.n_nodes();
    const std::size_t n_chunks = (options.n_agents + kChunk - 1) / kChunk;
    std::vector<TypeVectors> partial(n_chunks);
    Stepper step{policy, grid, params, r};
    const double low_share = params.type_mass(IncomeType::Low);

    for_chunks(n_chunks, options.threads, [&](std::size_t chunk) {
        TypeVectors hist(n);
        const std::size_t end = std::min(options.n_agents, (chunk + 1) * kChunk);
        for (std::size_t agent = chunk * kChunk; agent < end; ++agent) {
            std::mt19937_64 g = agent_stream(seed, agent);
            AgentState a{0.0, uniform01(g) < low_share ? IncomeType::Low : IncomeType::High};
            a.x = grid.x_lo() + uniform01(g) * (grid.x_max() - grid.x_lo());
            for (std::size_t t = 1; t <= options.n_steps; ++t) {
                step.advance(a, g);
                if (t > burn_in) {
                    const BasisWeights w = basis_weights(grid, a.x);
                    auto& hj = hist[a.j];
                    hj[w.k] += w.left;
                    if (w.right != 0.0) hj[w.k + 1] += w.right;
                }
            }
        }
        partial[chunk] = std::move(hist);
    });

    TypeVectors G(n);
    for (const auto& hist : partial) {
        for (IncomeType j : kIncomeTypes) {
            for (std::size_t i = 0; i < n; ++i) G[j][i] += hist[j][i];
        }
    }
    const double samples = static_cast<double>(options.n_agents) * static_cast<double>(options.n_steps - burn_in);
    for (IncomeType j : kIncomeTypes) {
        for (double& g : G[j]) g /= samples * grid.dx();
    }
    return G;
}

std::size_t payoff_horizon(const PolicyField& policy, const Grid& grid, const ModelParams& params,
                           double tail_tol) {
    double c_min = kInf;
    double c_max = 0.0;
    for (IncomeType j : kIncomeTypes) {
        for (double c : policy.c[j]) {
            c_min = std::min(c_min, c);
            c_max = std::max(c_max, c);
        }
    }
    c_min = std::max(c_min, kConsumptionFloor);
    const double u_bound = std::max(std::abs(utility(c_min, params.gamma)), std::abs(utility(c_max, params.gamma)));
    const double q = 1.0 - params.rho * grid.h();
    // tail = Σ_{n ≥ N} h q^n |u| ≤ q^N |u| / ρ
    const double needed = std::log(tail_tol * params.rho / u_bound) / std::log(q);
    return static_cast<std::size_t>(std::ceil(std::max(needed, 1.0)));
}

PayoffEstimate discounted_payoff(double x0, IncomeType j0, const PolicyField& policy, double r, const Grid& grid,
                                 const ModelParams& params, std::size_t n_steps, std::size_t n_paths,
                                 std::uint64_t seed, std::size_t threads) {
    check_switching(grid, params);
    const double q = 1.0 - params.rho * grid.h();
    if (!(q > 0.0 && q < 1.0)) throw ValidationError("discounted_payoff requires 0 < 1 - rho h < 1");
    if (n_paths < 2) throw ValidationError("discounted_payoff needs at least two paths");
    if (n_steps == 0) n_steps = payoff_horizon(policy, grid, params);
    Stepper step{policy, grid, params, r};
    std::vector<double> payoff(n_paths);
    const std::size_t n_chunks = (n_paths + kChunk - 1) / kChunk;
    for_chunks(n_chunks, threads, [&](std::size_t chunk) {
        const std::size_t end = std::min(n_paths, (chunk + 1) * kChunk);
        for (std::size_t p = chunk * kChunk; p < end; ++p) {
            std::mt19937_64 g = agent_stream(seed, p);
            AgentState a{x0, j0};
            double discount = grid.h();
            double total = 0.0;
            for (std::size_t n = 0; n < n_steps; ++n) {
                total += discount * utility(step.consumption(a), params.gamma);
                discount *= q;
                step.advance(a, g);
            }
            payoff[p] = total;
        }
    });
    double mean = 0.0;
    for (double v : payoff) mean += v;
    mean /= static_cast<double>(n_paths);
    double var = 0.0;
    for (double v : payoff) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n_paths - 1);
    return {mean, std::sqrt(var / static_cast<double>(n_paths)), n_steps, n_paths};
}

}  // namespace mfg
