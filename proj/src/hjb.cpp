#include "mfg/hjb.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mfg {

namespace {

ModelParams at_rate(const ModelParams& params, double r) {
    ModelParams p = params;
    p.r = r;
    return p;
}

/// Discounted continuation weight (1-ρh)(1-λ_j h) on the own-type value.
double continuation_weight(IncomeType j, const Grid& grid, const ModelParams& params) {
    const double h = grid.h();
    return (1.0 - params.rho * h) * (1.0 - params.lambda(j) * h);
}

struct NodeProblem {
    double x;        // x_i
    double income;   // r x_i + y_j
    double c_lo;     // effective lower end (≥ consumption floor)
    double c_hi;
    double beta;     // continuation weight
    double h;
    double gamma;

    double landing(double c) const { return x + h * (income - c); }
};

NodeProblem node_problem(std::size_t i, IncomeType j, const Grid& grid, const ModelParams& p) {
    const ControlInterval ci = admissible_control_interval(i, j, grid, p);
    const double x = grid.x(i);
    NodeProblem np{x, p.r * x + p.y(j), std::max(ci.lo, kConsumptionFloor), ci.hi,
                   continuation_weight(j, grid, p), grid.h(), p.gamma};
    if (np.c_hi < np.c_lo) np.c_lo = np.c_hi;
    return np;
}

double objective(const NodeProblem& np, const Grid& grid, std::span<const double> v, double c) {
    return np.h * utility(c, np.gamma) + np.beta * interpolate(grid, v, np.landing(c));
}

struct Argmax {
    double c;
    double value;
};

// Walks the linear pieces of c ↦ I[V](x + h(b - c)). On each piece the
// objective is h u(c) + β (a - m h c) up to a constant, strictly concave, so the
// piecewise maximizer is the clipped stationary point u'(c) = β m.
Argmax maximize_exact(const NodeProblem& np, const Grid& grid, std::span<const double> v) {
    Argmax best{np.c_lo, objective(np, grid, v, np.c_lo)};
    auto consider = [&](double c) {
        c = std::clamp(c, np.c_lo, np.c_hi);
        const double f = objective(np, grid, v, c);
        if (f > best.value || (f == best.value && c < best.c)) best = {c, f};
    };
    const double z_top = np.landing(np.c_lo);
    const double z_bottom = np.landing(np.c_hi);
    if (z_top > grid.x_max()) consider(np.income + (np.x - grid.x_max()) / np.h);
    const double dx = grid.dx();
    const std::size_t k_top = basis_weights(grid, std::min(z_top, grid.x_max())).k;
    const std::size_t k_bottom = basis_weights(grid, std::max(z_bottom, grid.x_lo())).k;
    const double inv_gamma = -1.0 / np.gamma;
    // Descending k means ascending c.
    for (std::size_t k = k_top + 1; k-- > k_bottom;) {
        const double z_hi = std::min(grid.x(k + 1), z_top);
        const double z_lo = std::max(grid.x(k), z_bottom);
        if (z_hi < z_lo) continue;
        const double c_a = np.income + (np.x - z_hi) / np.h;
        const double c_b = np.income + (np.x - z_lo) / np.h;
        const double slope = (v[k + 1] - v[k]) / dx;
        double c_star = c_b;
        if (slope > 0.0) c_star = std::pow(np.beta * slope, inv_gamma);
        consider(std::clamp(c_star, c_a, c_b));
    }
    consider(np.c_hi);
    return best;
}

Argmax maximize_mesh(const NodeProblem& np, const Grid& grid, std::span<const double> v,
                     const PolicyOptions& options) {
    const std::size_t n = std::max<std::size_t>(options.mesh_size, 2);
    double lo = np.c_lo;
    double hi = np.c_hi;
    Argmax best{lo, -kInf};
    for (std::size_t level = 0; level < std::max<std::size_t>(options.mesh_levels, 1); ++level) {
        const double width = (hi - lo) / static_cast<double>(n - 1);
        best = {lo, -kInf};
        for (std::size_t m = 0; m < n; ++m) {
            const double c = m + 1 == n ? hi : lo + width * static_cast<double>(m);
            const double f = objective(np, grid, v, c);
            if (f > best.value) best = {c, f};
        }
        lo = std::max(np.c_lo, best.c - width);
        hi = std::min(np.c_hi, best.c + width);
    }
    return best;
}

double first_order_consumption(const NodeProblem& np, double gradient) {
    double c = np.c_hi;
    if (gradient > 0.0) c = std::min(std::pow(gradient, -1.0 / np.gamma), np.c_hi);
    return std::max(c, np.c_lo);
}

struct Assembly {
    Eigen::SparseMatrix<double> A;
    Eigen::VectorXd rhs;
};

// Block system of the policy-evaluation step, unknowns ordered (V_1, V_2).
Assembly assemble_evaluation(const PolicyField& policy, const Grid& grid, const ModelParams& p) {
    const std::size_t n = grid.n_nodes();
    const double h = grid.h();
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(8 * n);
    Eigen::VectorXd rhs(2 * n);
    for (IncomeType j : kIncomeTypes) {
        const std::size_t off = index(j) * n;
        const std::size_t other = index(complement(j)) * n;
        const TransitionMatrix M(grid, policy.s[j]);
        M.append_triplets(triplets, -continuation_weight(j, grid, p), off, off, false);
        const double coupling = -(1.0 - p.rho * h) * p.lambda(j) * h;
        for (std::size_t i = 0; i < n; ++i) {
            triplets.emplace_back(static_cast<int>(off + i), static_cast<int>(off + i), 1.0);
            if (coupling != 0.0) {
                triplets.emplace_back(static_cast<int>(off + i), static_cast<int>(other + i), coupling);
            }
            rhs[static_cast<Eigen::Index>(off + i)] = h * utility(policy.c[j][i], p.gamma);
        }
    }
    Eigen::SparseMatrix<double> A(static_cast<Eigen::Index>(2 * n), static_cast<Eigen::Index>(2 * n));
    A.setFromTriplets(triplets.begin(), triplets.end());
    A.makeCompressed();
    return {std::move(A), std::move(rhs)};
}

Eigen::VectorXd stack(const ValueField& V) {
    const std::size_t n = V.size();
    Eigen::VectorXd out(2 * n);
    for (IncomeType j : kIncomeTypes)
        for (std::size_t i = 0; i < n; ++i) out[static_cast<Eigen::Index>(index(j) * n + i)] = V[j][i];
    return out;
}

ValueField unstack(const Eigen::VectorXd& x, std::size_t n) {
    ValueField V(n);
    for (IncomeType j : kIncomeTypes)
        for (std::size_t i = 0; i < n; ++i) V[j][i] = x[static_cast<Eigen::Index>(index(j) * n + i)];
    return V;
}

}  // namespace

char method_letter(PolicyMethod m) {
    switch (m) {
        case PolicyMethod::Exact: return 'a';
        case PolicyMethod::Mesh: return 'b';
        case PolicyMethod::FirstOrder: return 'c';
    }
    return '?';
}

PolicyMethod parse_method(const std::string& letter) {
    if (letter == "a") return PolicyMethod::Exact;
    if (letter == "b") return PolicyMethod::Mesh;
    if (letter == "c") return PolicyMethod::FirstOrder;
    throw ValidationError("unknown policy-update method '" + letter + "' (expected a, b or c)");
}

void check_step_size(const Grid& grid, const ModelParams& params) {
    const double h = grid.h();
    if (params.rho * h >= 1.0) throw ValidationError("time step too large: rho * h >= 1");
    if (params.lambda1 * h >= 1.0) throw ValidationError("time step too large: lambda1 * h >= 1");
    if (params.lambda2 * h >= 1.0) throw ValidationError("time step too large: lambda2 * h >= 1");
}

std::vector<double> fd_gradient(std::span<const double> v, const Grid& grid) {
    const std::size_t n = v.size();
    if (n < 2) throw ValidationError("fd_gradient: need at least two nodes");
    const double dx = grid.dx();
    std::vector<double> d(n);
    d[0] = (v[1] - v[0]) / dx;
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (v[i + 1] - v[i - 1]) / (2.0 * dx);
    d[n - 1] = (v[n - 1] - v[n - 2]) / dx;
    return d;
}

PolicyField make_policy(TypeVectors consumption, const Grid& grid, double r, const ModelParams& params) {
    PolicyField out{std::move(consumption), TypeVectors(grid.n_nodes())};
    for (IncomeType j : kIncomeTypes)
        for (std::size_t i = 0; i < grid.n_nodes(); ++i)
            out.s[j][i] = r * grid.x(i) + params.y(j) - out.c[j][i];
    return out;
}

PolicyField clip_to_admissible(const TypeVectors& consumption, const Grid& grid, double r,
                               const ModelParams& params) {
    const ModelParams p = at_rate(params, r);
    TypeVectors c = consumption;
    for (IncomeType j : kIncomeTypes) {
        for (std::size_t i = 0; i < grid.n_nodes(); ++i) {
            const NodeProblem np = node_problem(i, j, grid, p);
            c[j][i] = std::clamp(c[j][i], np.c_lo, np.c_hi);
        }
    }
    return make_policy(std::move(c), grid, r, params);
}

PolicyField default_initial_policy(const Grid& grid, double r, const ModelParams& params) {
    const ModelParams p = at_rate(params, r);
    const double floor = 0.5 * (r * params.x_lo + params.y1);
    TypeVectors c(grid.n_nodes());
    for (IncomeType j : kIncomeTypes) {
        for (std::size_t i = 0; i < grid.n_nodes(); ++i) {
            const NodeProblem np = node_problem(i, j, grid, p);
            c[j][i] = std::clamp(std::max(np.income, floor), np.c_lo, np.c_hi);
        }
    }
    return make_policy(std::move(c), grid, r, params);
}

PolicyField policy_update(const ValueField& V, const Grid& grid, double r, const ModelParams& params,
                          const PolicyOptions& options) {
    const ModelParams p = at_rate(params, r);
    const std::size_t n = grid.n_nodes();
    TypeVectors c(n);
    for (IncomeType j : kIncomeTypes) {
        const std::span<const double> v = V[j];
        std::vector<double> grad;
        if (options.method == PolicyMethod::FirstOrder) grad = fd_gradient(v, grid);
        for (std::size_t i = 0; i < n; ++i) {
            const NodeProblem np = node_problem(i, j, grid, p);
            switch (options.method) {
                case PolicyMethod::Exact: c[j][i] = maximize_exact(np, grid, v).c; break;
                case PolicyMethod::Mesh: c[j][i] = maximize_mesh(np, grid, v, options).c; break;
                case PolicyMethod::FirstOrder: c[j][i] = first_order_consumption(np, grad[i]); break;
            }
        }
    }
    return make_policy(std::move(c), grid, r, params);
}

double mesh_width(std::size_t i, IncomeType j, const Grid& grid, double r, const ModelParams& params,
                  const PolicyOptions& options) {
    const NodeProblem np = node_problem(i, j, grid, at_rate(params, r));
    const double n = static_cast<double>(std::max<std::size_t>(options.mesh_size, 2) - 1);
    double width = (np.c_hi - np.c_lo) / n;
    for (std::size_t level = 1; level < std::max<std::size_t>(options.mesh_levels, 1); ++level) width = 2.0 * width / n;
    return width;
}

ValueField policy_evaluation(const PolicyField& policy, double r, const Grid& grid,
                             const ModelParams& params, const ValueField* start) {
    check_step_size(grid, params);
    const ModelParams p = at_rate(params, r);
    const std::size_t n = grid.n_nodes();
    const Assembly sys = assemble_evaluation(policy, grid, p);
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(sys.A);
    if (lu.info() != Eigen::Success) throw ValidationError("policy evaluation: singular system");
    Eigen::VectorXd x = start ? stack(*start) : Eigen::VectorXd::Zero(sys.rhs.size());
    // Iterative refinement; the first pass is the plain solve when no start is given.
    for (int pass = 0; pass < 3; ++pass) {
        const Eigen::VectorXd residual = sys.rhs - sys.A * x;
        x += lu.solve(residual);
    }
    return unstack(x, n);
}

double policy_evaluation_residual(const ValueField& V, const PolicyField& policy, double r,
                                  const Grid& grid, const ModelParams& params) {
    const ModelParams p = at_rate(params, r);
    const Assembly sys = assemble_evaluation(policy, grid, p);
    const Eigen::VectorXd res = sys.rhs - sys.A * stack(V);
    return res.cwiseAbs().maxCoeff();
}

HowardResult howard_solve(double r, const Grid& grid, const ModelParams& params,
                          const HowardOptions& options, const PolicyField* c_init) {
    check_step_size(grid, params);
    if (!(r < params.rho)) throw ValidationError("howard_solve: need r < rho");
    HowardResult out;
    if (c_init) {
        out.policy = *c_init;
    } else if (options.policy.method == PolicyMethod::FirstOrder) {
        // cold starts of the first-order update are seeded with the exact policy
        HowardOptions seed = options;
        seed.policy.method = PolicyMethod::Exact;
        seed.record_values = false;
        out.policy = howard_solve(r, grid, params, seed).policy;
    } else {
        out.policy = default_initial_policy(grid, r, params);
    }
    out.V = policy_evaluation(out.policy, r, grid, params);
    if (options.record_values) out.history.push_back(out.V);
    for (std::size_t it = 0; it < options.max_iter; ++it) {
        PolicyField next = policy_update(out.V, grid, r, params, options.policy);
        const double change = sup_distance(next.c, out.policy.c);
        out.trace.push_back(change);
        out.policy = std::move(next);
        out.V = policy_evaluation(out.policy, r, grid, params, &out.V);
        if (options.record_values) out.history.push_back(out.V);
        if (change < options.tol) return out;
    }
    std::ostringstream trace;
    trace << "iteration,policy_change\n";
    for (std::size_t k = 0; k < out.trace.size(); ++k) trace << k << ',' << out.trace[k] << '\n';
    throw ConvergenceError("howard_solve: no convergence after " + std::to_string(options.max_iter) +
                               " iterations at r = " + std::to_string(r),
                           trace.str());
}

TypeVectors scheme_operator(const ValueField& V, double r, const Grid& grid, const ModelParams& params,
                            const PolicyOptions& options) {
    const ModelParams p = at_rate(params, r);
    const std::size_t n = grid.n_nodes();
    const double h = grid.h();
    const PolicyField policy = policy_update(V, grid, r, params, options);
    TypeVectors F(n);
    for (IncomeType j : kIncomeTypes) {
        const IncomeType o = complement(j);
        for (std::size_t i = 0; i < n; ++i) {
            const NodeProblem np = node_problem(i, j, grid, p);
            const double q = V[j][i];
            const double c = policy.c[j][i];
            const double sup = utility(c, p.gamma) + np.beta / h * (interpolate(grid, V[j], np.landing(c)) - q);
            F[j][i] = p.rho * q - (1.0 - p.rho * h) * p.lambda(j) * (V[o][i] - q) - sup;
        }
    }
    return F;
}

double scheme_residual(const ValueField& V, double r, const Grid& grid, const ModelParams& params,
                       const PolicyOptions& options) {
    return sup_norm(scheme_operator(V, r, grid, params, options));
}

BackwardPassResult backward_hjb_pass(const ValueField& terminal, std::span<const double> r_path,
                                     const Grid& grid, const ModelParams& params,
                                     const PolicyOptions& options) {
    check_step_size(grid, params);
    const std::size_t steps = r_path.size();
    const std::size_t n = grid.n_nodes();
    const double h = grid.h();
    BackwardPassResult out;
    out.values.resize(steps + 1);
    out.policies.resize(steps);
    out.values[steps] = terminal;
    for (std::size_t step = steps; step-- > 0;) {
        const double r = r_path[step];
        const ValueField& next = out.values[step + 1];
        PolicyField policy = policy_update(next, grid, r, params, options);
        ValueField V(n);
        for (IncomeType j : kIncomeTypes) {
            const TransitionMatrix M(grid, policy.s[j]);
            const std::vector<double> transported = M.apply(next[j]);
            const double stay = continuation_weight(j, grid, params);
            const double switch_w = (1.0 - params.rho * h) * params.lambda(j) * h;
            const auto& other = next[complement(j)];
            for (std::size_t i = 0; i < n; ++i) {
                V[j][i] = h * utility(policy.c[j][i], params.gamma) + stay * transported[i] + switch_w * other[i];
            }
        }
        out.values[step] = std::move(V);
        out.policies[step] = std::move(policy);
    }
    return out;
}

}  // namespace mfg
