// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include "mfg/config.hpp"
#include "mfg/equilibrium.hpp"
#include "mfg/simulate.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>

using namespace mfg;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

int failures = 0;

void report(int id, const char* name, const std::function<Outcome()>& check) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = check();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    std::printf("criterion %2d %s  %s: %s (%.1f s)\n", id, o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
    std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

RunConfig shipped(const char* name) { return load_config(std::filesystem::path(MFG_CONFIG_DIR) / name); }

ModelParams at(const ModelParams& p, double r) {
    ModelParams q = p;
    q.r = r;
    return q;
}

HowardOptions exact_howard(double tol = 1e-8) {
    HowardOptions o;
    o.tol = tol;
    o.policy.method = PolicyMethod::Exact;
    return o;
}

double mean_slope(const std::vector<double>& c, const Grid& g) {
    const std::vector<double> d = fd_gradient(c, g);
    const std::size_t from = 3 * g.n_nodes() / 4;
    double sum = 0.0;
    for (std::size_t i = from; i < g.n_nodes(); ++i) sum += d[i];
    return sum / static_cast<double>(g.n_nodes() - from);
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
    double mx = 0, my = 0;
    for (std::size_t k = 0; k < x.size(); ++k) mx += x[k], my += y[k];
    mx /= x.size();
    my /= y.size();
    double sxy = 0, sxx = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxy += (x[k] - mx) * (y[k] - my);
        sxx += (x[k] - mx) * (x[k] - mx);
    }
    return sxy / sxx;
}

}  // namespace

int main() {
    const RunConfig cfg2 = shipped("aiyagari_gamma2.cfg");
    const RunConfig cfg4 = shipped("aiyagari_gamma4.cfg");
    const Grid g = cfg2.grid();
    std::printf("solving the gamma = 2 and gamma = 4 equilibria on %zu nodes\n", g.n_nodes());
    std::fflush(stdout);
    const EquilibriumResult eq2 = solve_stationary_aiyagari(cfg2.params, g, cfg2.aiyagari_options());
    const EquilibriumResult eq4 = solve_stationary_aiyagari(cfg4.params, g, cfg4.aiyagari_options());
    const ModelParams p2 = at(cfg2.params, eq2.r);
    const double dx = g.dx();

    report(1, "mass identities", [&] {
        const DistributionField G = solve_invariant(eq2.policy.s, g, p2);
        const Aggregates a = aggregates(G, g, p2);
        const double e_total = std::abs(a.total_mass - 1.0);
        double e_type = 0.0;
        for (IncomeType j : kIncomeTypes) e_type = std::max(e_type, std::abs(a.type_mass[index(j)] - p2.type_mass(j)));
        return Outcome{e_total <= 1e-10 && e_type <= 1e-8,
                       fmt("|mass - 1| = %.2e", e_total) + fmt(", max type-mass error = %.2e", e_type)};
    });

    report(2, "Howard monotonicity and bounds", [&] {
        HowardOptions o = exact_howard(1e-10);
        o.record_values = true;
        const HowardResult h = howard_solve(eq2.r, g, p2, o);
        double worst = 0.0;
        for (std::size_t k = 1; k < h.history.size(); ++k)
            for (IncomeType j : kIncomeTypes)
                for (std::size_t i = 0; i < g.n_nodes(); ++i)
                    worst = std::max(worst, h.history[k - 1][j][i] - h.history[k][j][i]);
        const BarrierBounds b = barrier_bounds(p2);
        double lo = 0.0, hi = -kInf;
        for (IncomeType j : kIncomeTypes)
            for (double v : h.V[j]) lo = std::min(lo, v), hi = std::max(hi, v);
        return Outcome{worst <= 1e-12 && lo >= b.lower && hi <= b.upper,
                       fmt("max decrease %.2e", worst) + fmt(" over %.0f iterations", double(h.history.size())) +
                           fmt(", V in [%.4f", lo) + fmt(", %.4f]", hi) + fmt(" within [%.4f, 0]", b.lower)};
    });

    report(3, "wealth monotonicity of V", [&] {
        double worst = 0.0;
        for (double ratio : {0.5, 1.0, 2.0}) {
            const Grid gr(p2.x_lo, g.x_max(), g.n_nodes(), dx / ratio);
            const HowardResult h = howard_solve(eq2.r, gr, p2, exact_howard());
            for (IncomeType j : kIncomeTypes)
                for (std::size_t i = 1; i < gr.n_nodes(); ++i) worst = std::max(worst, h.V[j][i - 1] - h.V[j][i]);
        }
        return Outcome{worst <= 1e-10, fmt("largest decrease %.2e for dx/h in {0.5, 1, 2}", worst)};
    });

    report(4, "policy structure", [&] {
        const auto& s1 = eq2.policy.s[IncomeType::Low];
        const auto& s2 = eq2.policy.s[IncomeType::High];
        double s1_max = -kInf;
        for (double v : s1) s1_max = std::max(s1_max, v);
        int changes = 0;
        bool starts_positive = s2.front() > 0.0;
        for (std::size_t i = 1; i < s2.size(); ++i) changes += (s2[i] > 0.0) != (s2[i - 1] > 0.0);
        const bool shape = changes == 0 || (changes == 1 && starts_positive);
        const bool ok = s1_max <= 1e-8 && std::abs(s1.front()) <= 1e-8 && shape &&
                        eq2.agg.boundary_mass[1] < eq2.agg.boundary_mass[0];
        return Outcome{ok, fmt("max s1 = %.2e", s1_max) + fmt(", |s1(x_lo)| = %.2e", std::abs(s1.front())) +
                               fmt(", s2 sign changes = %.0f", changes) +
                               fmt(", boundary mass %.5f", eq2.agg.boundary_mass[1]) +
                               fmt(" (type 2) vs %.5f (type 1)", eq2.agg.boundary_mass[0])};
    });

    report(5, "simulated distribution vs invariant distribution", [&] {
        EmpiricalOptions o;
        o.n_agents = 100000;
        o.n_steps = 10000;
        const DistributionField E = empirical_distribution(eq2.policy, eq2.r, g, p2, 2024, o);
        const double d = sup_cdf_distance(E, eq2.G, g);
        return Outcome{d <= 0.02, fmt("sup CDF distance %.4f", d)};
    });

    report(6, "Monte Carlo payoff vs V", [&] {
        const Grid fine(p2.x_lo, 19.85, 2001, 0.01);
        const HowardResult h = howard_solve(eq2.r, fine, p2, cfg2.howard_options());
        std::mt19937_64 pick(6);
        int inside = 0;
        double worst = 0.0;
        for (int k = 0; k < 20; ++k) {
            const std::size_t i = std::uniform_int_distribution<std::size_t>(0, fine.n_nodes() - 1)(pick);
            const IncomeType j = k % 2 ? IncomeType::High : IncomeType::Low;
            const PayoffEstimate est = discounted_payoff(fine.x(i), j, h.policy, eq2.r, fine, p2, 0, 2000, 100 + k);
            const double gap = std::abs(est.mean - h.V[j][i]);
            const double allowed = 3.0 * est.std_error + 1e-3;
            inside += gap <= allowed;
            worst = std::max(worst, gap / allowed);
        }
        return Outcome{inside == 20, fmt("%.0f of 20 nodes inside 3 standard errors + 1e-3", inside) +
                                         fmt(", worst gap/allowed %.2f", worst)};
    });

    report(7, "equilibrium fixed points", [&] {
        const double rate = aiyagari_rate(eq2.agg.K, eq2.agg.N, p2.A, p2.alpha, p2.delta);
        const double e_a = std::abs(eq2.r - rate);
        const RunConfig hc = shipped("huggett_B0.cfg");
        const EquilibriumResult hu = solve_stationary_huggett(hc.params, hc.grid(), hc.huggett_options());
        const double e_h = std::abs(hu.agg.K - hc.params.B);
        return Outcome{e_a <= 1e-5 && eq2.r < p2.rho && e_h <= 1e-5,
                       fmt("Aiyagari r = %.6f", eq2.r) + fmt(", |r - F(K)| = %.2e", e_a) +
                           fmt("; Huggett r = %.6f", hu.r) + fmt(", |K - B| = %.2e", e_h)};
    });

    report(8, "comparative statics in gamma", [&] {
        const double b2 = eq2.agg.boundary_mass[0] + eq2.agg.boundary_mass[1];
        const double b4 = eq4.agg.boundary_mass[0] + eq4.agg.boundary_mass[1];
        std::size_t lower = 0, total = 0;
        for (IncomeType j : kIncomeTypes)
            for (std::size_t i = 0; i < g.n_nodes(); ++i, ++total) lower += eq4.policy.c[j][i] < eq2.policy.c[j][i];
        const double share = static_cast<double>(lower) / static_cast<double>(total);
        return Outcome{eq4.r < eq2.r && b4 < b2 && share >= 0.95,
                       fmt("r %.5f", eq4.r) + fmt(" vs %.5f", eq2.r) + fmt(", boundary mass %.5f", b4) +
                           fmt(" vs %.5f", b2) + fmt(", c lower on %.1f%% of nodes", 100.0 * share)};
    });

    report(9, "MPC asymptote", [&] {
        std::string detail;
        bool ok = true;
        for (const EquilibriumResult* eq : {&eq2, &eq4}) {
            const ModelParams& p = eq == &eq2 ? cfg2.params : cfg4.params;
            const double target = eq->r + (p.rho - eq->r) / p.gamma;
            for (IncomeType j : kIncomeTypes) {
                const double m = mean_slope(eq->policy.c[j], g);
                const double rel = std::abs(m - target) / target;
                ok = ok && rel <= 0.1;
                detail += fmt("gamma %.0f", p.gamma) + fmt(" type %.0f: ", double(index(j) + 1)) +
                          fmt("%.5f", m) + fmt(" vs %.5f", target) + fmt(" (%.1f%%); ", 100.0 * rel);
            }
        }
        return Outcome{ok, detail};
    });

    report(10, "transition after a productivity increase", [&] {
        const RunConfig tc = shipped("transition.cfg");
        const Grid tg = tc.grid();
        const EquilibriumResult terminal = solve_stationary_aiyagari(tc.params, tg, tc.aiyagari_options());
        ModelParams before = tc.params;
        before.A = tc.transition_A0;
        const EquilibriumResult initial = solve_stationary_aiyagari(before, tg, tc.aiyagari_options());
        const std::size_t steps = tc.transition_steps();
        const std::vector<double> A(steps, tc.params.A), start(steps, terminal.r);
        TransitionOptions o = tc.transition_options();
        o.store_paths = false;
        const TransitionResult tr = solve_transition(tc.params, tg, A, initial.G, terminal.V, o, start);
        std::size_t ups = 0;
        for (std::size_t n = 1; n < tr.r_path.size(); ++n) ups += tr.r_path[n] > tr.r_path[n - 1] + 1e-8;
        const double up_share = static_cast<double>(ups) / static_cast<double>(tr.r_path.size() - 1);
        const double end_gap = std::abs(tr.r_path.back() - terminal.r);
        const bool ok = tr.sweep_trace.back() < 1e-4 && tr.r_path.front() > terminal.r && up_share <= 0.01 &&
                        end_gap <= 1e-3;
        return Outcome{ok, fmt("%.0f sweeps", double(tr.sweep_trace.size())) +
                               fmt(", last change %.2e", tr.sweep_trace.back()) +
                               fmt(", r(0) = %.5f", tr.r_path.front()) + fmt(" vs r_st = %.5f", terminal.r) +
                               fmt(", rising steps %.2f%%", 100.0 * up_share) + fmt(", |r(T) - r_st| = %.2e", end_gap)};
    });

    report(11, "grid refinement Cauchy test", [&] {
        const ModelParams p = at(cfg2.params, 0.03);
        Grid gr(p.x_lo, 19.85, 101, 0.2);
        std::vector<ValueField> V;
        std::vector<Grid> grids;
        for (int level = 0; level < 4; ++level) {
            V.push_back(howard_solve(p.r, gr, p, exact_howard(1e-10)).V);
            grids.push_back(gr);
            gr = gr.refined(2);
        }
        std::vector<double> gaps;
        for (std::size_t k = 0; k + 1 < V.size(); ++k) {
            double gap = 0.0;
            for (IncomeType j : kIncomeTypes)
                for (std::size_t i = 0; i < grids[0].n_nodes(); ++i) {
                    const std::size_t a = i << k, b = i << (k + 1);
                    gap = std::max(gap, std::abs(V[k][j][a] - V[k + 1][j][b]));
                }
            gaps.push_back(gap);
        }
        bool ok = true;
        std::string detail = "gaps";
        for (std::size_t k = 0; k < gaps.size(); ++k) {
            detail += fmt(" %.3e", gaps[k]);
            if (k > 0) {
                const double ratio = gaps[k] / gaps[k - 1];
                ok = ok && ratio <= 0.75;
                detail += fmt(" (ratio %.3f)", ratio);
            }
        }
        return Outcome{ok, detail};
    });

    report(12, "consistency of the scheme operator", [&] {
        const ModelParams p = at(cfg2.params, 0.03);
        std::vector<double> hs, errs;
        std::string detail = "errors";
        for (int level = 0; level < 4; ++level) {
            const double h = 0.1 / std::pow(2.0, level);
            const std::size_t cells = static_cast<std::size_t>(std::llround(10.0 / h));
            const Grid gr(p.x_lo, p.x_lo + 10.0, cells + 1, h);
            ValueField phi(gr.n_nodes());
            for (std::size_t i = 0; i < gr.n_nodes(); ++i) {
                phi[IncomeType::Low][i] = -std::exp(-gr.x(i));
                phi[IncomeType::High][i] = -std::exp(-gr.x(i)) + 0.5;
            }
            const TypeVectors F = scheme_operator(phi, p.r, gr, p, {PolicyMethod::Exact});
            double err = 0.0;
            for (IncomeType j : kIncomeTypes) {
                const IncomeType o = complement(j);
                for (std::size_t i = 0; i < gr.n_nodes(); ++i) {
                    const double x = gr.x(i);
                    if (x < 1.0 || x > 5.0) continue;
                    const double exact = p.rho * phi[j][i] - p.lambda(j) * (phi[o][i] - phi[j][i]) -
                                         hamiltonian(x, p.y(j), std::exp(-x), p);
                    err = std::max(err, std::abs(F[j][i] - exact));
                }
            }
            hs.push_back(std::log(h));
            errs.push_back(std::log(err));
            detail += fmt(" %.3e", err);
        }
        const double order = slope(hs, errs);
        return Outcome{std::abs(order - 1.0) <= 0.3, detail + fmt(", fitted order %.3f", order)};
    });

    std::printf("%d of 12 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
