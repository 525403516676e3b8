#include "doctest.h"
#include "support.hpp"

#include "mfg/fpk.hpp"
#include "mfg/hjb.hpp"

#include <Eigen/Dense>
#include <cmath>

using namespace mfg;

namespace {

Grid grid_for(const ModelParams& p, double x_max, std::size_t n) {
    return Grid(p.x_lo, x_max, n, (x_max - p.x_lo) / static_cast<double>(n - 1));
}

TypeVectors howard_saving(const ModelParams& p, const Grid& g) {
    HowardOptions o;
    o.policy.method = PolicyMethod::Exact;
    return howard_solve(p.r, g, p, o).policy.s;
}

// Stationary law of the node chain, built densely from the transition rule:
// switch type with probability λ_j h, otherwise move to the neighbours of
// x_i + h s_i with linear-interpolation weights.
DistributionField dense_stationary(const TypeVectors& s, const Grid& g, const ModelParams& p) {
    const std::size_t n = g.n_nodes();
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (IncomeType j : kIncomeTypes) {
        const double lam = p.lambda(j) * g.h();
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t from = index(j) * n + i;
            P(from, index(complement(j)) * n + i) += lam;
            double z = std::clamp(g.x(i) + g.h() * s[j][i], g.x_lo(), g.x_max());
            double pos = (z - g.x_lo()) / g.dx();
            std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(std::floor(pos)), n - 2);
            const double t = pos - static_cast<double>(k);
            P(from, index(j) * n + k) += (1 - lam) * (1 - t);
            P(from, index(j) * n + k + 1) += (1 - lam) * t;
        }
    }
    Eigen::MatrixXd A = P.transpose() - Eigen::MatrixXd::Identity(2 * n, 2 * n);
    A.row(2 * n - 1).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(2 * n);
    b[2 * n - 1] = 1.0;
    const Eigen::VectorXd pi = A.fullPivLu().solve(b);
    DistributionField G(n);
    for (IncomeType j : kIncomeTypes) {
        for (std::size_t i = 0; i < n; ++i) G[j][i] = pi[index(j) * n + i] / g.dx();
    }
    return G;
}

double mass(const std::vector<double>& g, double dx) {
    double m = 0.0;
    for (double v : g) m += v * dx;
    return m;
}

}  // namespace

TEST_CASE("invariant distribution mass identities") {
    ModelParams p;
    const Grid g = grid_for(p, 20.0, 400);
    const DistributionField G = solve_invariant(howard_saving(p, g), g, p);
    CHECK(std::abs(mass(G[IncomeType::Low], g.dx()) + mass(G[IncomeType::High], g.dx()) - 1.0) <= 1e-10);
    CHECK(std::abs(mass(G[IncomeType::Low], g.dx()) - 0.5) <= 1e-8);
    for (IncomeType j : kIncomeTypes)
        for (double v : G[j]) CHECK(v >= 0.0);

    p.lambda2 = 0.6;
    const DistributionField H = solve_invariant(howard_saving(p, g), g, p);
    CHECK(std::abs(mass(H[IncomeType::Low], g.dx()) - 0.6) <= 1e-8);
    CHECK(std::abs(mass(H[IncomeType::High], g.dx()) - 0.4) <= 1e-8);
}

TEST_CASE("invariant distribution matches a dense stationary solve") {
    testing::Gen gen(41);
    for (int trial = 0; trial < 4; ++trial) {
        ModelParams p;
        p.lambda1 = gen.uniform(0.2, 0.8);
        p.lambda2 = gen.uniform(0.2, 0.8);
        p.r = gen.uniform(0.0, 0.04);
        const Grid g = grid_for(p, 8.0, 60);
        const TypeVectors s = howard_saving(p, g);
        const DistributionField G = solve_invariant(s, g, p);
        const DistributionField D = dense_stationary(s, g, p);
        CHECK(sup_distance(G, D) <= 1e-9 * (1.0 + sup_norm(D)));
    }
}

TEST_CASE("invariant distribution is a fixed point of the forward step") {
    ModelParams p;
    const Grid g = grid_for(p, 20.0, 400);
    const TypeVectors s = howard_saving(p, g);
    const DistributionField G = solve_invariant(s, g, p);
    const DistributionField next = forward_fpk_step(G, s, g, p);
    CHECK(sup_distance(G, next) <= 1e-8);
}

TEST_CASE("degenerate chains are rejected") {
    ModelParams p;
    const Grid g = grid_for(p, 5.0, 51);
    const TypeVectors frozen(g.n_nodes(), 0.0);
    CHECK_THROWS_AS(solve_invariant(frozen, g, p), ValidationError);
}

TEST_CASE("forward step with zero drift only mixes types") {
    ModelParams p;
    const Grid g = grid_for(p, 5.0, 51);
    testing::Gen gen(42);
    DistributionField G(g.n_nodes());
    for (IncomeType j : kIncomeTypes)
        for (double& v : G[j]) v = gen.uniform(0.0, 1.0);
    const TypeVectors zero(g.n_nodes(), 0.0);
    const DistributionField next = forward_fpk_step(G, zero, g, p);
    const double lh = p.lambda1 * g.h();
    for (std::size_t i = 0; i < g.n_nodes(); ++i) {
        CHECK(next[IncomeType::Low][i] ==
              doctest::Approx((1 - lh) * G[IncomeType::Low][i] + lh * G[IncomeType::High][i]));
        CHECK(next[IncomeType::High][i] ==
              doctest::Approx((1 - lh) * G[IncomeType::High][i] + lh * G[IncomeType::Low][i]));
    }
}

TEST_CASE("forward steps conserve mass and relax type shares") {
    ModelParams p;
    p.lambda2 = 0.6;
    const Grid g = grid_for(p, 10.0, 201);
    testing::Gen gen(43);
    TypeVectors s(g.n_nodes());
    for (IncomeType j : kIncomeTypes)
        for (std::size_t i = 0; i < g.n_nodes(); ++i) {
            const ControlInterval ci = admissible_control_interval(i, j, g, p);
            s[j][i] = p.r * g.x(i) + p.y(j) - gen.uniform(ci.lo, std::min(ci.hi, 2.0));
        }
    DistributionField G(g.n_nodes());
    G[IncomeType::High][100] = 1.0 / g.dx();
    for (int step = 0; step < 2000; ++step) {
        const double before = mass(G[IncomeType::Low], g.dx()) + mass(G[IncomeType::High], g.dx());
        G = forward_fpk_step(G, s, g, p);
        const double after = mass(G[IncomeType::Low], g.dx()) + mass(G[IncomeType::High], g.dx());
        CHECK(std::abs(after - before) <= 1e-12);
        for (IncomeType j : kIncomeTypes)
            for (double v : G[j]) REQUIRE(v >= 0.0);
    }
    CHECK(mass(G[IncomeType::Low], g.dx()) == doctest::Approx(0.6).epsilon(1e-6));
}

TEST_CASE("projection of uniform densities and atoms") {
    ModelParams p;
    const Grid g = grid_for(p, 9.85, 101);
    const double width = g.x_max() - g.x_lo();
    const DistributionField U = project_initial_density(
        {[&](double) { return 0.5 / width; }, [&](double) { return 0.5 / width; }}, {0.0, 0.0}, g);
    for (IncomeType j : kIncomeTypes) {
        for (std::size_t i = 1; i + 1 < g.n_nodes(); ++i) CHECK(U[j][i] == doctest::Approx(U[j][1]).epsilon(1e-12));
        CHECK(U[j][0] == doctest::Approx(U[j][1]).epsilon(1e-12));
    }
    const Aggregates a = aggregates(U, g, p);
    CHECK(std::abs(a.total_mass - 1.0) <= 1e-10);

    const DistributionField A = project_initial_density({Density{}, Density{}}, {0.6, 0.4}, g);
    CHECK(A[IncomeType::Low][0] == doctest::Approx(0.6 / g.dx()));
    CHECK(A[IncomeType::High][0] == doctest::Approx(0.4 / g.dx()));
    for (std::size_t i = 1; i < g.n_nodes(); ++i) {
        CHECK(A[IncomeType::Low][i] == 0.0);
        CHECK(A[IncomeType::High][i] == 0.0);
    }

    CHECK_THROWS_AS(project_initial_density({Density{}, Density{}}, {0.6, 0.6}, g), ValidationError);
}

TEST_CASE("projection preserves mass and converges in the mean") {
    ModelParams p;
    // truncated exponential densities with an atom on type 1
    const double k = 0.8;
    auto mean_error = [&](std::size_t n) {
        const Grid g = grid_for(p, 9.85, n);
        const double L = g.x_max() - g.x_lo();
        const double z = (1 - std::exp(-k * L)) / k;
        auto dens = [=](double share) {
            return [=](double x) { return share * std::exp(-k * (x - g.x_lo())) / z; };
        };
        const DistributionField G = project_initial_density({dens(0.4), dens(0.5)}, {0.1, 0.0}, g);
        const Aggregates a = aggregates(G, g, p);
        CHECK(std::abs(a.total_mass - 1.0) <= 1e-9);
        CHECK(a.type_mass[0] == doctest::Approx(0.5).epsilon(1e-9));
        const double mean_offset = (1 / k - (L + 1 / k) * std::exp(-k * L)) / (1 - std::exp(-k * L));
        const double K = 0.9 * (g.x_lo() + mean_offset) + 0.1 * g.x_lo();
        return std::abs(a.K - K);
    };
    // the doubled boundary half-cell biases the mean by O(dx)
    const double coarse = mean_error(401), fine = mean_error(801);
    CHECK(coarse <= 0.5 * 10.0 / 400);
    CHECK(fine / coarse == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("aggregates") {
    ModelParams p;
    const Grid g = grid_for(p, 9.85, 101);
    DistributionField G(g.n_nodes());
    G[IncomeType::Low][0] = 0.7 / g.dx();
    G[IncomeType::High][0] = 0.3 / g.dx();
    Aggregates a = aggregates(G, g, p);
    CHECK(a.N == doctest::Approx(0.3));
    CHECK(a.K == doctest::Approx(-0.15));
    CHECK(a.boundary_mass[0] == doctest::Approx(0.7));

    DistributionField S(g.n_nodes());
    S[IncomeType::Low][40] = S[IncomeType::Low][60] = 0.25 / g.dx();
    S[IncomeType::High][30] = S[IncomeType::High][70] = 0.25 / g.dx();
    a = aggregates(S, g, p);
    CHECK(a.K == doctest::Approx(g.x(50)));
}

TEST_CASE("boundary mass structure at the optimal policy") {
    ModelParams p;
    const Grid g = grid_for(p, 20.0, 400);
    const DistributionField G = solve_invariant(howard_saving(p, g), g, p);
    const Aggregates a = aggregates(G, g, p);
    CHECK(a.boundary_mass[0] > 0.0);
    CHECK(a.boundary_mass[1] < a.boundary_mass[0]);
    // no concentration of high-income agents at the constraint
    CHECK(G[IncomeType::High][0] <= G[IncomeType::High][1]);
    CHECK(G[IncomeType::Low][0] > G[IncomeType::Low][1]);
}

TEST_CASE("cumulative mass and CDF distance") {
    ModelParams p;
    const Grid g = grid_for(p, 9.85, 101);
    DistributionField a(g.n_nodes()), b(g.n_nodes());
    a[IncomeType::Low][10] = 1.0 / g.dx();
    b[IncomeType::Low][20] = 1.0 / g.dx();
    const TypeVectors F = cumulative_mass(a, g);
    CHECK(F[IncomeType::Low][9] == 0.0);
    CHECK(F[IncomeType::Low][10] == doctest::Approx(1.0));
    CHECK(sup_cdf_distance(a, b, g) == doctest::Approx(1.0));
    CHECK(sup_cdf_distance(a, a, g) == 0.0);
}
