#include "mfg/fpk.hpp"

#include <Eigen/SparseLU>
#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/strong_components.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace mfg {

namespace {

double integrate(const Density& f, double a, double b) {
    if (!(b > a)) return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-10);
}

// Number of closed communicating classes of the node chain.
std::size_t closed_classes(const std::array<TransitionMatrix, 2>& M, const Grid& grid, const ModelParams& params) {
    const std::size_t n = grid.n_nodes();
    using Graph = boost::adjacency_list<boost::vecS, boost::vecS, boost::directedS>;
    Graph graph(2 * n);
    for (IncomeType j : kIncomeTypes) {
        const std::size_t off = index(j) * n;
        const double lam = params.lambda(j) * grid.h();
        for (std::size_t i = 0; i < n; ++i) {
            const BasisWeights& w = M[index(j)].row(i);
            if (lam > 0.0) boost::add_edge(off + i, index(complement(j)) * n + i, graph);
            if (lam < 1.0 && w.left > 0.0) boost::add_edge(off + i, off + w.k, graph);
            if (lam < 1.0 && w.right > 0.0) boost::add_edge(off + i, off + w.k + 1, graph);
        }
    }
    std::vector<int> component(2 * n);
    const int count = boost::strong_components(graph, component.data());
    std::vector<bool> leaks(static_cast<std::size_t>(count), false);
    for (auto [e, end] = boost::edges(graph); e != end; ++e) {
        const int a = component[boost::source(*e, graph)];
        const int b = component[boost::target(*e, graph)];
        if (a != b) leaks[static_cast<std::size_t>(a)] = true;
    }
    return static_cast<std::size_t>(std::count(leaks.begin(), leaks.end(), false));
}

}  // namespace

DistributionField solve_invariant(const TypeVectors& saving, const Grid& grid, const ModelParams& params) {
    const std::size_t n = grid.n_nodes();
    const double h = grid.h();
    const double dx = grid.dx();
    const auto last_row = static_cast<int>(2 * n - 1);
    const std::array<TransitionMatrix, 2> matrices{TransitionMatrix(grid, saving[IncomeType::Low]),
                                                   TransitionMatrix(grid, saving[IncomeType::High])};
    if (closed_classes(matrices, grid, params) != 1) {
        throw ValidationError("solve_invariant: invariant distribution is not unique (degenerate policy or grid)");
    }
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(10 * n);
    for (IncomeType j : kIncomeTypes) {
        const std::size_t off = index(j) * n;
        const std::size_t other = index(complement(j)) * n;
        const TransitionMatrix& M = matrices[index(j)];
        std::vector<Eigen::Triplet<double>> block;
        M.append_triplets(block, 1.0 - params.lambda(j) * h, off, off, true);
        for (std::size_t i = 0; i < n; ++i) {
            block.emplace_back(static_cast<int>(off + i), static_cast<int>(off + i), -1.0);
            // Inflow into type `j` from the other type.
            block.emplace_back(static_cast<int>(off + i), static_cast<int>(other + i),
                               params.lambda(complement(j)) * h);
        }
        for (const auto& t : block)
            if (t.row() != last_row && t.value() != 0.0) triplets.push_back(t);
    }
    for (std::size_t k = 0; k < 2 * n; ++k) triplets.emplace_back(last_row, static_cast<int>(k), dx);
    Eigen::SparseMatrix<double> A(static_cast<Eigen::Index>(2 * n), static_cast<Eigen::Index>(2 * n));
    A.setFromTriplets(triplets.begin(), triplets.end());
    A.makeCompressed();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(2 * n));
    rhs[last_row] = 1.0;

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success) {
        throw ValidationError("solve_invariant: invariant distribution is not unique (degenerate policy or grid)");
    }
    Eigen::VectorXd x = lu.solve(rhs);
    x += lu.solve(Eigen::VectorXd(rhs - A * x));
    if (!x.allFinite() || (A * x - rhs).cwiseAbs().maxCoeff() > 1e-8 * (1.0 + x.cwiseAbs().maxCoeff())) {
        throw ValidationError("solve_invariant: invariant distribution is not unique (degenerate policy or grid)");
    }

    const double largest = std::max(1.0, x.cwiseAbs().maxCoeff());
    DistributionField G(n);
    for (IncomeType j : kIncomeTypes) {
        for (std::size_t i = 0; i < n; ++i) {
            double g = x[static_cast<Eigen::Index>(index(j) * n + i)];
            if (g < 0.0) {
                if (g < -1e-12 * largest) {
                    throw ValidationError("solve_invariant: negative weight " + std::to_string(g) + " at node " +
                                          std::to_string(i));
                }
                g = 0.0;
            }
            G[j][i] = g;
        }
    }
    double total = 0.0;
    for (IncomeType j : kIncomeTypes)
        for (double g : G[j]) total += g * dx;
    for (IncomeType j : kIncomeTypes)
        for (double& g : G[j]) g /= total;
    return G;
}

DistributionField forward_fpk_step(const DistributionField& G, const std::array<TransitionMatrix, 2>& M,
                                   const Grid& grid, const ModelParams& params) {
    const double h = grid.h();
    DistributionField next(grid.n_nodes());
    for (IncomeType j : kIncomeTypes) {
        const IncomeType o = complement(j);
        const std::vector<double> moved = M[index(j)].apply_transpose(G[j]);
        const double stay = 1.0 - params.lambda(j) * h;
        const double inflow = params.lambda(o) * h;
        for (std::size_t i = 0; i < grid.n_nodes(); ++i) next[j][i] = stay * moved[i] + inflow * G[o][i];
    }
    return next;
}

DistributionField forward_fpk_step(const DistributionField& G, const TypeVectors& saving, const Grid& grid,
                                   const ModelParams& params) {
    const std::array<TransitionMatrix, 2> M{TransitionMatrix(grid, saving[IncomeType::Low]),
                                            TransitionMatrix(grid, saving[IncomeType::High])};
    return forward_fpk_step(G, M, grid, params);
}

DistributionField project_initial_density(const std::array<Density, 2>& g, std::array<double, 2> atoms,
                                          const Grid& grid) {
    const std::size_t n = grid.n_nodes();
    const double dx = grid.dx();
    std::array<double, 2> mass{};
    for (IncomeType j : kIncomeTypes) {
        if (atoms[index(j)] < 0.0) throw ValidationError("project_initial_density: negative atom");
        mass[index(j)] = g[index(j)] ? integrate(g[index(j)], grid.x_lo(), grid.x_max()) : 0.0;
    }
    const double total = mass[0] + mass[1] + atoms[0] + atoms[1];
    if (std::abs(total - 1.0) > 1e-6) {
        throw ValidationError("project_initial_density: initial distribution has mass " + std::to_string(total) +
                              ", expected 1");
    }
    DistributionField G(n);
    for (IncomeType j : kIncomeTypes) {
        const auto& gj = g[index(j)];
        if (gj && mass[index(j)] > 0.0) {
            G[j][0] = 2.0 / dx * integrate(gj, grid.x_lo(), grid.x_lo() + 0.5 * dx);
            for (std::size_t i = 1; i < n; ++i) {
                const double a = grid.x(i) - 0.5 * dx;
                const double b = std::min(grid.x(i) + 0.5 * dx, grid.x_max());
                G[j][i] = integrate(gj, a, b) / dx;
            }
            double projected = 0.0;
            for (double v : G[j]) projected += v * dx;
            const double scale = mass[index(j)] / projected;
            for (double& v : G[j]) v *= scale;
        }
        G[j][0] += atoms[index(j)] / dx;
    }
    return G;
}

Aggregates aggregates(const DistributionField& G, const Grid& grid, const ModelParams& params) {
    Aggregates out;
    const double dx = grid.dx();
    for (IncomeType j : kIncomeTypes) {
        double m = 0.0;
        for (std::size_t i = 0; i < grid.n_nodes(); ++i) {
            m += G[j][i] * dx;
            out.K += grid.x(i) * G[j][i] * dx;
        }
        out.type_mass[index(j)] = m;
        out.boundary_mass[index(j)] = G[j][0] * dx;
        out.total_mass += m;
    }
    out.N = params.labor();
    return out;
}

TypeVectors cumulative_mass(const DistributionField& G, const Grid& grid) {
    TypeVectors F(grid.n_nodes());
    for (IncomeType j : kIncomeTypes) {
        double acc = 0.0;
        for (std::size_t i = 0; i < grid.n_nodes(); ++i) {
            acc += G[j][i] * grid.dx();
            F[j][i] = acc;
        }
    }
    return F;
}

double sup_cdf_distance(const DistributionField& a, const DistributionField& b, const Grid& grid) {
    return sup_distance(cumulative_mass(a, grid), cumulative_mass(b, grid));
}

}  // namespace mfg
