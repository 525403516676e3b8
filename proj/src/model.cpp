#include "mfg/model.hpp"

#include "mfg/grid.hpp"

#include <algorithm>
#include <cmath>

namespace mfg {

namespace {

void require(bool ok, const char* violated) {
    if (!ok) throw ValidationError(std::string("parameter check failed: ") + violated);
}

}  // namespace

const ModelParams& validate_params(const ModelParams& p) {
    require(std::isfinite(p.rho) && p.rho > 0.0, "rho <= 0");
    require(std::isfinite(p.r) && p.r < p.rho, "rho <= r");
    require(p.y1 > 0.0, "y1 <= 0");
    require(p.y1 < p.y2, "y2 <= y1");
    require(p.lambda1 >= 0.0, "lambda1 < 0");
    require(p.lambda2 >= 0.0, "lambda2 < 0");
    require(p.lambda1 + p.lambda2 > 0.0, "lambda1 + lambda2 <= 0");
    require(p.gamma > 1.0, "gamma <= 1");
    require(p.x_lo <= 0.0, "x_lo > 0");
    require(p.rho * p.x_lo + p.y1 > 0.0, "rho * x_lo + y1 <= 0");
    require(p.rho * p.x_lo + p.y2 > 0.0, "rho * x_lo + y2 <= 0");
    require(p.B >= 0.0, "B < 0");
    require(p.B > p.x_lo, "B <= x_lo");
    require(p.alpha > 0.0 && p.alpha < 1.0, "alpha not in (0, 1)");
    require(p.delta >= 0.0, "delta < 0");
    require(p.A > 0.0, "A <= 0");
    return p;
}

double utility(double c, double gamma) {
    if (!(c >= 0.0)) throw ValidationError("utility: negative consumption");
    if (c == 0.0) return -kInf;
    return std::pow(c, 1.0 - gamma) / (1.0 - gamma);
}

double marginal_utility(double c, double gamma) {
    if (c <= 0.0) return kInf;
    return std::pow(c, -gamma);
}

double hamiltonian(double x, double y, double p, const ModelParams& params) {
    if (p < 0.0) return kInf;
    const double g = params.gamma;
    return (params.r * x + y) * p + g / (1.0 - g) * std::pow(p, 1.0 - 1.0 / g);
}

HamiltonianMin hamiltonian_min(double x, double y, const ModelParams& params) {
    const double income = params.r * x + y;
    if (!(income > 0.0)) throw ValidationError("hamiltonian_min: r x + y <= 0");
    const double g = params.gamma;
    return {std::pow(income, 1.0 - g) / (1.0 - g), std::pow(income, -g)};
}

BarrierBounds barrier_bounds(const ModelParams& params) {
    const double income = params.r * params.x_lo + params.y1;
    return {utility(income, params.gamma) / params.rho, 0.0};
}

double natural_subsolution(double x, IncomeType j, const ModelParams& params) {
    if (!(params.r > 0.0)) throw ValidationError("natural barriers need r > 0");
    return utility(params.r * x + params.y(j), params.gamma) / params.rho;
}

double natural_supersolution(double x, IncomeType j, const ModelParams& params) {
    if (!(params.r > 0.0)) throw ValidationError("natural barriers need r > 0");
    const double g = params.gamma;
    const double slope = (params.rho - params.r) / g + params.r;
    return std::pow(slope, -g) * std::pow(x + params.y(j) / params.r, 1.0 - g) / (1.0 - g);
}

ControlInterval admissible_control_interval(std::size_t i, IncomeType j, const Grid& grid,
                                            const ModelParams& params) {
    if (i >= grid.n_nodes()) throw ValidationError("admissible_control_interval: node out of range");
    const double x = grid.x(i);
    const double income = params.r * x + params.y(j);
    const double hi = (x - grid.x_lo()) / grid.h() + income;
    const double lo = i == grid.last() ? std::max(0.0, income) : 0.0;
    if (hi < lo) throw ValidationError("admissible_control_interval: empty control set");
    return {lo, hi};
}

}  // namespace mfg
