#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace mfg {

/// Thrown when parameters or inputs violate a model precondition.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown when an iterative solver hits its iteration cap.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, std::string trace)
        : std::runtime_error(what), trace_(std::move(trace)) {}
    const std::string& trace() const { return trace_; }

private:
    std::string trace_;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Low (j = 1) and high (j = 2) income states. Arrays are indexed by `index()`.
enum class IncomeType : std::size_t { Low = 0, High = 1 };

inline constexpr std::array<IncomeType, 2> kIncomeTypes{IncomeType::Low, IncomeType::High};

constexpr std::size_t index(IncomeType j) { return static_cast<std::size_t>(j); }
constexpr IncomeType complement(IncomeType j) {
    return j == IncomeType::Low ? IncomeType::High : IncomeType::Low;
}

struct ModelParams {
    double rho = 0.05;     // discount rate
    double r = 0.03;       // interest rate (initial guess in equilibrium loops)
    double y1 = 0.1;
    double y2 = 0.5;
    double lambda1 = 0.4;  // switching intensity out of the low state
    double lambda2 = 0.4;  // switching intensity out of the high state
    double gamma = 2.0;    // relative risk aversion
    double x_lo = -0.15;   // borrowing limit
    double alpha = 0.35;   // capital share
    double delta = 0.1;    // depreciation
    double A = 1.0;        // total factor productivity
    double B = 0.0;        // credit supply (Huggett)

    double y(IncomeType j) const { return j == IncomeType::Low ? y1 : y2; }
    double lambda(IncomeType j) const { return j == IncomeType::Low ? lambda1 : lambda2; }

    /// Aggregate labor supply (y1 λ2 + y2 λ1)/(λ1 + λ2).
    double labor() const { return (y1 * lambda2 + y2 * lambda1) / (lambda1 + lambda2); }

    /// Stationary share of agents in state j, λ_{other}/(λ1 + λ2).
    double type_mass(IncomeType j) const {
        return lambda(complement(j)) / (lambda1 + lambda2);
    }

    bool operator==(const ModelParams&) const = default;
};

/// Returns `p` when every standing assumption holds; otherwise throws
/// ValidationError naming the first violated inequality.
const ModelParams& validate_params(const ModelParams& p);

/// CRRA utility c^{1-γ}/(1-γ). Returns -inf at c = 0 for γ > 1.
double utility(double c, double gamma);

/// Marginal utility c^{-γ}.
double marginal_utility(double c, double gamma);

/// H(x, y, p) = sup_{c ≥ 0} {u(c) + (r x + y - c) p}; +inf for p < 0.
double hamiltonian(double x, double y, double p, const ModelParams& params);

struct HamiltonianMin {
    double value;
    double argmin;
};

/// Closed-form minimum of p ↦ H(x, y, p). Requires r x + y > 0.
HamiltonianMin hamiltonian_min(double x, double y, const ModelParams& params);

struct BarrierBounds {
    double lower;
    double upper;
};

/// Constant sub/supersolution pair bracketing every discrete value field.
BarrierBounds barrier_bounds(const ModelParams& params);

/// Natural-borrowing-limit barriers, defined only for r > 0.
double natural_subsolution(double x, IncomeType j, const ModelParams& params);
double natural_supersolution(double x, IncomeType j, const ModelParams& params);

class Grid;

struct ControlInterval {
    double lo;
    double hi;
};

/// Admissible consumption at node i: [0, (x_i - x_lo)/h + r x_i + y_j]. At the
/// last node the lower end is raised to max(0, r x_max + y_j) so the drift
/// cannot point out of the grid. Uses params.r.
ControlInterval admissible_control_interval(std::size_t i, IncomeType j, const Grid& grid,
                                            const ModelParams& params);

}  // namespace mfg
