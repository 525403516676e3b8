#pragma once

#include "mfg/fields.hpp"
#include "mfg/grid.hpp"
#include "mfg/model.hpp"

#include <span>
#include <string>
#include <vector>

namespace mfg {

/// Lower cutoff for consumption searches; u(0) = -inf for γ > 1.
inline constexpr double kConsumptionFloor = 1e-12;

/// How the inner argmax of the discrete HJB is computed.
enum class PolicyMethod {
    Exact,       // (a) bounded maximization of the discrete objective
    Mesh,        // (b) argmax over a discretized control mesh
    FirstOrder,  // (c) c = Dv^{-1/γ} from the finite-difference gradient, clipped
};

char method_letter(PolicyMethod m);
PolicyMethod parse_method(const std::string& letter);

struct PolicyOptions {
    PolicyMethod method = PolicyMethod::FirstOrder;
    std::size_t mesh_size = 10000;
    // Mesh levels: each level re-meshes ±1 cell around the previous argmax.
    std::size_t mesh_levels = 2;
};

/// Rejects h with ρh ≥ 1 or λ_j h ≥ 1.
void check_step_size(const Grid& grid, const ModelParams& params);

/// Forward difference at 0, central (V_{i+1} - V_{i-1})/(2dx) inside, backward at the end.
std::vector<double> fd_gradient(std::span<const double> v, const Grid& grid);

/// Fills s = r x + y_j - c for the given consumption.
PolicyField make_policy(TypeVectors consumption, const Grid& grid, double r, const ModelParams& params);

/// Clips consumption into the admissible set at rate r and recomputes s; used
/// to warm-start a solve at a new rate from a previous policy.
PolicyField clip_to_admissible(const TypeVectors& consumption, const Grid& grid, double r,
                               const ModelParams& params);

/// Starting guess: consume interest plus income, floored at half the
/// constrained low-income consumption and clipped to the admissible set.
PolicyField default_initial_policy(const Grid& grid, double r, const ModelParams& params);

PolicyField policy_update(const ValueField& V, const Grid& grid, double r, const ModelParams& params,
                          const PolicyOptions& options = {});

/// Mesh spacing used by the last level of method (b) at node i.
double mesh_width(std::size_t i, IncomeType j, const Grid& grid, double r, const ModelParams& params,
                  const PolicyOptions& options);

/// Solves the 2N linear system V = h u(c) + (1-ρh)[λ_j h V_other + (1-λ_j h) M(s_j) V_j].
/// `start`, when given, is used as the initial iterate of the refinement loop.
ValueField policy_evaluation(const PolicyField& policy, double r, const Grid& grid,
                             const ModelParams& params, const ValueField* start = nullptr);

/// max |V - T_c V| for the fixed-policy update T_c.
double policy_evaluation_residual(const ValueField& V, const PolicyField& policy, double r,
                                  const Grid& grid, const ModelParams& params);

struct HowardOptions {
    double tol = 1e-5;
    std::size_t max_iter = 500;
    PolicyOptions policy;
    bool record_values = false;
};

struct HowardResult {
    ValueField V;
    PolicyField policy;
    std::vector<double> trace;          // sup-norm policy change per iteration
    std::vector<ValueField> history;    // V per iteration when record_values is set
};

/// Without `c_init`, the first-order method starts from the converged exact policy.
HowardResult howard_solve(double r, const Grid& grid, const ModelParams& params,
                          const HowardOptions& options = {}, const PolicyField* c_init = nullptr);

/// Scheme operator F_j(x_i, (V_ij, V_i,other), V_j) per node; the inner sup
/// uses `method` (exact by default).
TypeVectors scheme_operator(const ValueField& V, double r, const Grid& grid, const ModelParams& params,
                            const PolicyOptions& options = {PolicyMethod::Exact});

double scheme_residual(const ValueField& V, double r, const Grid& grid, const ModelParams& params,
                       const PolicyOptions& options = {PolicyMethod::Exact});

struct BackwardPassResult {
    std::vector<ValueField> values;     // V^0 .. V^{N_t}
    std::vector<PolicyField> policies;  // policy applied at steps 0 .. N_t - 1
};

/// Explicit backward induction V^n = sup{h u + (1-ρh)[λ h V^{n+1}_other + (1-λh) M V^{n+1}_j]}
/// with the policy computed from V^{n+1} at rate r_path[n].
BackwardPassResult backward_hjb_pass(const ValueField& terminal, std::span<const double> r_path,
                                     const Grid& grid, const ModelParams& params,
                                     const PolicyOptions& options = {});

}  // namespace mfg
