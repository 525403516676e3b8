#pragma once

#include "mfg/equilibrium.hpp"
#include "mfg/grid.hpp"
#include "mfg/hjb.hpp"
#include "mfg/model.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mfg {

enum class InitialDistribution { Stationary, Uniform };

struct RunConfig {
    ModelParams params;

    double x_max = 0.0;
    std::size_t n_nodes = 0;
    std::optional<double> h;   // when unset, h = dx / dx_over_h
    double dx_over_h = 1.0;
    RatioBand band;

    PolicyMethod method = PolicyMethod::FirstOrder;
    std::size_t mesh_size = 10000;
    double howard_tol = 1e-5;
    std::size_t howard_max_iter = 500;

    double outer_tol = 1e-5;
    std::size_t outer_max_iter = 300;
    double relaxation = 0.5;

    std::optional<double> huggett_r_lo;
    std::optional<double> huggett_r_hi;
    double huggett_tol = 1e-5;
    std::size_t huggett_max_iter = 200;

    double transition_T = 400.0;
    double transition_A0 = 0.9;    // productivity behind the initial distribution
    InitialDistribution transition_initial = InitialDistribution::Stationary;
    double transition_tol = 1e-4;
    std::size_t transition_max_iter = 2000;
    double transition_relaxation = 0.2;

    std::size_t sim_agents = 100000;
    std::size_t sim_steps = 10000;
    std::size_t sim_burn_in = 0;   // 0 means sim_steps / 2
    std::uint64_t seed = 1;

    std::string out_dir = "out";

    Grid grid() const;
    HowardOptions howard_options() const;
    AiyagariOptions aiyagari_options() const;
    HuggettOptions huggett_options() const;
    TransitionOptions transition_options() const;
    std::size_t transition_steps() const;

    bool operator==(const RunConfig&) const = default;
};

/// Error raised for malformed configuration text.
class ConfigError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Keys that have no default.
const std::vector<std::string>& required_config_keys();

/// One line per key: name, default and meaning. Used by --help.
std::string config_reference();

/// Parses `key = value` lines; '#' starts a comment. Unknown keys, duplicate
/// keys and malformed values are reported with their line number. The result
/// is validated (parameters, grid band, step size).
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Every key with 17 significant digits, so parse_config(write) == config.
std::string write_config(const RunConfig& config);

/// Throws ValidationError when parameters, grid or step size are invalid.
void validate_config(const RunConfig& config);

}  // namespace mfg
