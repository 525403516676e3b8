#include "mfg/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace mfg {

namespace {

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_real(const std::string& s) {
    double v = 0.0;
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) throw std::invalid_argument("expected a finite number");
    return v;
}

std::uint64_t parse_unsigned(const std::string& s) {
    std::uint64_t v = 0;
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end) throw std::invalid_argument("expected a non-negative integer");
    return v;
}

struct Key {
    std::string name;
    std::string help;
    bool required = false;
    std::function<void(RunConfig&, const std::string&)> set;
    // Empty optional for unset optional values.
    std::function<std::optional<std::string>(const RunConfig&)> get;
};

template <class T>
Key real(std::string name, std::string help, T RunConfig::*member) {
    return {std::move(name), std::move(help), false,
            [member](RunConfig& c, const std::string& v) { c.*member = parse_real(v); },
            [member](const RunConfig& c) -> std::optional<std::string> { return format_real(c.*member); }};
}

Key param(std::string name, std::string help, double ModelParams::*member, bool required = false) {
    return {std::move(name), std::move(help), required,
            [member](RunConfig& c, const std::string& v) { c.params.*member = parse_real(v); },
            [member](const RunConfig& c) -> std::optional<std::string> { return format_real(c.params.*member); }};
}

template <class T>
Key count(std::string name, std::string help, T RunConfig::*member, bool required = false) {
    return {std::move(name), std::move(help), required,
            [member](RunConfig& c, const std::string& v) { c.*member = static_cast<T>(parse_unsigned(v)); },
            [member](const RunConfig& c) -> std::optional<std::string> { return std::to_string(c.*member); }};
}

Key optional_real(std::string name, std::string help, std::optional<double> RunConfig::*member) {
    return {std::move(name), std::move(help), false,
            [member](RunConfig& c, const std::string& v) { c.*member = parse_real(v); },
            [member](const RunConfig& c) -> std::optional<std::string> {
                if (!(c.*member)) return std::nullopt;
                return format_real(*(c.*member));
            }};
}

const std::vector<Key>& keys() {
    static const std::vector<Key> table = [] {
        std::vector<Key> k;
        k.push_back(param("rho", "discount rate (default 0.05)", &ModelParams::rho));
        k.push_back(param("r", "interest rate for solve-hjb, initial guess otherwise (default 0.03)", &ModelParams::r));
        k.push_back(param("y1", "low income", &ModelParams::y1, true));
        k.push_back(param("y2", "high income", &ModelParams::y2, true));
        k.push_back(param("lambda1", "switching intensity out of the low state", &ModelParams::lambda1, true));
        k.push_back(param("lambda2", "switching intensity out of the high state", &ModelParams::lambda2, true));
        k.push_back(param("gamma", "relative risk aversion, > 1", &ModelParams::gamma, true));
        k.push_back(param("x_lo", "borrowing limit, <= 0", &ModelParams::x_lo, true));
        k.push_back(param("alpha", "capital share (default 0.35)", &ModelParams::alpha));
        k.push_back(param("delta", "depreciation (default 0.1)", &ModelParams::delta));
        k.push_back(param("A", "productivity (default 1.0)", &ModelParams::A));
        k.push_back(param("B", "credit supply for solve-huggett (default 0)", &ModelParams::B));
        k.push_back(real("x_max", "right end of the wealth grid", &RunConfig::x_max));
        k.back().required = true;
        k.push_back(count("n_nodes", "number of grid nodes", &RunConfig::n_nodes, true));
        k.push_back(optional_real("h", "time step; overrides dx_over_h when set", &RunConfig::h));
        k.push_back({"dx_over_h", "dx/h used when h is not given (default 1)", false,
                     [](RunConfig& c, const std::string& v) { c.dx_over_h = parse_real(v); },
                     [](const RunConfig& c) -> std::optional<std::string> { return format_real(c.dx_over_h); }});
        k.push_back({"ratio_min", "lower end of the allowed dx/h band (default 0.1)", false,
                     [](RunConfig& c, const std::string& v) { c.band.lo = parse_real(v); },
                     [](const RunConfig& c) -> std::optional<std::string> { return format_real(c.band.lo); }});
        k.push_back({"ratio_max", "upper end of the allowed dx/h band (default 10)", false,
                     [](RunConfig& c, const std::string& v) { c.band.hi = parse_real(v); },
                     [](const RunConfig& c) -> std::optional<std::string> { return format_real(c.band.hi); }});
        k.push_back({"method", "policy update: a exact, b mesh, c first order (default c)", false,
                     [](RunConfig& c, const std::string& v) { c.method = parse_method(v); },
                     [](const RunConfig& c) -> std::optional<std::string> {
                         return std::string(1, method_letter(c.method));
                     }});
        k.push_back(count("mesh_size", "control mesh points for method b (default 10000)", &RunConfig::mesh_size));
        k.push_back(real("howard_tol", "policy iteration tolerance (default 1e-5)", &RunConfig::howard_tol));
        k.push_back(count("howard_max_iter", "policy iteration cap (default 500)", &RunConfig::howard_max_iter));
        k.push_back(real("outer_tol", "Aiyagari rate tolerance (default 1e-5)", &RunConfig::outer_tol));
        k.push_back(count("outer_max_iter", "Aiyagari iteration cap (default 300)", &RunConfig::outer_max_iter));
        k.push_back(real("relaxation", "initial Aiyagari relaxation (default 0.5)", &RunConfig::relaxation));
        k.push_back(optional_real("huggett_r_lo", "bisection lower rate (default -delta + 1e-3)", &RunConfig::huggett_r_lo));
        k.push_back(optional_real("huggett_r_hi", "bisection upper rate (default rho - 1e-3)", &RunConfig::huggett_r_hi));
        k.push_back(real("huggett_tol", "tolerance on |K - B| (default 1e-5)", &RunConfig::huggett_tol));
        k.push_back(count("huggett_max_iter", "bisection cap (default 200)", &RunConfig::huggett_max_iter));
        k.push_back(real("transition_T", "transition horizon (default 400)", &RunConfig::transition_T));
        k.push_back(real("transition_A0", "productivity of the initial stationary state (default 0.9)",
                         &RunConfig::transition_A0));
        k.push_back({"transition_initial", "initial distribution: stationary or uniform (default stationary)", false,
                     [](RunConfig& c, const std::string& v) {
                         if (v == "stationary") c.transition_initial = InitialDistribution::Stationary;
                         else if (v == "uniform") c.transition_initial = InitialDistribution::Uniform;
                         else throw std::invalid_argument("expected stationary or uniform");
                     },
                     [](const RunConfig& c) -> std::optional<std::string> {
                         return c.transition_initial == InitialDistribution::Stationary ? "stationary" : "uniform";
                     }});
        k.push_back(real("transition_tol", "max rate change per sweep (default 1e-4)", &RunConfig::transition_tol));
        k.push_back(count("transition_max_iter", "sweep cap (default 2000)", &RunConfig::transition_max_iter));
        k.push_back(real("transition_relaxation", "rate path relaxation (default 0.2)",
                         &RunConfig::transition_relaxation));
        k.push_back(count("sim_agents", "simulated agents (default 100000)", &RunConfig::sim_agents));
        k.push_back(count("sim_steps", "simulated steps per agent (default 10000)", &RunConfig::sim_steps));
        k.push_back(count("sim_burn_in", "discarded steps, 0 for half (default 0)", &RunConfig::sim_burn_in));
        k.push_back(count("seed", "random seed (default 1)", &RunConfig::seed));
        k.push_back({"out_dir", "output directory (default out)", false,
                     [](RunConfig& c, const std::string& v) { c.out_dir = v; },
                     [](const RunConfig& c) -> std::optional<std::string> { return c.out_dir; }});
        return k;
    }();
    return table;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

Grid RunConfig::grid() const {
    if (n_nodes < 2) throw ValidationError("n_nodes must be at least 2");
    if (!(x_max > params.x_lo)) throw ValidationError("x_max must exceed x_lo");
    const double dx = (x_max - params.x_lo) / static_cast<double>(n_nodes - 1);
    if (!h && !(dx_over_h > 0.0)) throw ValidationError("dx_over_h must be positive");
    return Grid(params.x_lo, x_max, n_nodes, h ? *h : dx / dx_over_h, band);
}

HowardOptions RunConfig::howard_options() const {
    HowardOptions o;
    o.tol = howard_tol;
    o.max_iter = howard_max_iter;
    o.policy.method = method;
    o.policy.mesh_size = mesh_size;
    return o;
}

AiyagariOptions RunConfig::aiyagari_options() const {
    AiyagariOptions o;
    o.tol = outer_tol;
    o.max_iter = outer_max_iter;
    o.relaxation = relaxation;
    o.howard = howard_options();
    return o;
}

HuggettOptions RunConfig::huggett_options() const {
    HuggettOptions o;
    o.r_lo = huggett_r_lo;
    o.r_hi = huggett_r_hi;
    o.tol = huggett_tol;
    o.max_iter = huggett_max_iter;
    o.howard = howard_options();
    return o;
}

TransitionOptions RunConfig::transition_options() const {
    TransitionOptions o;
    o.tol = transition_tol;
    o.max_iter = transition_max_iter;
    o.relaxation = transition_relaxation;
    o.policy.method = method;
    o.policy.mesh_size = mesh_size;
    return o;
}

std::size_t RunConfig::transition_steps() const {
    return static_cast<std::size_t>(std::llround(transition_T / grid().h()));
}

const std::vector<std::string>& required_config_keys() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const Key& k : keys()) {
            if (k.required) out.push_back(k.name);
        }
        return out;
    }();
    return names;
}

std::string config_reference() {
    std::ostringstream out;
    out << "Configuration keys (key = value, '#' comments):\n";
    for (const Key& k : keys()) {
        out << "  " << k.name << (k.required ? " (required)" : "") << ": " << k.help << '\n';
    }
    return out.str();
}

void validate_config(const RunConfig& config) {
    validate_params(config.params);
    const Grid grid = config.grid();
    check_step_size(grid, config.params);
    if (!(config.relaxation > 0.0 && config.relaxation <= 1.0)) throw ValidationError("relaxation must lie in (0, 1]");
    if (!(config.transition_relaxation > 0.0 && config.transition_relaxation <= 1.0)) {
        throw ValidationError("transition_relaxation must lie in (0, 1]");
    }
    if (!(config.transition_T > 0.0)) throw ValidationError("transition_T must be positive");
    if (!(config.transition_A0 > 0.0)) throw ValidationError("transition_A0 must be positive");
    if (config.mesh_size < 2) throw ValidationError("mesh_size must be at least 2");
}

RunConfig parse_config(const std::string& text) {
    std::map<std::string, const Key*> by_name;
    for (const Key& k : keys()) by_name[k.name] = &k;
    std::map<std::string, std::size_t> seen;
    RunConfig config;

    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string where = "line " + std::to_string(line_no) + ": ";
        if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = by_name.find(key);
        if (it == by_name.end()) throw ConfigError(where + "unknown key '" + key + "'");
        if (const auto prev = seen.find(key); prev != seen.end()) {
            throw ConfigError(where + "duplicate key '" + key + "' (first set on line " +
                              std::to_string(prev->second) + ")");
        }
        if (value.empty()) throw ConfigError(where + "missing value for '" + key + "'");
        try {
            it->second->set(config, value);
        } catch (const std::exception& e) {
            throw ConfigError(where + "bad value for '" + key + "': " + e.what());
        }
        seen[key] = line_no;
    }

    std::string missing;
    for (const std::string& name : required_config_keys()) {
        if (!seen.count(name)) missing += (missing.empty() ? "" : ", ") + name;
    }
    if (!missing.empty()) throw ConfigError("missing required keys: " + missing);
    validate_config(config);
    return config;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string write_config(const RunConfig& config) {
    std::ostringstream out;
    for (const Key& k : keys()) {
        if (auto v = k.get(config)) out << k.name << " = " << *v << '\n';
    }
    return out.str();
}

}  // namespace mfg
