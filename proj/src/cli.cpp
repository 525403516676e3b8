#include "mfg/cli.hpp"

#include "mfg/config.hpp"
#include "mfg/export.hpp"
#include "mfg/simulate.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <vector>

namespace mfg {

namespace {

struct Flags {
    std::string config;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> method;
    std::size_t threads = 1;
};

RunConfig resolve(const Flags& f) {
    RunConfig c = load_config(f.config);
    if (f.out) c.out_dir = *f.out;
    if (f.seed) c.seed = *f.seed;
    if (f.method) c.method = parse_method(*f.method);
    return c;
}

void print_stationary(const char* label, const EquilibriumResult& res) {
    std::printf("%s: r = %s  K = %s  N = %s  outer iterations = %zu\n", label, format_number(res.r).c_str(),
                format_number(res.agg.K).c_str(), format_number(res.agg.N).c_str(), res.trace.size());
}

void report_written(const std::vector<std::filesystem::path>& files) {
    for (const auto& f : files) std::printf("wrote %s\n", f.string().c_str());
}

int run_validate(const RunConfig& c) {
    const Grid g = c.grid();
    std::printf("config ok: %zu nodes on [%s, %s], dx = %s, h = %s\n", g.n_nodes(), format_number(g.x_lo()).c_str(),
                format_number(g.x_max()).c_str(), format_number(g.dx()).c_str(), format_number(g.h()).c_str());
    return kExitOk;
}

int run_hjb(const RunConfig& c) {
    const Grid g = c.grid();
    EquilibriumResult res = solve_stationary_at_rate(c.params.r, c.params, g, c.howard_options());
    print_stationary("solve-hjb", res);
    report_written(export_stationary(res, g, c.params, c.out_dir));
    return kExitOk;
}

int run_aiyagari(const RunConfig& c) {
    const Grid g = c.grid();
    EquilibriumResult res = solve_stationary_aiyagari(c.params, g, c.aiyagari_options());
    print_stationary("solve-aiyagari", res);
    report_written(export_stationary(res, g, c.params, c.out_dir));
    return kExitOk;
}

int run_huggett(const RunConfig& c) {
    const Grid g = c.grid();
    EquilibriumResult res = solve_stationary_huggett(c.params, g, c.huggett_options());
    print_stationary("solve-huggett", res);
    report_written(export_stationary(res, g, c.params, c.out_dir));
    return kExitOk;
}

int run_transition(const RunConfig& c) {
    const Grid g = c.grid();
    const EquilibriumResult terminal = solve_stationary_aiyagari(c.params, g, c.aiyagari_options());
    print_stationary("terminal stationary state", terminal);

    DistributionField G0;
    if (c.transition_initial == InitialDistribution::Stationary) {
        ModelParams before = c.params;
        before.A = c.transition_A0;
        const EquilibriumResult initial = solve_stationary_aiyagari(before, g, c.aiyagari_options());
        print_stationary("initial stationary state", initial);
        G0 = initial.G;
    } else {
        const double width = g.x_max() - g.x_lo();
        const double m1 = c.params.type_mass(IncomeType::Low);
        const double m2 = c.params.type_mass(IncomeType::High);
        G0 = project_initial_density({[=](double) { return m1 / width; }, [=](double) { return m2 / width; }},
                                     {0.0, 0.0}, g);
    }

    const std::size_t steps = c.transition_steps();
    const std::vector<double> A_path(steps, c.params.A);
    const std::vector<double> start(steps, terminal.r);
    TransitionOptions options = c.transition_options();
    options.store_paths = false;
    const TransitionResult res = solve_transition(c.params, g, A_path, G0, terminal.V, options, start);
    std::printf("solve-transition: %zu steps, %zu sweeps, r(0) = %s, r(T) = %s\n", steps, res.sweep_trace.size(),
                format_number(res.r_path.front()).c_str(), format_number(res.r_path.back()).c_str());
    std::vector<std::filesystem::path> files = export_stationary(terminal, g, c.params, c.out_dir);
    files.push_back(export_transition(res, g, c.out_dir));
    report_written(files);
    return kExitOk;
}

int run_simulate(const RunConfig& c, std::size_t threads) {
    const Grid g = c.grid();
    const EquilibriumResult eq = solve_stationary_aiyagari(c.params, g, c.aiyagari_options());
    print_stationary("solve-aiyagari", eq);
    EmpiricalOptions opt;
    opt.n_agents = c.sim_agents;
    opt.n_steps = c.sim_steps;
    opt.burn_in = c.sim_burn_in;
    opt.threads = threads;
    const DistributionField E = empirical_distribution(eq.policy, eq.r, g, c.params, c.seed, opt);
    std::printf("simulate: %zu agents, %zu steps, sup-CDF distance to the invariant distribution = %s\n",
                c.sim_agents, c.sim_steps, format_number(sup_cdf_distance(E, eq.G, g)).c_str());
    std::vector<std::filesystem::path> files = export_stationary(eq, g, c.params, c.out_dir);
    files.push_back(export_distribution(E, g, std::filesystem::path(c.out_dir) / "empirical.csv"));
    report_written(files);
    return kExitOk;
}

void dump_trace(const ConvergenceError& e, const std::optional<std::string>& out_dir) {
    std::cerr << "error: " << e.what() << '\n' << e.trace();
    if (!out_dir) return;
    std::error_code ec;
    std::filesystem::create_directories(*out_dir, ec);
    std::ofstream f(std::filesystem::path(*out_dir) / "trace.csv", std::ios::binary);
    if (f) f << e.trace();
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"Mean field game solver for Aiyagari and Huggett economies"};
    app.require_subcommand(1);
    app.footer(config_reference());
    Flags flags;

    struct Command {
        const char* name;
        const char* help;
    };
    const std::vector<Command> commands{
        {"solve-hjb", "Howard policy iteration at the configured rate r, plus the invariant distribution"},
        {"solve-aiyagari", "stationary Aiyagari equilibrium"},
        {"solve-huggett", "stationary Huggett equilibrium by bisection on K(r) - B"},
        {"solve-transition", "transition after a productivity change from transition_A0 to A"},
        {"simulate", "Monte Carlo histogram of the equilibrium chain"},
        {"validate", "check the configuration and exit"},
    };
    std::vector<CLI::App*> subs;
    for (const Command& cmd : commands) {
        CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
        sub->add_option("--config", flags.config, "configuration file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", flags.out, "output directory (overrides out_dir)");
        sub->add_option("--seed", flags.seed, "random seed (overrides seed)");
        sub->add_option("--method", flags.method, "policy update method")->check(CLI::IsMember({"a", "b", "c"}));
        sub->add_option("--threads", flags.threads, "worker threads for simulation")
            ->envname("MFG_ABH_THREADS")
            ->check(CLI::PositiveNumber);
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInvalid;
    }

    std::optional<std::string> out_dir = flags.out;
    try {
        const RunConfig config = resolve(flags);
        out_dir = config.out_dir;
        const std::string name = app.get_subcommands().front()->get_name();
        if (name == "validate") return run_validate(config);
        if (name == "solve-hjb") return run_hjb(config);
        if (name == "solve-aiyagari") return run_aiyagari(config);
        if (name == "solve-huggett") return run_huggett(config);
        if (name == "solve-transition") return run_transition(config);
        return run_simulate(config, flags.threads);
    } catch (const ConvergenceError& e) {
        dump_trace(e, out_dir);
        return kExitNoConvergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    }
}

}  // namespace mfg
