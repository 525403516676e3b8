#include "mfg/export.hpp"

#include "mfg/hjb.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace mfg {

namespace {

class CsvWriter {
public:
    explicit CsvWriter(const std::filesystem::path& file) : path_(file), out_(file, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot write " + file.string());
    }

    void header(const std::string& text) { out_ << text << '\n'; }

    template <class... T>
    void row(const T&... cells) {
        bool first = true;
        ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
        out_ << '\n';
    }

    std::filesystem::path close() {
        out_.close();
        if (!out_) throw std::runtime_error("failed writing " + path_.string());
        return path_;
    }

private:
    static std::string cell(double v) { return format_number(v); }
    static std::string cell(const std::string& s) { return s; }

    std::filesystem::path path_;
    std::ofstream out_;
};

void ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) throw std::runtime_error("cannot create output directory " + dir.string());
}

}  // namespace

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::filesystem::path> export_stationary(const EquilibriumResult& result, const Grid& grid,
                                                     const ModelParams& params,
                                                     const std::filesystem::path& out_dir) {
    ensure_dir(out_dir);
    const std::size_t n = grid.n_nodes();
    const auto& V = result.V;
    const auto& c = result.policy.c;
    const auto& s = result.policy.s;
    const auto& G = result.G;
    constexpr IncomeType L = IncomeType::Low;
    constexpr IncomeType H = IncomeType::High;
    std::vector<std::filesystem::path> written;

    CsvWriter value(out_dir / "value.csv");
    value.header("x,V1,V2");
    for (std::size_t i = 0; i < n; ++i) value.row(grid.x(i), V[L][i], V[H][i]);
    written.push_back(value.close());

    CsvWriter policy(out_dir / "policy.csv");
    policy.header("x,c1,c2,s1,s2");
    for (std::size_t i = 0; i < n; ++i) policy.row(grid.x(i), c[L][i], c[H][i], s[L][i], s[H][i]);
    written.push_back(policy.close());

    CsvWriter dist(out_dir / "distribution.csv");
    dist.header("x,G1,G2,boundary_mass_1,boundary_mass_2");
    for (std::size_t i = 0; i < n; ++i) {
        if (i == 0) {
            dist.row(grid.x(i), G[L][i], G[H][i], result.agg.boundary_mass[0], result.agg.boundary_mass[1]);
        } else {
            dist.row(grid.x(i), G[L][i], G[H][i], std::string(), std::string());
        }
    }
    written.push_back(dist.close());

    CsvWriter eq(out_dir / "equilibrium.csv");
    eq.header("r,K,N,mass_1,mass_2");
    eq.row(result.r, result.agg.K, result.agg.N, result.agg.type_mass[0], result.agg.type_mass[1]);
    written.push_back(eq.close());

    const std::vector<double> dc1 = fd_gradient(c[L], grid);
    const std::vector<double> dc2 = fd_gradient(c[H], grid);
    const double asymptote = result.r + (params.rho - result.r) / params.gamma;
    CsvWriter mpc(out_dir / "mpc.csv");
    mpc.header("x,dc1_dx,dc2_dx,asymptote");
    for (std::size_t i = 0; i < n; ++i) mpc.row(grid.x(i), dc1[i], dc2[i], asymptote);
    written.push_back(mpc.close());
    return written;
}

std::filesystem::path export_transition(const TransitionResult& result, const Grid& grid,
                                        const std::filesystem::path& out_dir) {
    ensure_dir(out_dir);
    CsvWriter out(out_dir / "r_path.csv");
    out.header("t,r,K");
    for (std::size_t k = 0; k < result.r_path.size(); ++k) {
        out.row(static_cast<double>(k) * grid.h(), result.r_path[k], result.K_path[k]);
    }
    return out.close();
}

std::filesystem::path export_distribution(const DistributionField& G, const Grid& grid,
                                          const std::filesystem::path& file) {
    if (file.has_parent_path()) ensure_dir(file.parent_path());
    CsvWriter out(file);
    out.header("x,G1,G2");
    for (std::size_t i = 0; i < grid.n_nodes(); ++i) out.row(grid.x(i), G[IncomeType::Low][i], G[IncomeType::High][i]);
    return out.close();
}

}  // namespace mfg
