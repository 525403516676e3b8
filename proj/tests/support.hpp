#pragma once

#include "mfg/grid.hpp"
#include "mfg/model.hpp"

#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace testing {

/// Seeded generator for property tests.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
    bool coin() { return index(2) == 1; }

    /// Random parameters satisfying every standing assumption.
    mfg::ModelParams params() {
        mfg::ModelParams p;
        p.rho = uniform(0.02, 0.1);
        p.r = uniform(-0.02, p.rho * 0.9);
        p.y1 = uniform(0.05, 0.3);
        p.y2 = p.y1 + uniform(0.05, 0.6);
        p.lambda1 = uniform(0.1, 0.8);
        p.lambda2 = uniform(0.1, 0.8);
        p.gamma = uniform(1.5, 5.0);
        p.x_lo = -uniform(0.0, 0.9) * p.y1 / p.rho * 0.5;
        return p;
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

inline std::vector<double> sample(const mfg::Grid& g, double (*f)(double)) {
    std::vector<double> v(g.n_nodes());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(g.x(i));
    return v;
}

struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const {
        for (std::size_t k = 0; k < header.size(); ++k) {
            if (header[k] == name) return k;
        }
        throw std::runtime_error("no column " + name);
    }
    double number(std::size_t row, const std::string& name) const { return std::stod(rows[row][column(name)]); }
};

inline std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline Csv read_csv(const std::string& path) {
    Csv csv;
    std::istringstream in(slurp(path));
    std::string line;
    std::getline(in, line);
    csv.header = split(line);
    while (std::getline(in, line)) csv.rows.push_back(split(line));
    return csv;
}

}  // namespace testing
