#pragma once

#include "mfg/model.hpp"

#include <array>
#include <vector>

namespace mfg {

/// One node vector per income type.
struct TypeVectors {
    std::array<std::vector<double>, 2> data;

    TypeVectors() = default;
    explicit TypeVectors(std::size_t n, double fill = 0.0) : data{std::vector<double>(n, fill), std::vector<double>(n, fill)} {}

    std::vector<double>& operator[](IncomeType j) { return data[index(j)]; }
    const std::vector<double>& operator[](IncomeType j) const { return data[index(j)]; }
    std::size_t size() const { return data[0].size(); }

    bool operator==(const TypeVectors&) const = default;
};

/// V[j][i] ≈ v_j(x_i).
using ValueField = TypeVectors;

/// Consumption and saving s = r x + y_j - c per node and type.
struct PolicyField {
    TypeVectors c;
    TypeVectors s;
};

/// Density weights G[j][i]; G[j][0]·dx also carries the atom at x_lo.
using DistributionField = TypeVectors;

/// max_{j,i} |a[j][i] - b[j][i]|
double sup_distance(const TypeVectors& a, const TypeVectors& b);
double sup_norm(const TypeVectors& a);

}  // namespace mfg
