#include "mfg/fields.hpp"

#include <algorithm>
#include <cmath>

namespace mfg {

double sup_distance(const TypeVectors& a, const TypeVectors& b) {
    double d = 0.0;
    for (IncomeType j : kIncomeTypes)
        for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[j][i] - b[j][i]));
    return d;
}

double sup_norm(const TypeVectors& a) {
    double d = 0.0;
    for (IncomeType j : kIncomeTypes)
        for (double v : a[j]) d = std::max(d, std::abs(v));
    return d;
}

}  // namespace mfg
