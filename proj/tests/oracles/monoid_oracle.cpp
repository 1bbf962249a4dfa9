#include "monoid_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace oracles {

std::vector<double> brute_force_monoid(const std::vector<double> &generators, double e_max, double tol) {
    std::vector<double> values;
    std::function<void(std::size_t, double)> rec = [&](std::size_t i, double acc) {
        if (i == generators.size()) {
            values.push_back(acc);
            return;
        }
        for (int k = 0; acc + k * generators[i] <= e_max + tol; ++k) rec(i + 1, acc + k * generators[i]);
    };
    rec(0, 0.0);
    std::sort(values.begin(), values.end());
    std::vector<double> out;
    for (double v : values)
        if (out.empty() || std::abs(v - out.back()) > tol) out.push_back(v);
    return out;
}

}  // namespace oracles
