#pragma once

#include <cmath>
#include <vector>

#include "sinai/environment.hpp"

namespace fixtures {

inline const double kLn3 = std::log(3.0);

// Environment whose potential is steps[k - lo] * ln 3; steps must vanish at 0
// and change by +-1 between neighbours.
inline sinai::Environment staircase_env(sinai::Index lo, const std::vector<int>& steps) {
    std::vector<double> alpha(steps.size(), 0.25);
    for (std::size_t i = 1; i < steps.size(); ++i) {
        alpha[i] = steps[i] - steps[i - 1] > 0 ? 0.25 : 0.75;
    }
    return sinai::make_environment(lo, std::move(alpha), kLn3 * kLn3);
}

// S / ln 3 on [-8, 10].
inline const std::vector<int> kStaircase{6, 5, 4, 3, 2, 1, 2, 1, 0, -1, -2, -3, -2, -1, 0, 1, 2, 3, 4};

inline sinai::Environment staircase() { return staircase_env(-8, kStaircase); }

inline sinai::Environment constant_env(sinai::Index lo, sinai::Index hi, double alpha,
                                       double sigma2 = 1.0) {
    return sinai::make_environment(lo, std::vector<double>(static_cast<std::size_t>(hi - lo + 1), alpha),
                                   sigma2);
}

inline sinai::Environment flat(sinai::Index lo, sinai::Index hi) { return constant_env(lo, hi, 0.5); }

inline sinai::Potential potential_from(sinai::Index lo, std::vector<double> values) {
    return sinai::Potential(lo, std::move(values));
}

}  // namespace fixtures
