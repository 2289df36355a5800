#pragma once

#include <doctest.h>

#include <cmath>
#include <random>

#include "cusp/common.hpp"

namespace testing {

inline double dist(cusp::Point a, cusp::Point b) { return std::hypot(a.x1 - b.x1, a.x2 - b.x2); }

inline std::mt19937_64& rng() {
    static std::mt19937_64 g(20240611);
    return g;
}

inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

}  // namespace testing
