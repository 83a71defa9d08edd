#pragma once

// Internal deterministic sampling helpers. Fixed algorithms on top of
// mt19937_64 (not std distributions) so a seed pins the exact byte stream
// across standard libraries.

#include <cmath>
#include <random>

#include "kobmetric/types.hpp"

namespace kobmetric::detail {

inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double gaussian(std::mt19937_64& rng) {
    double u1 = 0.0;
    do { u1 = uniform01(rng); } while (u1 == 0.0);
    double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

inline cplx gaussian_cplx(std::mt19937_64& rng) {
    double re = gaussian(rng);
    double im = gaussian(rng);
    return cplx(re, im);
}

inline Point gaussian_point(std::mt19937_64& rng, int n) {
    Point p(n);
    for (auto& v : p) v = gaussian_cplx(rng);
    return p;
}

}  // namespace kobmetric::detail
