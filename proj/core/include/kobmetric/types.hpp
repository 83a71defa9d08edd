#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace kobmetric {

using cplx = std::complex<double>;

// A point of C^n. Directions share the representation; a Direction used in a
// metric query must be nonzero (checked at the query site).
using Point = std::vector<cplx>;
using Direction = std::vector<cplx>;

inline double norm_sq(const Point& z) {
    double s = 0.0;
    for (const cplx& c : z) s += std::norm(c);
    return s;
}

inline double euclid_norm(const Point& z) { return std::sqrt(norm_sq(z)); }

// Hermitian inner product <a, b> = sum a_i conj(b_i).
inline cplx hermitian_dot(const Point& a, const Point& b) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * std::conj(b[i]);
    return s;
}

inline Point scaled(const Point& z, cplx s) {
    Point out(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) out[i] = s * z[i];
    return out;
}

inline Point added(const Point& a, const Point& b) {
    Point out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
    return out;
}

inline Point subtracted(const Point& a, const Point& b) {
    Point out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

struct dimension_mismatch : std::invalid_argument {
    explicit dimension_mismatch(const std::string& what) : std::invalid_argument(what) {}
};

inline void require_dimension(std::size_t expected, std::size_t got, const char* where) {
    if (expected != got)
        throw dimension_mismatch(std::string(where) + ": expected dimension " +
                                 std::to_string(expected) + ", got " + std::to_string(got));
}

// Shared optimizer budget. `seed` makes every stochastic routine reproducible.
struct OptimizerBudget {
    int max_iterations = 400;
    int restarts = 8;
    int degree = 10;
    std::uint64_t seed = 0;
};

}  // namespace kobmetric
