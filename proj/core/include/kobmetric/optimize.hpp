#pragma once

#include <functional>
#include <random>
#include <vector>

#include "kobmetric/types.hpp"

namespace kobmetric {

// Plain Nelder-Mead with standard reflection/expansion/contraction/shrink
// coefficients. Deterministic given the start simplex; the RNG parameter is
// used only by callers to jitter restarts.
struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    int evaluations = 0;
};

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, const std::vector<double>& step,
                             int max_iterations);

// Bisection for the largest s in [lo, hi] with predicate(s) true, assuming
// predicate(lo) true (returns lo if even that fails, after verifying). Used
// for exact radial feasibility rescales; the caller re-verifies the result,
// so correctness never rests on monotonicity of the predicate.
double bisect_largest(const std::function<bool(double)>& predicate, double lo, double hi,
                      int iterations = 60);

}  // namespace kobmetric
