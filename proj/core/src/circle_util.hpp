#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "kobmetric/domains.hpp"
#include "kobmetric/optimize.hpp"
#include "kobmetric/types.hpp"

// Circle-sampled feasibility margins for coefficient sets with a_0 pinned.
// Shared by the metric and chain searches; internal, not installed.

namespace kobmetric::detail {

struct CircleGrid {
    explicit CircleGrid(int n_angles) : zeta(n_angles) {
        for (int s = 0; s < n_angles; ++s)
            zeta[s] = std::polar(1.0, 2.0 * M_PI * s / n_angles);
    }
    std::vector<cplx> zeta;
};

// coeffs holds a_1..a_d (a_0 = z). Max of the defining function over the
// sampled unit circle; the defining functions are subharmonic along discs,
// so the circle dominates the closed disc.
inline double circle_margin(const DomainSpec& dom, const Point& z,
                            const std::vector<Point>& coeffs, const CircleGrid& grid) {
    const int n = static_cast<int>(z.size());
    const int d = static_cast<int>(coeffs.size());
    double worst = -std::numeric_limits<double>::infinity();
    Point w(n);
    for (const cplx& zeta : grid.zeta) {
        if (d == 0) {
            w = z;
        } else {
            for (int i = 0; i < n; ++i) w[i] = coeffs[d - 1][i];
            for (int k = d - 2; k >= 0; --k)
                for (int i = 0; i < n; ++i) w[i] = w[i] * zeta + coeffs[k][i];
            for (int i = 0; i < n; ++i) w[i] = w[i] * zeta + z[i];
        }
        worst = std::max(worst, dom.defining_value(w));
    }
    return worst;
}

// Largest s with margin(z + s*(phi - z)) <= -slack; always re-verified, so a
// non-monotone margin can only make the result conservative, never invalid.
inline double radial_rescale(const DomainSpec& dom, const Point& z, std::vector<Point>& coeffs,
                             const CircleGrid& grid, double slack) {
    auto feasible = [&](double s) {
        std::vector<Point> scaled_coeffs(coeffs.size());
        for (std::size_t k = 0; k < coeffs.size(); ++k) scaled_coeffs[k] = scaled(coeffs[k], s);
        return circle_margin(dom, z, scaled_coeffs, grid) <= -slack;
    };
    double s = bisect_largest(feasible, 0.0, 2.5, 60);
    if (!feasible(s)) return 0.0;
    for (auto& a : coeffs) a = scaled(a, s);
    return s;
}

}  // namespace kobmetric::detail
