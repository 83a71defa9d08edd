#pragma once

#include <functional>
#include <vector>

#include "kobmetric/types.hpp"

namespace kobmetric {

// One-variable planar grid: cell-centered samples at origin + h*(ix + i*iy),
// 0 <= ix, iy < size. The dbar machinery works on complex-line slices, so the
// grid lives in a single complex variable.
struct GridSpec {
    int size = 0;
    double h = 0.0;
    cplx origin = 0.0;

    cplx point(int ix, int iy) const { return origin + h * cplx(ix, iy); }

    // Cell-centered cover of the square window [center +- half_width]^2.
    static GridSpec centered(cplx center, double half_width, int size);
};

struct GridField {
    GridSpec grid;
    std::vector<cplx> values;  // row-major: values[iy * size + ix]

    cplx& at(int ix, int iy) { return values[static_cast<std::size_t>(iy) * grid.size + ix]; }
    const cplx& at(int ix, int iy) const {
        return values[static_cast<std::size_t>(iy) * grid.size + ix];
    }

    static GridField zeros(const GridSpec& grid);
};

// Radial cutoff: identically 1 for |z - center| <= r/2, 0 for |z - center|
// >= r, bridged by the C^2 quintic smoothstep in between. dbar() is the
// analytic Wirtinger derivative of the profile, so its support is exactly
// the annulus r/2 <= |z - center| <= r.
struct CutoffSpec {
    cplx center = 0.0;
    double radius = 0.0;

    double profile(double t) const;             // q(t): 1 for t<=1/2, 0 for t>=1
    double profile_derivative(double t) const;  // dq/dt
    double value(cplx z) const { return profile(std::abs(z - center) / radius); }
    cplx dbar(cplx z) const;  // d(gamma)/d(conj z), exact annulus support
};

CutoffSpec build_cutoff(cplx center, double r);

// Correction data of the cutoff construction:
//   tau = dbar(gamma) * (psi - psi o mu^{-1})
// with mu the rotation z -> center + rotation*(z - center), |rotation| = 1,
// and psi holomorphic with psi(center) = 0. Support is exactly the annulus
// r/2 <= |z - center| <= r. Throws if |rotation| != 1, psi(center) != 0, the
// grid resolves r with fewer than 16 cells, or the annulus leaks outside the
// grid window.
GridField correction_rhs(const std::function<cplx(cplx)>& psi, cplx rotation,
                         const CutoffSpec& gamma, const GridSpec& grid);

// Cauchy-transform solve of dbar(u) = tau for compactly supported tau:
//   u(z) = -(1/pi) sum_cells tau(xi) h^2 / (xi - z),
// realized as an FFT convolution on a zero-padded grid. The singular cell
// uses the exact integral of the kernel over the centered square cell, which
// vanishes by symmetry. Linear in tau; second-order accurate midpoint
// quadrature elsewhere.
GridField cauchy_solve(const GridField& tau);

// Centered-difference Wirtinger derivative (d/d conj z) of a sampled field;
// the boundary ring is left zero. Used to measure dbar residuals.
GridField dbar_finite_difference(const GridField& u);

// || dbar(u) - tau ||_2 / || tau ||_2 over interior cells.
double dbar_residual(const GridField& u, const GridField& tau);

struct CorrectionScalingRow {
    double r = 0.0;
    double sup_u = 0.0;
    double sup_grad_u = 0.0;
    double residual = 0.0;  // dbar residual of the solve, relative
};

struct CorrectionScalingReport {
    std::vector<CorrectionScalingRow> rows;
    // least-squares slope of log sup|u| against log r over rows with
    // sup|u| > 0; 0 when every row vanishes (e.g. the identity rotation)
    double fitted_slope = 0.0;
};

// For each r (decreasing, at least 3): build the cutoff at `center`, form the
// correction data, solve, and record sup|u|, sup|grad u| and the residual.
// The analytic estimate makes sup|u| -> 0 at rate at least r; callers assert
// fitted_slope >= 1 and report the value.
CorrectionScalingReport correction_scaling_experiment(const GridSpec& grid,
                                                      const std::function<cplx(cplx)>& psi,
                                                      cplx rotation,
                                                      const std::vector<double>& r_values,
                                                      cplx center = 0.0);

}  // namespace kobmetric
