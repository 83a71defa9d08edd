#include "kobmetric/dbar.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace kobmetric {

namespace {

constexpr double kUnitModulusTolerance = 1e-9;
constexpr double kBasepointTolerance = 1e-9;
constexpr int kMinCellsAcrossRadius = 16;

void require_grid(const GridSpec& grid, const char* where) {
    if (grid.size < 2 || grid.h <= 0.0) {
        throw std::invalid_argument(std::string(where) + ": grid needs size >= 2 and h > 0");
    }
}

// In-place 2-D complex DFT of side `side` (both directions).
void fft2(std::vector<cplx>& data, int side, int sign) {
    fftw_plan plan = fftw_plan_dft_2d(side, side, reinterpret_cast<fftw_complex*>(data.data()),
                                      reinterpret_cast<fftw_complex*>(data.data()), sign,
                                      FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
}

}  // namespace

GridSpec GridSpec::centered(cplx center, double half_width, int size) {
    if (size < 2 || half_width <= 0.0) {
        throw std::invalid_argument("GridSpec::centered: need size >= 2 and half_width > 0");
    }
    GridSpec grid;
    grid.size = size;
    grid.h = 2.0 * half_width / size;
    grid.origin = center + cplx(-half_width + 0.5 * grid.h, -half_width + 0.5 * grid.h);
    return grid;
}

GridField GridField::zeros(const GridSpec& grid) {
    GridField field;
    field.grid = grid;
    field.values.assign(static_cast<std::size_t>(grid.size) * grid.size, cplx(0.0, 0.0));
    return field;
}

double CutoffSpec::profile(double t) const {
    if (t <= 0.5) return 1.0;
    if (t >= 1.0) return 0.0;
    const double x = 2.0 * t - 1.0;
    const double s = x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
    return 1.0 - s;
}

double CutoffSpec::profile_derivative(double t) const {
    if (t <= 0.5 || t >= 1.0) return 0.0;
    const double x = 2.0 * t - 1.0;
    const double y = 1.0 - x;
    return -60.0 * x * x * y * y;
}

cplx CutoffSpec::dbar(cplx z) const {
    const cplx w = z - center;
    const double rho = std::abs(w);
    const double t = rho / radius;
    if (t <= 0.5 || t >= 1.0) return cplx(0.0, 0.0);
    // gamma(z) = q(|w|/r) and d|w|/d(conj z) = w / (2|w|).
    return profile_derivative(t) / radius * w / (2.0 * rho);
}

CutoffSpec build_cutoff(cplx center, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("build_cutoff: radius must be positive");
    CutoffSpec spec;
    spec.center = center;
    spec.radius = r;
    return spec;
}

GridField correction_rhs(const std::function<cplx(cplx)>& psi, cplx rotation,
                         const CutoffSpec& gamma, const GridSpec& grid) {
    require_grid(grid, "correction_rhs");
    if (!psi) throw std::invalid_argument("correction_rhs: psi is empty");
    if (std::abs(std::abs(rotation) - 1.0) > kUnitModulusTolerance) {
        throw std::invalid_argument("correction_rhs: rotation must have unit modulus");
    }
    if (std::abs(psi(gamma.center)) > kBasepointTolerance) {
        throw std::invalid_argument("correction_rhs: psi must vanish at the cutoff center");
    }
    if (gamma.radius < kMinCellsAcrossRadius * grid.h) {
        throw std::invalid_argument("correction_rhs: grid too coarse, need >= 16 cells across r");
    }
    const double lo_x = grid.origin.real() - 0.5 * grid.h;
    const double lo_y = grid.origin.imag() - 0.5 * grid.h;
    const double hi_x = lo_x + grid.size * grid.h;
    const double hi_y = lo_y + grid.size * grid.h;
    if (gamma.center.real() - gamma.radius < lo_x || gamma.center.real() + gamma.radius > hi_x ||
        gamma.center.imag() - gamma.radius < lo_y || gamma.center.imag() + gamma.radius > hi_y) {
        throw std::invalid_argument("correction_rhs: cutoff support leaks outside the grid");
    }

    const cplx inv_rotation = std::conj(rotation) / std::norm(rotation);
    GridField tau = GridField::zeros(grid);
    const bool identity = std::abs(rotation - cplx(1.0, 0.0)) == 0.0;
    for (int iy = 0; iy < grid.size; ++iy) {
        for (int ix = 0; ix < grid.size; ++ix) {
            const cplx z = grid.point(ix, iy);
            const cplx db = gamma.dbar(z);
            if (db == cplx(0.0, 0.0) || identity) continue;
            const cplx pulled = gamma.center + inv_rotation * (z - gamma.center);
            tau.at(ix, iy) = db * (psi(z) - psi(pulled));
        }
    }
    return tau;
}

GridField cauchy_solve(const GridField& tau) {
    require_grid(tau.grid, "cauchy_solve");
    const int n = tau.grid.size;
    if (tau.values.size() != static_cast<std::size_t>(n) * n) {
        throw std::invalid_argument("cauchy_solve: field size does not match its grid");
    }
    int pad = 1;
    while (pad < 2 * n) pad <<= 1;
    const std::size_t cells = static_cast<std::size_t>(pad) * pad;
    const double h = tau.grid.h;

    // u[m] = sum_j tau[j] * K[m - j] with K[d] = (h/pi) / (dx + i dy), K[0] = 0:
    // the midpoint rule for -(1/pi) h^2 / (xi_j - z_m), singular cell exact.
    std::vector<cplx> kernel(cells, cplx(0.0, 0.0));
    const double scale = h / std::acos(-1.0);
    for (int dy = -(n - 1); dy <= n - 1; ++dy) {
        const int wy = (dy + pad) % pad;
        for (int dx = -(n - 1); dx <= n - 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            const int wx = (dx + pad) % pad;
            kernel[static_cast<std::size_t>(wy) * pad + wx] = scale / cplx(dx, dy);
        }
    }
    std::vector<cplx> rhs(cells, cplx(0.0, 0.0));
    for (int iy = 0; iy < n; ++iy) {
        for (int ix = 0; ix < n; ++ix) {
            rhs[static_cast<std::size_t>(iy) * pad + ix] = tau.at(ix, iy);
        }
    }
    fft2(kernel, pad, FFTW_FORWARD);
    fft2(rhs, pad, FFTW_FORWARD);
    for (std::size_t i = 0; i < cells; ++i) rhs[i] *= kernel[i];
    fft2(rhs, pad, FFTW_BACKWARD);

    GridField u = GridField::zeros(tau.grid);
    const double norm = 1.0 / static_cast<double>(cells);
    for (int iy = 0; iy < n; ++iy) {
        for (int ix = 0; ix < n; ++ix) {
            u.at(ix, iy) = rhs[static_cast<std::size_t>(iy) * pad + ix] * norm;
        }
    }
    return u;
}

GridField dbar_finite_difference(const GridField& u) {
    require_grid(u.grid, "dbar_finite_difference");
    const int n = u.grid.size;
    GridField out = GridField::zeros(u.grid);
    const double inv = 1.0 / (4.0 * u.grid.h);  // (d/dx + i d/dy)/2 with centered steps
    for (int iy = 1; iy + 1 < n; ++iy) {
        for (int ix = 1; ix + 1 < n; ++ix) {
            const cplx dx = u.at(ix + 1, iy) - u.at(ix - 1, iy);
            const cplx dy = u.at(ix, iy + 1) - u.at(ix, iy - 1);
            out.at(ix, iy) = (dx + cplx(0.0, 1.0) * dy) * inv;
        }
    }
    return out;
}

double dbar_residual(const GridField& u, const GridField& tau) {
    require_grid(u.grid, "dbar_residual");
    if (u.grid.size != tau.grid.size) {
        throw std::invalid_argument("dbar_residual: fields live on different grids");
    }
    const GridField fd = dbar_finite_difference(u);
    const int n = u.grid.size;
    double err = 0.0;
    double ref = 0.0;
    for (int iy = 1; iy + 1 < n; ++iy) {
        for (int ix = 1; ix + 1 < n; ++ix) {
            err += std::norm(fd.at(ix, iy) - tau.at(ix, iy));
            ref += std::norm(tau.at(ix, iy));
        }
    }
    if (ref == 0.0) return std::sqrt(err);
    return std::sqrt(err / ref);
}

CorrectionScalingReport correction_scaling_experiment(const GridSpec& grid,
                                                      const std::function<cplx(cplx)>& psi,
                                                      cplx rotation,
                                                      const std::vector<double>& r_values,
                                                      cplx center) {
    require_grid(grid, "correction_scaling_experiment");
    if (r_values.size() < 3) {
        throw std::invalid_argument("correction_scaling_experiment: need at least 3 radii");
    }
    for (std::size_t i = 0; i + 1 < r_values.size(); ++i) {
        if (!(r_values[i] > r_values[i + 1])) {
            throw std::invalid_argument("correction_scaling_experiment: radii must decrease");
        }
    }

    CorrectionScalingReport report;
    for (double r : r_values) {
        const CutoffSpec gamma = build_cutoff(center, r);
        const GridField tau = correction_rhs(psi, rotation, gamma, grid);
        const GridField u = cauchy_solve(tau);
        const GridField grad = dbar_finite_difference(u);

        CorrectionScalingRow row;
        row.r = r;
        for (const cplx& v : u.values) row.sup_u = std::max(row.sup_u, std::abs(v));
        // |grad u| = |du/dz| + |du/d(conj z)| is within a factor 2 of the true
        // gradient sup; the centered dbar part alone already carries the rate.
        const int n = grid.size;
        for (int iy = 1; iy + 1 < n; ++iy) {
            for (int ix = 1; ix + 1 < n; ++ix) {
                const cplx ddx = (u.at(ix + 1, iy) - u.at(ix - 1, iy)) / (2.0 * grid.h);
                const cplx ddy = (u.at(ix, iy + 1) - u.at(ix, iy - 1)) / (2.0 * grid.h);
                row.sup_grad_u = std::max(row.sup_grad_u, std::hypot(std::abs(ddx), std::abs(ddy)));
            }
        }
        row.residual = dbar_residual(u, tau);
        report.rows.push_back(row);
    }

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int m = 0;
    for (const CorrectionScalingRow& row : report.rows) {
        if (row.sup_u <= 0.0) continue;
        const double x = std::log(row.r);
        const double y = std::log(row.sup_u);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    if (m >= 2) {
        const double denom = m * sxx - sx * sx;
        if (denom != 0.0) report.fitted_slope = (m * sxy - sx * sy) / denom;
    }
    return report;
}

}  // namespace kobmetric
