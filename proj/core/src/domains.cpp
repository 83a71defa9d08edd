#include "kobmetric/domains.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kobmetric {

DomainSpec DomainSpec::ball(int n) {
    if (n < 1) throw std::invalid_argument("ball: dimension must be >= 1");
    DomainSpec d;
    d.kind_ = DomainKind::Ball;
    d.dim_ = n;
    return d;
}

DomainSpec DomainSpec::polydisc(std::vector<double> radii) {
    if (radii.empty()) throw std::invalid_argument("polydisc: need at least one radius");
    for (double r : radii)
        if (!(r > 0.0)) throw std::invalid_argument("polydisc: radii must be positive");
    DomainSpec d;
    d.kind_ = DomainKind::Polydisc;
    d.dim_ = static_cast<int>(radii.size());
    d.radii_ = std::move(radii);
    return d;
}

DomainSpec DomainSpec::egg(std::vector<int> exponents) {
    if (exponents.empty()) throw std::invalid_argument("egg: need at least one exponent");
    for (int m : exponents)
        if (m < 1) throw std::invalid_argument("egg: exponents must be positive integers");
    DomainSpec d;
    d.kind_ = DomainKind::Egg;
    d.dim_ = static_cast<int>(exponents.size());
    d.exponents_ = std::move(exponents);
    return d;
}

DomainSpec DomainSpec::lempert(double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument("lempert: epsilon must lie in (0,1)");
    DomainSpec d;
    d.kind_ = DomainKind::Lempert;
    d.dim_ = 2;
    d.epsilon_ = epsilon;
    return d;
}

DomainSpec DomainSpec::stretched_ball(double N) {
    if (!(N >= 1.0)) throw std::invalid_argument("stretched_ball: N must be >= 1");
    DomainSpec d;
    d.kind_ = DomainKind::StretchedBall;
    d.dim_ = 2;
    d.stretch_ = N;
    return d;
}

const char* kind_name(DomainKind kind) {
    switch (kind) {
        case DomainKind::Ball: return "ball";
        case DomainKind::Polydisc: return "polydisc";
        case DomainKind::Egg: return "egg";
        case DomainKind::Lempert: return "lempert";
        case DomainKind::StretchedBall: return "stretched_ball";
    }
    return "?";
}

double DomainSpec::defining_value(const Point& z) const {
    require_dimension(static_cast<std::size_t>(dim_), z.size(), "defining_value");
    switch (kind_) {
        case DomainKind::Ball:
            return norm_sq(z) - 1.0;
        case DomainKind::Polydisc: {
            double worst = -1.0;
            for (int j = 0; j < dim_; ++j)
                worst = std::max(worst, std::norm(z[j]) / (radii_[j] * radii_[j]) - 1.0);
            return worst;
        }
        case DomainKind::Egg: {
            double s = 0.0;
            for (int j = 0; j < dim_; ++j)
                s += std::pow(std::norm(z[j]), exponents_[j]);
            return s - 1.0;
        }
        case DomainKind::Lempert: {
            double a = std::norm(z[0]) / 4.0 - 1.0;
            double b = std::norm(z[1]) / 4.0 - 1.0;
            double c = std::abs(z[0] * z[1]) / epsilon_ - 1.0;
            return std::max({a, b, c});
        }
        case DomainKind::StretchedBall:
            return std::norm(z[0]) + std::norm(z[1]) / (stretch_ * stretch_) - 1.0;
    }
    return 0.0;
}

double DomainSpec::gauge(const Point& z) const {
    require_dimension(static_cast<std::size_t>(dim_), z.size(), "gauge");
    switch (kind_) {
        case DomainKind::Ball:
            return euclid_norm(z);
        case DomainKind::Polydisc: {
            double g = 0.0;
            for (int j = 0; j < dim_; ++j) g = std::max(g, std::abs(z[j]) / radii_[j]);
            return g;
        }
        case DomainKind::StretchedBall:
            return std::sqrt(std::norm(z[0]) + std::norm(z[1]) / (stretch_ * stretch_));
        case DomainKind::Lempert: {
            // All three constraint terms scale as t^2 under z -> t z.
            double k = std::max({std::norm(z[0]) / 4.0, std::norm(z[1]) / 4.0,
                                 std::abs(z[0] * z[1]) / epsilon_});
            return std::sqrt(k);
        }
        case DomainKind::Egg: {
            // Solve sum_j (|z_j| / t)^{2 m_j} = 1 for t. In s = 1/t^2 the sum
            // S(s) = sum_j (|z_j|^2 s)^{m_j} is increasing and convex, so
            // Newton from below converges monotonically and quadratically.
            double amax = 0.0;
            for (const cplx& c : z) amax = std::max(amax, std::abs(c));
            if (amax == 0.0) return 0.0;
            double s = 1.0 / (dim_ * amax * amax);  // S <= 1 here: start below the root
            for (int it = 0; it < 60; ++it) {
                double S = 0.0, dS = 0.0;
                for (int j = 0; j < dim_; ++j) {
                    double base = std::norm(z[j]) * s;
                    double term = 1.0;
                    for (int k = 0; k < exponents_[j]; ++k) term *= base;
                    S += term;
                    dS += exponents_[j] * term / s;
                }
                double step = (1.0 - S) / dS;
                s += step;
                if (std::abs(step) <= 1e-15 * s) break;
            }
            return std::sqrt(1.0 / s);
        }
    }
    return 0.0;
}

double DomainSpec::circumscribing_radius() const {
    switch (kind_) {
        case DomainKind::Ball:
            return 1.0;
        case DomainKind::Polydisc: {
            double s = 0.0;
            for (double r : radii_) s += r * r;
            return std::sqrt(s);
        }
        case DomainKind::StretchedBall:
            return stretch_;
        case DomainKind::Lempert:
            // |z| < 2 and |w| < 2 bound |(z,w)| by 2*sqrt(2); the |zw| < eps
            // constraint cuts the corners: max |z|^2+|w|^2 subject to
            // |z||w| <= eps, |z|,|w| <= 2 is attained at |z| = 2, |w| = eps/2.
            return std::sqrt(4.0 + epsilon_ * epsilon_ / 4.0);
        case DomainKind::Egg: {
            // Maximize sum |z_j|^2 subject to sum |z_j|^{2 m_j} = 1. With
            // u_j = |z_j|^2 this is max sum u_j on the set sum u_j^{m_j} = 1,
            // attained at a vertex/edge: scan the simplex with a fine grid on
            // pairs (sufficient: the objective is linear in u, the constraint
            // set's extreme points lie where at most two u_j are nonzero).
            double best = 0.0;
            for (int i = 0; i < dim_; ++i) best = std::max(best, 1.0);  // single axis: u_i = 1
            for (int i = 0; i < dim_; ++i)
                for (int j = i + 1; j < dim_; ++j) {
                    const int mi = exponents_[i], mj = exponents_[j];
                    constexpr int kGrid = 4096;
                    for (int g = 0; g <= kGrid; ++g) {
                        double ui = static_cast<double>(g) / kGrid;
                        double rem = 1.0 - std::pow(ui, mi);
                        if (rem < 0.0) break;
                        double uj = std::pow(rem, 1.0 / mj);
                        best = std::max(best, ui + uj);
                    }
                }
            return std::sqrt(best);
        }
    }
    return 0.0;
}

double DomainSpec::boundary_distance(const Point& z) const {
    require_dimension(static_cast<std::size_t>(dim_), z.size(), "boundary_distance");
    if (!contains(z)) throw std::domain_error("boundary_distance: point not interior");
    switch (kind_) {
        case DomainKind::Ball:
            return 1.0 - euclid_norm(z);
        case DomainKind::Polydisc: {
            double d = radii_[0] - std::abs(z[0]);
            for (int j = 1; j < dim_; ++j) d = std::min(d, radii_[j] - std::abs(z[j]));
            return d;
        }
        case DomainKind::StretchedBall: {
            // Distance to the ellipsoid |z1|^2 + |z2/N|^2 = 1. Reduce to the
            // plane ellipse (|z1|, |z2|) with semi-axes (1, N): the nearest
            // boundary point shares the phases of z, so only the moduli move.
            // Minimize over the boundary parametrization (cos u, N sin u) on
            // [0, pi/2] by dense sampling plus parabolic refinement.
            double p = std::abs(z[0]), q = std::abs(z[1]);
            double a = 1.0, b = stretch_;
            auto dist_sq = [&](double u) {
                double dx = a * std::cos(u) - p, dy = b * std::sin(u) - q;
                return dx * dx + dy * dy;
            };
            const int kSamples = 2048;
            double ubest = 0.0, fbest = dist_sq(0.0);
            for (int s = 1; s <= kSamples; ++s) {
                double u = (M_PI / 2.0) * s / kSamples;
                double f = dist_sq(u);
                if (f < fbest) { fbest = f; ubest = u; }
            }
            double h = (M_PI / 2.0) / kSamples;
            for (int it = 0; it < 40; ++it) {
                double fm = dist_sq(ubest - h), fp = dist_sq(ubest + h);
                double denom = fm - 2.0 * fbest + fp;
                double du = denom > 0.0 ? 0.5 * h * (fm - fp) / denom : (fp < fm ? h : -h);
                double u2 = std::clamp(ubest + du, 0.0, M_PI / 2.0);
                double f2 = dist_sq(u2);
                if (f2 < fbest) { fbest = f2; ubest = u2; }
                h *= 0.5;
            }
            return std::sqrt(fbest);
        }
        case DomainKind::Egg:
        case DomainKind::Lempert: {
            // Approximation (documented): minimize over a deterministic sample
            // of real directions in the (|z_1|, ..., |z_n|) absolute picture,
            // bisecting along each ray for the boundary crossing. Since both
            // kinds are Reinhardt, the nearest boundary point can be taken
            // with the same phases as z, so rays only need to move the moduli.
            const int kDirs = 720;
            double best = std::numeric_limits<double>::infinity();
            Point dir(dim_, 0.0);
            for (int s = 0; s < kDirs; ++s) {
                double theta = 2.0 * M_PI * s / kDirs;
                // dim_ == 2 for both kinds here.
                dir[0] = std::cos(theta);
                dir[1] = std::sin(theta);
                // march the moduli of z along +dir, keeping phases
                auto at = [&](double t) {
                    Point w = z;
                    for (int j = 0; j < dim_; ++j) {
                        double m = std::abs(z[j]) + t * dir[j].real();
                        if (m < 0.0) m = 0.0;
                        double ph = std::abs(z[j]) > 0 ? std::arg(z[j]) : 0.0;
                        w[j] = std::polar(m, ph);
                    }
                    return w;
                };
                double lo = 0.0, hi = diameter();
                if (defining_value(at(hi)) < 0.0) continue;  // ray never exits
                for (int it = 0; it < 60; ++it) {
                    double mid = 0.5 * (lo + hi);
                    (defining_value(at(mid)) < 0.0 ? lo : hi) = mid;
                }
                best = std::min(best, 0.5 * (lo + hi));
            }
            return best;
        }
    }
    return 0.0;
}

Point DomainSpec::defining_gradient(const Point& z) const {
    require_dimension(static_cast<std::size_t>(dim_), z.size(), "defining_gradient");
    Point g(dim_, 0.0);
    switch (kind_) {
        case DomainKind::Ball:
            for (int j = 0; j < dim_; ++j) g[j] = 2.0 * z[j];
            return g;
        case DomainKind::StretchedBall:
            g[0] = 2.0 * z[0];
            g[1] = 2.0 * z[1] / (stretch_ * stretch_);
            return g;
        case DomainKind::Egg:
            for (int j = 0; j < dim_; ++j) {
                int m = exponents_[j];
                g[j] = 2.0 * static_cast<double>(m) *
                       std::pow(std::norm(z[j]), m - 1) * z[j];
            }
            return g;
        case DomainKind::Polydisc: {
            // Gradient of the active factor; ties broken toward the first.
            int jstar = 0;
            double worst = -2.0;
            for (int j = 0; j < dim_; ++j) {
                double v = std::norm(z[j]) / (radii_[j] * radii_[j]) - 1.0;
                if (v > worst) { worst = v; jstar = j; }
            }
            g[jstar] = 2.0 * z[jstar] / (radii_[jstar] * radii_[jstar]);
            return g;
        }
        case DomainKind::Lempert: {
            double a = std::norm(z[0]) / 4.0 - 1.0;
            double b = std::norm(z[1]) / 4.0 - 1.0;
            double c = std::abs(z[0] * z[1]) / epsilon_ - 1.0;
            double worst = std::max({a, b, c});
            if (worst == a) {
                g[0] = z[0] / 2.0;
            } else if (worst == b) {
                g[1] = z[1] / 2.0;
            } else {
                double p = std::abs(z[0] * z[1]);
                if (p == 0.0) throw std::domain_error("defining_gradient: |zw| vanishes");
                // d|zw|/d conj(z0) = z0 |z1|^2 / (2 |z0 z1|), etc.
                g[0] = z[0] * std::norm(z[1]) / (p * epsilon_);
                g[1] = z[1] * std::norm(z[0]) / (p * epsilon_);
            }
            return g;
        }
    }
    return g;
}

Point DomainSpec::normal_ray_point(const Point& boundary_point, double eps) const {
    if (std::abs(defining_value(boundary_point)) > 1e-8)
        throw std::domain_error("normal_ray_point: not a boundary point");
    if (!(eps > 0.0)) throw std::invalid_argument("normal_ray_point: eps must be positive");
    Point g = defining_gradient(boundary_point);
    double gn = euclid_norm(g);
    if (gn < 1e-12) throw std::domain_error("normal_ray_point: gradient vanishes");
    Point p = subtracted(boundary_point, scaled(g, eps / gn));
    if (!contains(p)) throw std::domain_error("normal_ray_point: eps too large, exited domain");
    return p;
}

}  // namespace kobmetric
