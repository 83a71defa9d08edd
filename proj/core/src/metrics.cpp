#include "kobmetric/metrics.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "circle_util.hpp"
#include "kobmetric/optimize.hpp"
#include "rng_util.hpp"

namespace kobmetric {

using detail::CircleGrid;
using detail::circle_margin;
using detail::gaussian;
using detail::radial_rescale;

namespace {

struct DiscSearchState {
    double best_t = 0.0;
    std::vector<Point> best_coeffs;  // a_1..a_d, feasible (margin <= -slack)
};

void offer(DiscSearchState& st, double t, std::vector<Point> coeffs) {
    if (t > st.best_t) {
        st.best_t = t;
        st.best_coeffs = std::move(coeffs);
    }
}

// exact best linear disc z + t*xih*zeta by bisection
double best_linear_t(const DomainSpec& dom, const Point& z, const Direction& xih,
                     const CircleGrid& grid, double slack) {
    auto feasible = [&](double t) {
        std::vector<Point> c{scaled(xih, t)};
        return circle_margin(dom, z, c, grid) <= -slack;
    };
    double hi = 2.0 * dom.circumscribing_radius();
    return bisect_largest(feasible, 0.0, hi, 60);
}

// ---------------------------------------------------------------------------
// boundary-stretch refinement (alternating projection): push the boundary
// curve to the boundary of the domain along the Minkowski gauge, project back
// to polynomials, re-pin a_0 and the direction of a_1, rescale to feasible.

struct StretchResult {
    double t = 0.0;
    std::vector<Point> coeffs;
};

StretchResult boundary_stretch(const DomainSpec& dom, const Point& z, const Direction& xih,
                               std::vector<Point> coeffs, int degree, int iterations,
                               double damping, double slack) {
    const int n = static_cast<int>(z.size());
    const int N = std::max(256, 8 * degree);
    CircleGrid grid(N);
    coeffs.resize(degree, Point(n, 0.0));
    for (auto& a : coeffs) a.resize(n, 0.0);

    fftw_complex* buf = fftw_alloc_complex(N);
    fftw_plan plan = fftw_plan_dft_1d(N, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);

    std::vector<Point> boundary(N, Point(n));
    StretchResult out;
    for (int it = 0; it < iterations; ++it) {
        // evaluate the current disc on the circle and stretch pointwise
        for (int s = 0; s < N; ++s) {
            const cplx zeta = grid.zeta[s];
            Point w(n);
            for (int i = 0; i < n; ++i) w[i] = coeffs[degree - 1][i];
            for (int k = degree - 2; k >= 0; --k)
                for (int i = 0; i < n; ++i) w[i] = w[i] * zeta + coeffs[k][i];
            for (int i = 0; i < n; ++i) w[i] = w[i] * zeta + z[i];
            double g = dom.gauge(w);
            double lam = g > 1e-12 ? 1.0 + damping * (1.0 / g - 1.0) : 1.0;
            for (int i = 0; i < n; ++i) boundary[s][i] = lam * w[i];
        }
        // Fourier coefficients 1..degree per component
        for (int i = 0; i < n; ++i) {
            for (int s = 0; s < N; ++s) {
                buf[s][0] = boundary[s][i].real();
                buf[s][1] = boundary[s][i].imag();
            }
            fftw_execute(plan);
            for (int k = 1; k <= degree; ++k)
                coeffs[k - 1][i] = cplx(buf[k][0], buf[k][1]) / static_cast<double>(N);
        }
        // re-pin the derivative direction
        cplx along = hermitian_dot(coeffs[0], xih);
        double t = std::abs(along);
        coeffs[0] = scaled(xih, t);
        // exact feasibility rescale; track the best
        std::vector<Point> trial = coeffs;
        double s = radial_rescale(dom, z, trial, grid, slack);
        if (s > 0.0 && t * s > out.t) {
            out.t = t * s;
            out.coeffs = trial;
        }
    }
    fftw_destroy_plan(plan);
    fftw_free(buf);
    return out;
}

// ---------------------------------------------------------------------------
// per-factor Mobius disc for the Polydisc kind (extremal up to truncation)

StretchResult polydisc_product_disc(const DomainSpec& dom, const Point& z,
                                    const Direction& xih, int degree, double slack) {
    const int n = dom.dimension();
    const auto& r = dom.radii();
    double t_max = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
        if (std::abs(xih[j]) < 1e-15) continue;
        double a = std::abs(z[j]) / r[j];
        t_max = std::min(t_max, r[j] * (1.0 - a * a) / std::abs(xih[j]));
    }
    StretchResult out;
    if (!std::isfinite(t_max)) return out;
    double t = t_max * (1.0 - 1e-9);
    // coordinate j: r_j * mob_{a_j}(omega_j s_j zeta), Taylor truncated
    std::vector<Point> coeffs(degree, Point(n, 0.0));
    for (int j = 0; j < n; ++j) {
        cplx a = z[j] / r[j];
        double s2 = 1.0 - std::norm(a);
        if (std::abs(xih[j]) < 1e-15) continue;
        cplx omega = xih[j] / std::abs(xih[j]);
        double sj = t * std::abs(xih[j]) / (r[j] * s2);
        cplx w = omega * sj;                  // mob_a(w zeta): a + s2 sum (w zeta)^k (-conj a)^{k-1}
        cplx wp = w;
        cplx ap = 1.0;
        for (int k = 1; k <= degree; ++k) {
            coeffs[k - 1][j] = r[j] * s2 * wp * ap;
            wp *= w;
            ap *= -std::conj(a);
        }
    }
    CircleGrid grid(std::max(96, 8 * degree));
    double s = radial_rescale(dom, z, coeffs, grid, slack);
    if (s <= 0.0) return out;
    out.t = t * s;
    out.coeffs = std::move(coeffs);
    return out;
}

// ---------------------------------------------------------------------------
// extremal line disc for the Ball and StretchedBall kinds: the affine line
// z + C xih meets the (transported) ball in a round disc; its Riemann map is
// a Mobius reparametrization, Taylor-truncated at an adaptive degree.

StretchResult ball_geodesic_disc(const DomainSpec& dom, const Point& z, const Direction& xih,
                                 double slack) {
    StretchResult out;
    Point w = z;
    Direction eta = xih;
    if (dom.kind() == DomainKind::StretchedBall) {
        w[1] /= dom.stretch();
        eta[1] /= dom.stretch();
    }
    const double eta2 = norm_sq(eta);
    const double s2 = 1.0 - norm_sq(w);
    if (s2 <= 0.0 || eta2 <= 0.0) return out;
    // { t : |w + t eta| < 1 } is the disc with center t_c, radius rad
    const cplx c0 = hermitian_dot(eta, w);
    const cplx t_center = -std::conj(c0) / eta2;
    const double rad = std::sqrt(s2 / eta2 + std::norm(c0) / (eta2 * eta2));
    const cplx sig = -t_center / rad;  // mobius center sending 0 -> z
    const double sig_abs = std::abs(sig);
    if (sig_abs >= 1.0) return out;
    int deg = 12;
    if (sig_abs > 1e-3) {
        const double wanted = std::log(1e-13 * (1.0 - sig_abs)) / std::log(sig_abs);
        deg = std::clamp(static_cast<int>(wanted) + 1, 12, 400);
    }
    const double lead = rad * (1.0 - sig_abs * sig_abs);
    std::vector<Point> coeffs(deg, Point(z.size(), cplx(0.0, 0.0)));
    cplx factor = lead;
    for (int k = 1; k <= deg; ++k) {
        for (std::size_t i = 0; i < z.size(); ++i) coeffs[k - 1][i] = factor * xih[i];
        factor *= -std::conj(sig);
    }
    CircleGrid grid(std::max(96, 8 * deg));
    const double s = radial_rescale(dom, z, coeffs, grid, slack);
    if (s <= 0.0) return out;
    out.t = lead * s;
    out.coeffs = std::move(coeffs);
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------

MetricBound kobayashi_exact_model(const DomainSpec& domain, const MetricQuery& q) {
    require_dimension(static_cast<std::size_t>(domain.dimension()), q.point.size(),
                      "kobayashi_exact_model");
    require_dimension(q.point.size(), q.direction.size(), "kobayashi_exact_model");
    MetricBound out;
    out.kind = BoundKind::Exact;
    switch (domain.kind()) {
        case DomainKind::Ball: {
            double s2 = 1.0 - norm_sq(q.point);
            if (s2 <= 0.0) throw std::domain_error("kobayashi_exact_model: point not interior");
            double ip = std::abs(hermitian_dot(q.direction, q.point));
            out.value = std::sqrt((norm_sq(q.direction) * s2 + ip * ip) / (s2 * s2));
            out.method = "ball closed form";
            return out;
        }
        case DomainKind::Polydisc: {
            const auto& r = domain.radii();
            double best = 0.0;
            for (int j = 0; j < domain.dimension(); ++j) {
                double denom = r[j] * r[j] - std::norm(q.point[j]);
                if (denom <= 0.0)
                    throw std::domain_error("kobayashi_exact_model: point not interior");
                best = std::max(best, std::abs(q.direction[j]) * r[j] / denom);
            }
            out.value = best;
            out.method = "polydisc closed form";
            return out;
        }
        case DomainKind::StretchedBall: {
            double N = domain.stretch();
            MetricQuery pulled;
            pulled.point = {q.point[0], q.point[1] / N};
            pulled.direction = {q.direction[0], q.direction[1] / N};
            MetricBound inner = kobayashi_exact_model(DomainSpec::ball(2), pulled);
            inner.method = "stretched-ball pullback";
            return inner;
        }
        default:
            throw std::invalid_argument("kobayashi_exact_model: unsupported kind");
    }
}

MetricBound kobayashi_upper(const DomainSpec& domain, const MetricQuery& q,
                            const OptimizerBudget& budget) {
    require_dimension(static_cast<std::size_t>(domain.dimension()), q.point.size(),
                      "kobayashi_upper");
    require_dimension(q.point.size(), q.direction.size(), "kobayashi_upper");
    if (!domain.contains(q.point)) throw std::domain_error("kobayashi_upper: point not interior");
    const double xi_norm = euclid_norm(q.direction);
    if (!(xi_norm > 0.0)) throw std::invalid_argument("kobayashi_upper: zero direction");

    const int n = domain.dimension();
    const Point& z = q.point;
    Direction xih = scaled(q.direction, 1.0 / xi_norm);
    const int degree = std::max(1, budget.degree);
    const double slack = kFeasibilitySlack;
    CircleGrid grid(std::max(96, 8 * degree));

    DiscSearchState st;
    std::string method = "linear";

    // 1) exact best linear disc
    double t_lin = best_linear_t(domain, z, xih, grid, slack);
    if (t_lin > 0.0) offer(st, t_lin, {scaled(xih, t_lin)});

    // 2) per-factor Mobius disc (Polydisc only)
    if (domain.kind() == DomainKind::Polydisc) {
        StretchResult pd = polydisc_product_disc(domain, z, xih, degree, slack);
        if (pd.t > st.best_t) method = "product-mobius";
        offer(st, pd.t, std::move(pd.coeffs));
    }

    // 2b) extremal line disc (Ball and StretchedBall kinds)
    if (domain.kind() == DomainKind::Ball || domain.kind() == DomainKind::StretchedBall) {
        StretchResult geo = ball_geodesic_disc(domain, z, xih, slack);
        if (geo.t > st.best_t) method = "ball-geodesic";
        offer(st, geo.t, std::move(geo.coeffs));
    }

    // 3) boundary-stretch refinement from the linear disc
    if (t_lin > 0.0) {
        StretchResult ref = boundary_stretch(domain, z, xih, {scaled(xih, t_lin)}, degree,
                                             /*iterations=*/300, /*damping=*/0.7, slack);
        if (ref.t > st.best_t) method = "boundary-stretch";
        offer(st, ref.t, std::move(ref.coeffs));
    }

    // 4) penalized Nelder-Mead engine, penalty ramped x10 per restart,
    //    scaled coefficient parametrization, warm-started from the best disc
    std::mt19937_64 rng(budget.seed);
    const double rho = std::clamp(domain.gauge(z), 0.35, 0.95);
    const double base_scale = std::max(st.best_t, 0.2);
    std::vector<double> sigma(degree - 1);
    for (int k = 2; k <= degree; ++k) sigma[k - 2] = base_scale * std::pow(rho, k - 1);

    const int m = 1 + 2 * n * (degree - 1);
    auto unpack = [&](const std::vector<double>& x) {
        std::vector<Point> coeffs(degree, Point(n, 0.0));
        coeffs[0] = scaled(xih, x[0]);
        for (int k = 2; k <= degree; ++k) {
            for (int i = 0; i < n; ++i) {
                double re = x[1 + 2 * n * (k - 2) + i];
                double im = x[1 + 2 * n * (k - 2) + n + i];
                coeffs[k - 1][i] = sigma[k - 2] * cplx(re, im);
            }
        }
        return coeffs;
    };
    auto pack_best = [&]() {
        std::vector<double> x(m, 0.0);
        x[0] = st.best_t;
        for (std::size_t k = 1; k < st.best_coeffs.size() && k < static_cast<std::size_t>(degree);
             ++k) {
            for (int i = 0; i < n; ++i) {
                cplx c = st.best_coeffs[k][i] / sigma[k - 1];
                x[1 + 2 * n * (k - 1) + i] = c.real();
                x[1 + 2 * n * (k - 1) + n + i] = c.imag();
            }
        }
        return x;
    };

    for (int rs = 0; rs < std::max(1, budget.restarts); ++rs) {
        const double W = 100.0 * std::pow(10.0, rs);
        std::vector<double> x0 = pack_best();
        if (rs > 0) {
            for (double& v : x0) v = v * (1.0 + 0.03 * gaussian(rng)) + 0.005 * gaussian(rng);
            if (x0[0] <= 1e-9) x0[0] = std::max(t_lin, 1e-6);
        }
        auto objective = [&](const std::vector<double>& x) {
            if (x[0] <= 0.0) return 1e6 - x[0];
            std::vector<Point> coeffs = unpack(x);
            double mg = circle_margin(domain, z, coeffs, grid);
            return -x[0] + W * std::max(0.0, mg + slack);
        };
        std::vector<double> step(m, rs == 0 ? 0.25 : 0.1);
        step[0] = 0.2 * std::max(st.best_t, 0.05);
        NelderMeadResult res = nelder_mead(objective, x0, step, budget.max_iterations);
        if (res.x[0] > 0.0) {
            std::vector<Point> coeffs = unpack(res.x);
            double s = radial_rescale(domain, z, coeffs, grid, slack);
            double t = res.x[0] * s;
            if (s > 0.0 && t > st.best_t) method = "nelder-mead";
            if (s > 0.0) offer(st, t, std::move(coeffs));
        }
    }

    if (st.best_t <= 0.0)
        throw std::runtime_error("kobayashi_upper: no feasible disc found within budget");

    // dense re-verification of the winning witness (degree-aware sampling)
    CircleGrid dense(std::max(4 * static_cast<int>(grid.zeta.size()),
                              16 * static_cast<int>(st.best_coeffs.size())));
    if (circle_margin(domain, z, st.best_coeffs, dense) > -0.5 * slack) {
        double s = radial_rescale(domain, z, st.best_coeffs, dense, slack);
        st.best_t *= (s > 0.0 ? s : 0.0);
    }
    if (st.best_t <= 0.0)
        throw std::runtime_error("kobayashi_upper: witness failed dense verification");

    std::vector<Point> full = st.best_coeffs;
    full.insert(full.begin(), z);
    const int full_degree = static_cast<int>(full.size()) - 1;
    MetricBound out;
    out.value = xi_norm / st.best_t;
    out.kind = BoundKind::Upper;
    out.method = method;
    out.witness_disc =
        AnalyticDisc(std::move(full), std::max({degree, kDefaultMaxDegree, full_degree}));
    return out;
}

MetricBound kobayashi_lower_inclusion(const DomainSpec& domain, const MetricQuery& q) {
    MetricBound inner;
    if (domain.kind() == DomainKind::Lempert) {
        inner = kobayashi_exact_model(DomainSpec::polydisc({2.0, 2.0}), q);
        inner.method = "inclusion in polydisc(2,2)";
    } else {
        double R = domain.circumscribing_radius();
        MetricQuery scaled_q;
        scaled_q.point = scaled(q.point, 1.0 / R);
        scaled_q.direction = scaled(q.direction, 1.0 / R);
        inner = kobayashi_exact_model(DomainSpec::ball(domain.dimension()), scaled_q);
        inner.method = "inclusion in ball radius " + std::to_string(R);
    }
    inner.kind = domain.kind() == DomainKind::Ball ? BoundKind::Exact : BoundKind::Lower;
    return inner;
}

// ---------------------------------------------------------------------------
// Caratheodory side

double linear_functional_sup(const DomainSpec& domain, const std::vector<cplx>& c) {
    require_dimension(static_cast<std::size_t>(domain.dimension()), c.size(),
                      "linear_functional_sup");
    switch (domain.kind()) {
        case DomainKind::Ball: {
            double s = 0.0;
            for (const cplx& v : c) s += std::norm(v);
            return std::sqrt(s);
        }
        case DomainKind::Polydisc: {
            double s = 0.0;
            for (int j = 0; j < domain.dimension(); ++j)
                s += domain.radii()[j] * std::abs(c[j]);
            return s;
        }
        case DomainKind::StretchedBall:
            return std::sqrt(std::norm(c[0]) +
                             domain.stretch() * domain.stretch() * std::norm(c[1]));
        case DomainKind::Lempert: {
            double a = std::abs(c[0]), b = std::abs(c[1]);
            double e = domain.epsilon();
            // |c1 z + c2 w| maximized with aligned phases; h(|z|) = a|z| + b eps/|z|
            // is convex, so the max sits at an endpoint of |z| in [eps/2, 2].
            return std::max(2.0 * a + (e / 2.0) * b, (e / 2.0) * a + 2.0 * b);
        }
        case DomainKind::Egg: {
            if (domain.dimension() != 2)
                throw std::invalid_argument("linear_functional_sup: egg implemented for n=2");
            double a = std::abs(c[0]), b = std::abs(c[1]);
            int m1 = domain.exponents()[0], m2 = domain.exponents()[1];
            // maximize a*u^{1/2} + b*v^{1/2} on u^{m1} + v^{m2} = 1, u,v >= 0.
            // Concave in u after eliminating v; golden-section to 1e-14.
            auto val = [&](double u) {
                double rem = 1.0 - std::pow(u, m1);
                if (rem < 0.0) rem = 0.0;
                double v = std::pow(rem, 1.0 / m2);
                return a * std::sqrt(u) + b * std::sqrt(v);
            };
            double lo = 0.0, hi = 1.0;
            const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
            double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
            double f1 = val(x1), f2 = val(x2);
            for (int it = 0; it < 200; ++it) {
                if (f1 < f2) {
                    lo = x1; x1 = x2; f1 = f2;
                    x2 = lo + phi * (hi - lo); f2 = val(x2);
                } else {
                    hi = x2; x2 = x1; f2 = f1;
                    x1 = hi - phi * (hi - lo); f1 = val(x1);
                }
            }
            // pad by one ulp-scale factor so the normalized functional stays
            // inside the closed disc
            return std::max({val(lo), val(hi), f1, f2}) * (1.0 + 1e-12);
        }
    }
    return 0.0;
}

cplx candidate_evaluate(const CandidateMap& map, const Point& w) {
    switch (map.family) {
        case CandidateFamily::LinearFunctionalMobius: {
            const std::size_t n = w.size();
            cplx l = 0.0;
            for (std::size_t i = 0; i < n; ++i) l += map.parameters[i] * w[i];
            cplx w0 = map.parameters[n];
            double s = map.parameters[n + 1].real();
            cplx v = l / s;
            return (v - w0) / (1.0 - std::conj(w0) * v);
        }
        case CandidateFamily::BallAutomorphismComponent: {
            const std::size_t n = w.size();
            Point a(map.parameters.begin(), map.parameters.begin() + n);
            Point u(map.parameters.begin() + n, map.parameters.begin() + 2 * n);
            Point x = w;
            if (map.parameters.size() == 2 * n + 1) {
                double N = map.parameters[2 * n].real();  // stretched-ball transport
                x[1] /= N;
            }
            double na2 = norm_sq(a);
            double s = std::sqrt(1.0 - na2);
            cplx ip = hermitian_dot(x, a);
            Point num(n);
            if (na2 > 1e-15) {
                for (std::size_t i = 0; i < n; ++i) {
                    cplx p = (ip / na2) * a[i];
                    num[i] = a[i] - p - s * (x[i] - p);
                }
            } else {
                for (std::size_t i = 0; i < n; ++i) num[i] = -s * x[i];
            }
            cplx denom = 1.0 - ip;
            cplx out = 0.0;
            for (std::size_t i = 0; i < n; ++i) out += (num[i] / denom) * std::conj(u[i]);
            return out;
        }
        case CandidateFamily::EggAutomorphismComponent: {
            cplx alpha = map.parameters[0];
            double m = map.parameters[1].real();
            cplx base = std::sqrt(1.0 - std::norm(alpha)) / (1.0 - std::conj(alpha) * w[0]);
            return w[1] * std::pow(base, 1.0 / m);
        }
    }
    return 0.0;
}

cplx candidate_derivative(const CandidateMap& map, const Point& z, const Direction& xi) {
    // analytic directional derivative d/dt f(z + t xi) at t = 0
    switch (map.family) {
        case CandidateFamily::LinearFunctionalMobius: {
            const std::size_t n = z.size();
            cplx lz = 0.0, lxi = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                lz += map.parameters[i] * z[i];
                lxi += map.parameters[i] * xi[i];
            }
            cplx w0 = map.parameters[n];
            double s = map.parameters[n + 1].real();
            cplx v = lz / s;
            cplx denom = 1.0 - std::conj(w0) * v;
            return (lxi / s) * (1.0 - std::norm(w0)) / (denom * denom);
        }
        case CandidateFamily::BallAutomorphismComponent: {
            // phi_a(w) = (a - Pw - sQw) / (1 - <w,a>) with P the projection
            // onto a and s = sqrt(1 - |a|^2); quotient rule at arbitrary z.
            const std::size_t n = z.size();
            Point a(map.parameters.begin(), map.parameters.begin() + n);
            Point u(map.parameters.begin() + n, map.parameters.begin() + 2 * n);
            Point x = z, v = xi;
            if (map.parameters.size() == 2 * n + 1) {
                double N = map.parameters[2 * n].real();
                x[1] /= N;
                v[1] /= N;
            }
            double na2 = norm_sq(a);
            double s = std::sqrt(1.0 - na2);
            auto M = [&](const Point& w, std::size_t i) {
                cplx p = na2 > 1e-15 ? (hermitian_dot(w, a) / na2) * a[i] : cplx(0.0);
                return p + s * (w[i] - p);
            };
            cplx D = 1.0 - hermitian_dot(x, a);
            cplx ia = hermitian_dot(v, a);
            cplx out = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                cplx L = a[i] - M(x, i);
                out += (-M(v, i) / D + L * ia / (D * D)) * std::conj(u[i]);
            }
            return out;
        }
        case CandidateFamily::EggAutomorphismComponent: {
            cplx alpha = map.parameters[0];
            double m = map.parameters[1].real();
            cplx d = 1.0 - std::conj(alpha) * z[0];
            cplx g = std::pow(std::sqrt(1.0 - std::norm(alpha)) / d, 1.0 / m);
            cplx gp = g * (std::conj(alpha) / (m * d));
            return z[1] * gp * xi[0] + g * xi[1];
        }
    }
    return 0.0;
}

namespace {

MetricBound functional_bound(const DomainSpec& domain, const MetricQuery& q,
                             const std::vector<cplx>& c, const std::string& label) {
    double s = linear_functional_sup(domain, c);
    MetricBound out;
    out.kind = BoundKind::Lower;
    out.method = label;
    if (!(s > 0.0)) return out;
    cplx lz = 0.0, lxi = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        lz += c[i] * q.point[i];
        lxi += c[i] * q.direction[i];
    }
    double denom = s * s - std::norm(lz);
    if (denom <= 0.0) return out;
    out.value = std::abs(lxi) * s / denom;
    CandidateMap w;
    w.family = CandidateFamily::LinearFunctionalMobius;
    w.parameters = c;
    w.parameters.push_back(lz / s);
    w.parameters.push_back(cplx(s, 0.0));
    out.witness_map = std::move(w);
    return out;
}

}  // namespace

MetricBound caratheodory_lower(const DomainSpec& domain, const MetricQuery& q,
                               const OptimizerBudget& budget) {
    require_dimension(static_cast<std::size_t>(domain.dimension()), q.point.size(),
                      "caratheodory_lower");
    if (!domain.contains(q.point))
        throw std::domain_error("caratheodory_lower: point not interior");
    const int n = domain.dimension();
    const double xi_norm = euclid_norm(q.direction);

    MetricBound best;
    best.kind = BoundKind::Lower;
    best.method = "zero map";
    best.value = 0.0;

    auto consider = [&](MetricBound b) {
        if (b.value > best.value) best = std::move(b);
    };

    // exact automorphism-component families
    if (domain.kind() == DomainKind::Ball || domain.kind() == DomainKind::StretchedBall) {
        double N = domain.kind() == DomainKind::StretchedBall ? domain.stretch() : 1.0;
        Point a = q.point;
        Direction xi = q.direction;
        if (domain.kind() == DomainKind::StretchedBall) {
            a[1] /= N;
            xi[1] /= N;
        }
        // value |phi_a'(a) xi| with the pairing direction chosen optimally
        double na2 = norm_sq(a);
        double s2 = 1.0 - na2;
        Point img(n);
        for (int i = 0; i < n; ++i) {
            cplx p = na2 > 1e-15 ? (hermitian_dot(xi, a) / na2) * a[i] : cplx(0.0);
            img[i] = -(p / s2) - (xi[i] - p) / std::sqrt(s2);
        }
        double v = euclid_norm(img);
        MetricBound b;
        b.kind = BoundKind::Lower;
        b.value = v;
        b.method = domain.kind() == DomainKind::Ball ? "ball-automorphism component"
                                                     : "stretched-ball transported component";
        CandidateMap w;
        w.family = CandidateFamily::BallAutomorphismComponent;
        w.parameters = std::vector<cplx>(a.begin(), a.end());
        Point u = v > 0.0 ? scaled(img, 1.0 / v) : Point(n, 0.0);
        w.parameters.insert(w.parameters.end(), u.begin(), u.end());
        if (domain.kind() == DomainKind::StretchedBall) w.parameters.push_back(cplx(N, 0.0));
        b.witness_map = std::move(w);
        consider(std::move(b));
    }

    // egg automorphism component at (z1, 0)
    if (domain.kind() == DomainKind::Egg && n == 2 && std::abs(q.point[1]) < 1e-14) {
        int m = domain.exponents()[1];
        cplx alpha = q.point[0];
        CandidateMap w;
        w.family = CandidateFamily::EggAutomorphismComponent;
        w.parameters = {alpha, cplx(static_cast<double>(m), 0.0)};
        MetricBound b;
        b.kind = BoundKind::Lower;
        b.value = std::abs(candidate_derivative(w, q.point, q.direction));
        b.method = "egg-automorphism component";
        b.witness_map = std::move(w);
        consider(std::move(b));
    }

    // coordinate functionals (always valid; exact sup per kind)
    for (int j = 0; j < n; ++j) {
        std::vector<cplx> c(n, 0.0);
        c[j] = 1.0;
        consider(functional_bound(domain, q, c, "coordinate functional"));
    }

    // Nelder-Mead over the functional direction c (scale-invariant)
    std::mt19937_64 rng(budget.seed ^ 0x9e3779b97f4a7c15ull);
    auto objective = [&](const std::vector<double>& x) {
        std::vector<cplx> c(n);
        double nrm = 0.0;
        for (int i = 0; i < n; ++i) {
            c[i] = cplx(x[i], x[n + i]);
            nrm += std::norm(c[i]);
        }
        if (nrm < 1e-18) return 0.0;
        MetricBound b = functional_bound(domain, q, c, "nm functional");
        return -b.value;
    };
    std::vector<double> start(2 * n, 0.0);
    for (int i = 0; i < n; ++i) {
        start[i] = std::conj(q.direction[i]).real();
        start[n + i] = std::conj(q.direction[i]).imag();
    }
    for (int rs = 0; rs < std::max(1, budget.restarts / 2); ++rs) {
        std::vector<double> x0 = start;
        if (rs > 0)
            for (double& v : x0) v += 0.5 * gaussian(rng);
        NelderMeadResult res =
            nelder_mead(objective, x0, std::vector<double>(2 * n, 0.3), budget.max_iterations);
        std::vector<cplx> c(n);
        for (int i = 0; i < n; ++i) c[i] = cplx(res.x[i], res.x[n + i]);
        consider(functional_bound(domain, q, c, "optimized functional"));
    }

    (void)xi_norm;
    return best;
}

EggDirectionBounds egg_direction_bounds(int m, double alpha, EggDirection direction) {
    if (!(alpha >= 0.0 && alpha < 1.0))
        throw std::invalid_argument("egg_direction_bounds: alpha outside [0,1)");
    if (m < 1) throw std::invalid_argument("egg_direction_bounds: m must be positive");
    DomainSpec egg = DomainSpec::egg({1, m});
    Point z{cplx(alpha, 0.0), 0.0};
    EggDirectionBounds out;
    if (direction == EggDirection::Normal) {
        double v = 1.0 / (1.0 - alpha * alpha);
        // lower: first-coordinate Mobius functional
        MetricQuery q{z, {1.0, 0.0}};
        out.lower = functional_bound(egg, q, {1.0, 0.0}, "first-coordinate mobius");
        // upper: the z1-slice Mobius disc, exact in the limit; the truncated
        // witness is rescaled to strict feasibility (value stays closed form)
        out.upper.value = v;
        out.upper.kind = BoundKind::Upper;
        out.upper.method = "slice mobius disc (closed form)";
        std::vector<Point> coeffs(kDefaultMaxDegree, Point(2, 0.0));
        double s2 = 1.0 - alpha * alpha;
        double ap = 1.0;
        for (int k = 1; k <= kDefaultMaxDegree; ++k) {
            coeffs[k - 1][0] = s2 * ap;
            ap *= -alpha;
        }
        CircleGrid grid(8 * kDefaultMaxDegree);
        radial_rescale(egg, z, coeffs, grid, 1e-9);
        coeffs.insert(coeffs.begin(), z);
        out.upper.witness_disc = AnalyticDisc(coeffs);
        return out;
    }
    double v = std::pow(1.0 - alpha * alpha, -1.0 / (2.0 * m));
    out.upper.value = v;
    out.upper.kind = BoundKind::Upper;
    out.upper.method = "linear tangential disc (closed form)";
    {
        std::vector<Point> coeffs(2, Point(2, 0.0));
        coeffs[0] = z;
        coeffs[1][1] = std::pow(1.0 - alpha * alpha, 1.0 / (2.0 * m)) * (1.0 - 1e-9);
        out.upper.witness_disc = AnalyticDisc(coeffs);
    }
    out.lower.value = v;
    out.lower.kind = BoundKind::Lower;
    out.lower.method = "egg-automorphism component";
    CandidateMap w;
    w.family = CandidateFamily::EggAutomorphismComponent;
    w.parameters = {cplx(alpha, 0.0), cplx(static_cast<double>(m), 0.0)};
    out.lower.witness_map = std::move(w);
    return out;
}

ComparabilityReport direction_comparability_report(const DomainSpec& domain, const Point& P,
                                                   const Direction& xi1, const Direction& xi2,
                                                   const OptimizerBudget& budget,
                                                   double delta_compact) {
    if (std::abs(euclid_norm(xi1) - 1.0) > 1e-9 || std::abs(euclid_norm(xi2) - 1.0) > 1e-9)
        throw std::invalid_argument("direction_comparability_report: directions must be unit");
    if (domain.boundary_distance(P) < delta_compact)
        throw std::domain_error(
            "direction_comparability_report: point outside the configured compact subset");
    ComparabilityReport rep;
    rep.bound1 = caratheodory_lower(domain, {P, xi1}, budget);
    rep.bound2 = caratheodory_lower(domain, {P, xi2}, budget);
    rep.difference = std::abs(rep.bound1.value - rep.bound2.value);
    return rep;
}

}  // namespace kobmetric
