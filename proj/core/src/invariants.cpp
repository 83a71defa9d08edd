#include "kobmetric/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "kobmetric/metrics.hpp"
#include "kobmetric/optimize.hpp"
#include "rng_util.hpp"

namespace kobmetric {

namespace {

constexpr double kContainmentSlack = 1e-4;
constexpr int kBoundarySamples = 4096;

// deterministic boundary sample of a balanced domain: gaussian directions
// normalized by the Minkowski gauge
std::vector<Point> boundary_sample(const DomainSpec& dom, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<Point> out;
    out.reserve(count);
    const int n = dom.dimension();
    while (static_cast<int>(out.size()) < count) {
        Point w = detail::gaussian_point(rng, n);
        double g = dom.gauge(w);
        if (g < 1e-9) continue;
        out.push_back(scaled(w, 1.0 / g));
    }
    return out;
}

std::vector<Point> sphere_sample(int n, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<Point> out;
    out.reserve(count);
    while (static_cast<int>(out.size()) < count) {
        Point w = detail::gaussian_point(rng, n);
        double g = euclid_norm(w);
        if (g < 1e-9) continue;
        out.push_back(scaled(w, 1.0 / g));
    }
    return out;
}

// distinguished-boundary (torus) sample of a polydisc
std::vector<Point> torus_sample(const std::vector<double>& radii, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<Point> out;
    out.reserve(count);
    const int n = static_cast<int>(radii.size());
    for (int s = 0; s < count; ++s) {
        Point w(n);
        for (int j = 0; j < n; ++j)
            w[j] = std::polar(radii[j], 2.0 * M_PI * detail::uniform01(rng));
        out.push_back(std::move(w));
    }
    return out;
}

// small dense complex matrices, row-major
using Matrix = std::vector<cplx>;  // n*n entries

Point mat_apply(const Matrix& A, const Point& w) {
    const int n = static_cast<int>(w.size());
    Point out(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out[i] += A[i * n + j] * w[j];
    return out;
}

cplx det(const Matrix& A, int n) {
    if (n == 1) return A[0];
    if (n == 2) return A[0] * A[3] - A[1] * A[2];
    if (n == 3)
        return A[0] * (A[4] * A[8] - A[5] * A[7]) - A[1] * (A[3] * A[8] - A[5] * A[6]) +
               A[2] * (A[3] * A[7] - A[4] * A[6]);
    throw std::invalid_argument("det: dimension above 3");
}

Matrix unpack_matrix(const std::vector<double>& x, int n) {
    Matrix A(n * n);
    for (int k = 0; k < n * n; ++k) A[k] = cplx(x[k], x[n * n + k]);
    return A;
}

std::vector<double> pack_matrix(const Matrix& A, int n) {
    std::vector<double> x(2 * n * n);
    for (int k = 0; k < n * n; ++k) {
        x[k] = A[k].real();
        x[n * n + k] = A[k].imag();
    }
    return x;
}

// |det phi_a'(a)| = (1 - |a|^2)^{-(n+1)/2}; |det phi_a'(0)| = (1 - |a|^2)^{(n+1)/2}
double ball_det_at_center(const Point& a) {
    double s2 = 1.0 - norm_sq(a);
    return std::pow(s2, -(static_cast<double>(a.size()) + 1.0) / 2.0);
}

// ---------------------------------------------------------------------------
// certified diagonal scalings for Egg(1, m)

// sup of p^2 u + q^2 v subject to u + v^m <= 1, u, v >= 0 (map egg -> ball)
double egg_to_ball_sup(double p, double q, int m) {
    auto h = [&](double v) { return p * p * (1.0 - std::pow(v, m)) + q * q * v; };
    double worst = std::max(h(0.0), h(1.0));
    if (m >= 2 && p > 0.0) {
        double vs = std::pow(q * q / (m * p * p), 1.0 / (m - 1));
        if (vs > 0.0 && vs < 1.0) worst = std::max(worst, h(vs));
    }
    return worst;
}

// sup of p^2 u + q^{2m} v^m subject to u + v <= 1 (map ball -> egg)
double ball_to_egg_sup(double p, double q, int m) {
    double q2m = std::pow(q, 2 * m);
    auto g = [&](double v) { return p * p * (1.0 - v) + q2m * std::pow(v, m); };
    double worst = std::max(g(0.0), g(1.0));
    if (m >= 2 && q2m > 0.0) {
        double vs = std::pow(p * p / (m * q2m), 1.0 / (m - 1));
        if (vs > 0.0 && vs < 1.0) worst = std::max(worst, g(vs));
    }
    return worst;
}

// largest q with sup(p, q) <= 1, monotone in q
template <typename Sup>
double max_q(Sup&& sup, double p) {
    if (sup(p, 0.0) > 1.0) return 0.0;
    double lo = 0.0, hi = 1.0;
    while (sup(p, hi) <= 1.0 && hi < 64.0) hi *= 2.0;
    for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        (sup(p, mid) <= 1.0 ? lo : hi) = mid;
    }
    return lo;
}

struct DiagResult {
    double p = 0.0, q = 0.0, det = 0.0;
};

// certified brute force over diagonal scalings: grid step 1e-3, then golden
// refinement around the best cell
template <typename Sup>
DiagResult diag_brute_force(Sup&& sup) {
    DiagResult best;
    const double step = 1e-3;
    for (double p = step; p <= 1.0 + 1e-12; p += step) {
        double q = max_q(sup, p);
        if (p * q > best.det) best = {p, q, p * q};
    }
    double lo = std::max(step, best.p - 2.0 * step), hi = std::min(1.0, best.p + 2.0 * step);
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    auto val = [&](double p) { return p * max_q(sup, p); };
    double f1 = val(x1), f2 = val(x2);
    for (int it = 0; it < 80; ++it) {
        if (f1 < f2) {
            lo = x1; x1 = x2; f1 = f2;
            x2 = lo + phi * (hi - lo); f2 = val(x2);
        } else {
            hi = x2; x2 = x1; f2 = f1;
            x1 = hi - phi * (hi - lo); f1 = val(x1);
        }
    }
    double pm = 0.5 * (lo + hi), qm = max_q(sup, pm);
    if (pm * qm > best.det) best = {pm, qm, pm * qm};
    return best;
}

// ---------------------------------------------------------------------------
// generic affine candidates with sampled containment

// scale-invariant objective |det A| / sigma(A)^n maximized by multistart
// Nelder-Mead; sigma is the sampled sup of the target gauge of A(w - z).
struct AffineBest {
    double value = 0.0;
    Matrix map;  // already normalized to the sampled containment
    double margin = 0.0;
};

// exploration uses the coarse containment sup; the winning matrix is
// re-normalized and valued against the fine (4096-sample) sup
AffineBest maximize_scale_invariant(int n, const std::function<double(const Matrix&)>& sigma_coarse,
                                    const std::function<double(const Matrix&)>& sigma_fine,
                                    const OptimizerBudget& budget, int starts,
                                    std::uint64_t seed_salt) {
    std::mt19937_64 rng(budget.seed ^ seed_salt);
    auto ratio = [&](const Matrix& A) {
        double sg = sigma_coarse(A);
        if (!(sg > 1e-12)) return 0.0;
        return std::abs(det(A, n)) / std::pow(sg, n);
    };
    auto objective = [&](const std::vector<double>& x) { return -ratio(unpack_matrix(x, n)); };
    Matrix eye(n * n, 0.0);
    for (int i = 0; i < n; ++i) eye[i * n + i] = 1.0;
    Matrix best_dir = eye;
    double best_coarse = ratio(eye);
    const int iters = std::min(budget.max_iterations, 200);
    for (int s = 0; s < starts; ++s) {
        std::vector<double> x0 = pack_matrix(eye, n);
        if (s > 0)
            for (double& v : x0) v = 0.7 * v + 0.6 * detail::gaussian(rng);
        NelderMeadResult res =
            nelder_mead(objective, x0, std::vector<double>(2 * n * n, 0.3), iters);
        Matrix A = unpack_matrix(res.x, n);
        double r = ratio(A);
        if (r > best_coarse) {
            best_coarse = r;
            best_dir = std::move(A);
        }
    }
    AffineBest best;
    double sg = sigma_fine(best_dir) * (1.0 + kContainmentSlack);
    if (sg > 1e-12) {
        best.value = std::abs(det(best_dir, n)) / std::pow(sg, n);
        for (auto& e : best_dir) e /= sg;
        best.map = std::move(best_dir);
    }
    return best;
}

HolomorphicMapSample affine_witness(const Point& z, const Matrix& A, double margin) {
    HolomorphicMapSample w;
    w.family = "affine-linear";
    w.parameters = std::vector<cplx>(z.begin(), z.end());
    w.parameters.insert(w.parameters.end(), A.begin(), A.end());
    w.containment_margin = margin;
    return w;
}

// largest s with z + s*B*w inside the domain for all sampled w; always
// re-verified after the bisection, so a non-monotone sampled margin can only
// make the result conservative
double affine_scale_max(const DomainSpec& dom, const Point& z, const Matrix& B,
                        const std::vector<Point>& sample, int iterations = 30) {
    auto margin = [&](double s) {
        double worst = -std::numeric_limits<double>::infinity();
        for (const Point& w : sample) {
            Point img = mat_apply(B, w);
            for (std::size_t i = 0; i < img.size(); ++i) img[i] = z[i] + s * img[i];
            worst = std::max(worst, dom.defining_value(img));
        }
        return worst;
    };
    auto ok = [&](double s) { return margin(s) <= -kContainmentSlack; };
    if (!ok(0.0)) return 0.0;
    double hi = 1.0;
    while (ok(hi) && hi < 1e3) hi *= 2.0;
    double s = bisect_largest(ok, 0.0, hi, iterations);
    return ok(s) ? s : 0.0;
}

}  // namespace

// ---------------------------------------------------------------------------

std::pair<double, HolomorphicMapSample> c_lower(const DomainSpec& domain, const Point& z,
                                                const OptimizerBudget& budget) {
    require_dimension(static_cast<std::size_t>(domain.dimension()), z.size(), "c_lower");
    if (!domain.contains(z)) throw std::domain_error("c_lower: point not interior");
    const int n = domain.dimension();

    switch (domain.kind()) {
        case DomainKind::Ball: {
            HolomorphicMapSample w;
            w.family = "ball-automorphism";
            w.parameters = std::vector<cplx>(z.begin(), z.end());
            return {ball_det_at_center(z), std::move(w)};
        }
        case DomainKind::StretchedBall: {
            double N = domain.stretch();
            Point a{z[0], z[1] / N};
            HolomorphicMapSample w;
            w.family = "transported-automorphism";
            w.parameters = {a[0], a[1], cplx(N, 0.0)};
            return {ball_det_at_center(a) / N, std::move(w)};
        }
        case DomainKind::Polydisc: {
            // product Mobius to the unit polydisc, then the 1/sqrt(n) scaling
            // into the ball; certified feasible, diagonal-optimal scaling
            double value = std::pow(static_cast<double>(n), -n / 2.0);
            HolomorphicMapSample w;
            w.family = "product-mobius-scaled";
            for (int j = 0; j < n; ++j) {
                double r = domain.radii()[j];
                double a2 = std::norm(z[j] / r);
                value /= r * (1.0 - a2);
                w.parameters.push_back(z[j]);
            }
            w.parameters.push_back(cplx(1.0 / std::sqrt(static_cast<double>(n)), 0.0));
            return {value, std::move(w)};
        }
        case DomainKind::Egg: {
            if (n == 2 && euclid_norm(z) < 1e-14) {
                int m = domain.exponents()[1];
                if (domain.exponents()[0] != 1)
                    break;  // fall through to the generic affine path below
                DiagResult d =
                    diag_brute_force([&](double p, double q) { return egg_to_ball_sup(p, q, m); });
                HolomorphicMapSample w;
                w.family = "diagonal-linear";
                w.parameters = {cplx(d.p, 0.0), cplx(d.q, 0.0)};
                return {d.det, std::move(w)};
            }
            break;
        }
        case DomainKind::Lempert:
            break;
    }

    // generic affine candidate A(w - z), containment by boundary sampling
    std::vector<Point> bd_coarse = boundary_sample(domain, 256, budget.seed ^ 0xc0ffee);
    std::vector<Point> bd_fine = boundary_sample(domain, kBoundarySamples, budget.seed ^ 0xc0ffee);
    auto sigma_over = [&](const std::vector<Point>& bd) {
        return std::function<double(const Matrix&)>([&bd, &z](const Matrix& A) {
            double worst = 0.0;
            for (const Point& w : bd)
                worst = std::max(worst, euclid_norm(mat_apply(A, subtracted(w, z))));
            return worst;
        });
    };
    AffineBest best = maximize_scale_invariant(n, sigma_over(bd_coarse), sigma_over(bd_fine),
                                               budget, std::max(1, budget.restarts), 0x11aa);
    return {best.value, affine_witness(z, best.map, -kContainmentSlack)};
}

std::pair<double, HolomorphicMapSample> k_upper(const DomainSpec& domain, const Point& z,
                                                const OptimizerBudget& budget) {
    require_dimension(static_cast<std::size_t>(domain.dimension()), z.size(), "k_upper");
    if (!domain.contains(z)) throw std::domain_error("k_upper: point not interior");
    const int n = domain.dimension();

    switch (domain.kind()) {
        case DomainKind::Ball: {
            HolomorphicMapSample w;
            w.family = "ball-automorphism";
            w.parameters = std::vector<cplx>(z.begin(), z.end());
            return {ball_det_at_center(z), std::move(w)};
        }
        case DomainKind::StretchedBall: {
            double N = domain.stretch();
            Point a{z[0], z[1] / N};
            HolomorphicMapSample w;
            w.family = "transported-automorphism";
            w.parameters = {a[0], a[1], cplx(N, 0.0)};
            return {ball_det_at_center(a) / N, std::move(w)};
        }
        case DomainKind::Polydisc: {
            double inv_det = 1.0;
            HolomorphicMapSample w;
            w.family = "product-mobius-scaled";
            for (int j = 0; j < n; ++j) {
                double r = domain.radii()[j];
                double a2 = std::norm(z[j] / r);
                inv_det /= r * (1.0 - a2);
                w.parameters.push_back(z[j]);
            }
            w.parameters.push_back(cplx(1.0, 0.0));
            return {inv_det, std::move(w)};
        }
        case DomainKind::Egg: {
            if (n == 2 && euclid_norm(z) < 1e-14 && domain.exponents()[0] == 1) {
                int m = domain.exponents()[1];
                DiagResult d =
                    diag_brute_force([&](double p, double q) { return ball_to_egg_sup(p, q, m); });
                HolomorphicMapSample w;
                w.family = "diagonal-linear";
                w.parameters = {cplx(d.p, 0.0), cplx(d.q, 0.0)};
                return {1.0 / d.det, std::move(w)};
            }
            break;
        }
        case DomainKind::Lempert:
            break;
    }

    // generic affine candidate z + B w on the unit ball, scale by bisection;
    // coarse sample drives the search, the full sample fixes the final scale
    std::vector<Point> sph_coarse = sphere_sample(n, 256, budget.seed ^ 0xbeef);
    std::vector<Point> sph_fine = sphere_sample(n, kBoundarySamples, budget.seed ^ 0xbeef);
    std::mt19937_64 rng(budget.seed ^ 0x5eed);
    double r0 = std::max(domain.boundary_distance(z), 1e-6);
    Matrix eye(n * n, 0.0);
    for (int i = 0; i < n; ++i) eye[i * n + i] = r0;
    auto value_of = [&](const Matrix& B) {
        double s = affine_scale_max(domain, z, B, sph_coarse, 24);
        return std::abs(det(B, n)) * std::pow(s, n);
    };
    Matrix best_dir = eye;
    double best_value = value_of(eye);
    auto objective = [&](const std::vector<double>& x) {
        return -value_of(unpack_matrix(x, n));
    };
    for (int s = 0; s < std::max(1, budget.restarts); ++s) {
        std::vector<double> x0 = pack_matrix(best_dir, n);
        if (s > 0)
            for (double& v : x0) v = v * (1.0 + 0.3 * detail::gaussian(rng)) +
                                     0.2 * r0 * detail::gaussian(rng);
        NelderMeadResult res =
            nelder_mead(objective, x0, std::vector<double>(2 * n * n, 0.3 * r0),
                        std::min(budget.max_iterations, 200));
        Matrix B = unpack_matrix(res.x, n);
        double v = value_of(B);
        if (v > best_value) {
            best_value = v;
            best_dir = std::move(B);
        }
    }
    double s_max = affine_scale_max(domain, z, best_dir, sph_fine, 40);
    best_value = std::abs(det(best_dir, n)) * std::pow(s_max, n);
    Matrix final = best_dir;
    for (auto& e : final) e *= s_max;
    if (!(best_value > 0.0)) throw std::runtime_error("k_upper: no feasible candidate found");
    return {1.0 / best_value, affine_witness(z, final, -kContainmentSlack)};
}

VolumeInvariantEstimate quotient_upper(const DomainSpec& domain, const Point& z,
                                       const OptimizerBudget& budget) {
    auto [c, cw] = c_lower(domain, z, budget);
    auto [k, kw] = k_upper(domain, z, budget);
    VolumeInvariantEstimate est;
    est.c_lower = c;
    est.k_upper = k;
    est.m_upper = k / c;
    est.c_witness = std::move(cw);
    est.k_witness = std::move(kw);
    switch (domain.kind()) {
        case DomainKind::Ball:
        case DomainKind::StretchedBall:
            est.exact = true;
            est.method = "automorphism witnesses (simultaneously optimal)";
            break;
        case DomainKind::Polydisc:
            est.method = "product-mobius witnesses";
            break;
        default:
            est.method = euclid_norm(z) < 1e-14 && domain.kind() == DomainKind::Egg
                             ? "certified diagonal scalings"
                             : "affine candidates, sampled containment";
            break;
    }
    return est;
}

// ---------------------------------------------------------------------------

int PolyMap2::degree1() const {
    int d = 0;
    for (const auto& comp : coefficients)
        d = std::max(d, static_cast<int>(comp.size()) - 1);
    return d;
}

int PolyMap2::degree2() const {
    int d = 0;
    for (const auto& comp : coefficients)
        for (const auto& row : comp) d = std::max(d, static_cast<int>(row.size()) - 1);
    return d;
}

std::array<cplx, 2> PolyMap2::evaluate(cplx z1, cplx z2) const {
    std::array<cplx, 2> out{0.0, 0.0};
    for (int j = 0; j < 2; ++j) {
        cplx p1 = 1.0;
        for (const auto& row : coefficients[j]) {
            cplx p2 = 1.0;
            for (const cplx& c : row) {
                out[j] += c * p1 * p2;
                p2 *= z2;
            }
            p1 *= z1;
        }
    }
    return out;
}

std::array<cplx, 2> circular_average(const PolyMap2& map, int nodes) {
    int deg = std::max(map.degree1(), map.degree2());
    int need = deg + 2;
    if (nodes == 0) nodes = need;
    if (nodes < need)
        throw std::invalid_argument(
            "circular_average: node count below the Nyquist requirement for this degree");
    std::array<cplx, 2> out{0.0, 0.0};
    const double inv = 1.0 / (static_cast<double>(nodes) * nodes);
    for (int s = 0; s < nodes; ++s) {
        cplx w1 = std::polar(1.0, 2.0 * M_PI * s / nodes);
        for (int t = 0; t < nodes; ++t) {
            cplx w2 = std::polar(1.0, 2.0 * M_PI * t / nodes);
            std::array<cplx, 2> f = map.evaluate(w1, w2);
            out[0] += f[0] * std::conj(w1) * inv;  // weight e^{-i theta_1}
            out[1] += f[1] * std::conj(w2) * inv;  // weight e^{-i theta_2}
        }
    }
    return out;
}

VolumeInvariantEstimate circular_center_exact(const DomainSpec& egg) {
    if (egg.kind() != DomainKind::Egg || egg.dimension() != 2 || egg.exponents()[0] != 1)
        throw std::invalid_argument("circular_center_exact: expected Egg(1, m)");
    const int m = egg.exponents()[1];
    VolumeInvariantEstimate est;
    est.exact = true;
    if (m == 1) {
        est.c_lower = est.k_upper = est.m_upper = 1.0;
        est.method = "ball case (m = 1)";
        est.c_witness.family = est.k_witness.family = "diagonal-linear";
        est.c_witness.parameters = est.k_witness.parameters = {1.0, 1.0};
        return est;
    }
    DiagResult dc =
        diag_brute_force([&](double p, double q) { return egg_to_ball_sup(p, q, m); });
    DiagResult dk =
        diag_brute_force([&](double p, double q) { return ball_to_egg_sup(p, q, m); });
    est.c_lower = dc.det;
    est.k_upper = 1.0 / dk.det;
    est.m_upper = est.k_upper / est.c_lower;
    est.c_witness.family = est.k_witness.family = "diagonal-linear";
    est.c_witness.parameters = {cplx(dc.p, 0.0), cplx(dc.q, 0.0)};
    est.k_witness.parameters = {cplx(dk.p, 0.0), cplx(dk.q, 0.0)};
    est.method = "diagonal brute force (certified, grid 1e-3 + refinement)";

    // general-linear multistart refinement, sampled containment: recorded for
    // comparison, never replaces the certified diagonal value
    OptimizerBudget budget;
    std::vector<Point> bd_coarse = boundary_sample(egg, 256, 0x99);
    std::vector<Point> bd_fine = boundary_sample(egg, kBoundarySamples, 0x99);
    std::vector<Point> sph_coarse = sphere_sample(2, 256, 0x77);
    std::vector<Point> sph_fine = sphere_sample(2, kBoundarySamples, 0x77);
    auto sigma_c_over = [&](const std::vector<Point>& bd) {
        return std::function<double(const Matrix&)>([&bd](const Matrix& A) {
            double worst = 0.0;
            for (const Point& w : bd) worst = std::max(worst, euclid_norm(mat_apply(A, w)));
            return worst;
        });
    };
    auto sigma_k_over = [&](const std::vector<Point>& sph) {
        return std::function<double(const Matrix&)>([&sph, &egg](const Matrix& B) {
            double worst = 0.0;
            for (const Point& w : sph) worst = std::max(worst, egg.gauge(mat_apply(B, w)));
            return worst;
        });
    };
    AffineBest rc = maximize_scale_invariant(2, sigma_c_over(bd_coarse), sigma_c_over(bd_fine),
                                             budget, 50, 0x1c);
    AffineBest rk = maximize_scale_invariant(2, sigma_k_over(sph_coarse), sigma_k_over(sph_fine),
                                             budget, 50, 0x1d);
    if (rc.value > dc.det + 1e-6 || rk.value > dk.det + 1e-6)
        est.method += "; general-linear refinement exceeded the diagonal value (sampled)";
    else
        est.method += "; general-linear refinement concurs";
    return est;
}

VolumeInvariantEstimate model_quotient(const DomainSpec& domain, const Point& z,
                                       const ModelSpec& model, const OptimizerBudget& budget) {
    if (model.model.kind() != DomainKind::Polydisc)
        throw std::invalid_argument("model_quotient: implemented for polydisc models only");
    for (const cplx& b : model.basepoint)
        if (std::abs(b) > 1e-14)
            throw std::invalid_argument("model_quotient: implemented for basepoint 0 only");
    const int n = domain.dimension();
    if (model.model.dimension() != n)
        throw dimension_mismatch("model_quotient: model and domain dimensions differ");
    if (n > 3) throw std::invalid_argument("model_quotient: dimension above 3");
    if (!domain.contains(z)) throw std::domain_error("model_quotient: point not interior");
    const std::vector<double>& R = model.model.radii();

    // hat-C side: phi = A(w - z) into the model polydisc. On a balanced domain
    // the image of a linear functional is a disc, so the per-row sup is exact:
    // sup |row_i (w - z)| = linear_functional_sup(row_i) + |row_i z|.
    auto row_sigma = [&](const Matrix& A, int i) {
        std::vector<cplx> row(A.begin() + i * n, A.begin() + (i + 1) * n);
        cplx at_z = 0.0;
        for (int j = 0; j < n; ++j) at_z += row[j] * z[j];
        return (linear_functional_sup(domain, row) + std::abs(at_z)) / R[i];
    };
    auto c_ratio = [&](const Matrix& A) {
        double denom = 1.0;
        for (int i = 0; i < n; ++i) {
            double sg = row_sigma(A, i);
            if (!(sg > 1e-12)) return 0.0;
            denom *= sg;
        }
        return std::abs(det(A, n)) / denom;
    };
    Matrix eye(n * n, 0.0);
    for (int i = 0; i < n; ++i) eye[i * n + i] = 1.0;
    double c_best = c_ratio(eye);
    Matrix c_map = eye;
    {
        std::mt19937_64 rng(budget.seed ^ 0xabcd);
        auto objective = [&](const std::vector<double>& x) {
            return -c_ratio(unpack_matrix(x, n));
        };
        for (int s = 0; s < 50; ++s) {
            std::vector<double> x0 = pack_matrix(eye, n);
            if (s > 0)
                for (double& v : x0) v = 0.7 * v + 0.6 * detail::gaussian(rng);
            NelderMeadResult res = nelder_mead(objective, x0, std::vector<double>(2 * n * n, 0.3),
                                               std::min(budget.max_iterations, 200));
            Matrix A = unpack_matrix(res.x, n);
            double r = c_ratio(A);
            if (r > c_best) {
                c_best = r;
                c_map = std::move(A);
            }
        }
        for (int i = 0; i < n; ++i) {
            double sg = row_sigma(c_map, i) * (1.0 + 1e-12);
            for (int j = 0; j < n; ++j) c_map[i * n + j] /= sg;
        }
    }

    // hat-K side: psi(w) = z + B w on the model polydisc; containment over the
    // distinguished boundary (maximum principle). Exact closed-form sups where
    // available, sampled torus otherwise.
    bool k_exact_sigma = true;
    std::vector<Point> torus;
    auto k_sigma = [&](const Matrix& B) -> double {
        switch (domain.kind()) {
            case DomainKind::Ball:
            case DomainKind::StretchedBall: {
                if (n != 2) break;
                // columns scaled by model radii, pulled back to the unit ball
                double N = domain.kind() == DomainKind::StretchedBall ? domain.stretch() : 1.0;
                Point c1{B[0] * R[0], B[2] * R[0] / N};
                Point c2{B[1] * R[1], B[3] * R[1] / N};
                double s2 = norm_sq(c1) + norm_sq(c2) + 2.0 * std::abs(hermitian_dot(c1, c2));
                return std::sqrt(s2);
            }
            case DomainKind::Polydisc: {
                double worst = 0.0;
                for (int i = 0; i < n; ++i) {
                    double row = 0.0;
                    for (int j = 0; j < n; ++j) row += std::abs(B[i * n + j]) * R[j];
                    worst = std::max(worst, row / domain.radii()[i]);
                }
                return worst;
            }
            default:
                break;
        }
        if (torus.empty()) torus = torus_sample(R, kBoundarySamples, budget.seed ^ 0x70);
        double worst = 0.0;
        for (const Point& w : torus) worst = std::max(worst, domain.gauge(mat_apply(B, w)));
        return worst;
    };
    if (domain.kind() == DomainKind::Egg || domain.kind() == DomainKind::Lempert ||
        (domain.kind() == DomainKind::Ball && n != 2))
        k_exact_sigma = false;
    bool centered = true;
    for (const cplx& v : z)
        if (std::abs(v) > 1e-14) centered = false;

    double k_best = 0.0;
    Matrix k_map = eye;
    if (centered) {
        if (n == 2 && (domain.kind() == DomainKind::Ball ||
                       domain.kind() == DomainKind::StretchedBall)) {
            // provably optimal: |det B| <= N/2 under the exact column bound
            double N = domain.kind() == DomainKind::StretchedBall ? domain.stretch() : 1.0;
            k_best = N / (2.0 * R[0] * R[1]);
            k_map = {cplx(1.0 / (std::sqrt(2.0) * R[0]), 0.0), 0.0, 0.0,
                     cplx(N / (std::sqrt(2.0) * R[1]), 0.0)};
        } else {
            auto k_ratio = [&](const Matrix& B) {
                double sg = k_sigma(B);
                if (!(sg > 1e-12)) return 0.0;
                return std::abs(det(B, n)) / std::pow(sg, n);
            };
            std::mt19937_64 rng(budget.seed ^ 0xdcba);
            k_best = k_ratio(eye);
            auto objective = [&](const std::vector<double>& x) {
                return -k_ratio(unpack_matrix(x, n));
            };
            for (int s = 0; s < 50; ++s) {
                std::vector<double> x0 = pack_matrix(eye, n);
                if (s > 0)
                    for (double& v : x0) v = 0.7 * v + 0.6 * detail::gaussian(rng);
                NelderMeadResult res = nelder_mead(
                    objective, x0, std::vector<double>(2 * n * n, 0.3), std::min(budget.max_iterations, 200));
                Matrix B = unpack_matrix(res.x, n);
                double r = k_ratio(B);
                if (r > k_best) {
                    k_best = r;
                    k_map = std::move(B);
                }
            }
            double sg = k_sigma(k_map) * (1.0 + (k_exact_sigma ? 1e-12 : kContainmentSlack));
            for (auto& e : k_map) e /= sg;
        }
    } else {
        // off-center: scale psi = z + s B w by bisection on the sampled margin
        std::vector<Point> torus_coarse = torus_sample(R, 256, budget.seed ^ 0x71);
        if (torus.empty()) torus = torus_sample(R, kBoundarySamples, budget.seed ^ 0x70);
        std::mt19937_64 rng(budget.seed ^ 0xdcba);
        double r0 = std::max(domain.boundary_distance(z), 1e-6);
        Matrix start(n * n, 0.0);
        for (int i = 0; i < n; ++i) start[i * n + i] = r0;
        auto value_of = [&](const Matrix& B) {
            double s = affine_scale_max(domain, z, B, torus_coarse, 24);
            return std::abs(det(B, n)) * std::pow(s, n);
        };
        k_best = value_of(start);
        k_map = start;
        auto objective = [&](const std::vector<double>& x) {
            return -value_of(unpack_matrix(x, n));
        };
        for (int s = 0; s < std::max(1, budget.restarts); ++s) {
            std::vector<double> x0 = pack_matrix(k_map, n);
            if (s > 0)
                for (double& v : x0) v += 0.3 * r0 * detail::gaussian(rng);
            NelderMeadResult res = nelder_mead(objective, x0,
                                               std::vector<double>(2 * n * n, 0.3 * r0),
                                               std::min(budget.max_iterations, 200));
            Matrix B = unpack_matrix(res.x, n);
            double v = value_of(B);
            if (v > k_best) {
                k_best = v;
                k_map = std::move(B);
            }
        }
        double s_max = affine_scale_max(domain, z, k_map, torus, 40);
        k_best = std::abs(det(k_map, n)) * std::pow(s_max, n);
        for (auto& e : k_map) e *= s_max;
        k_exact_sigma = false;
    }
    if (!(k_best > 0.0) || !(c_best > 0.0))
        throw std::runtime_error("model_quotient: no feasible candidate found");

    VolumeInvariantEstimate est;
    est.c_lower = c_best;
    est.k_upper = 1.0 / k_best;
    est.m_upper = est.k_upper / est.c_lower;
    est.exact = centered && k_exact_sigma && domain.kind() != DomainKind::Egg &&
                domain.kind() != DomainKind::Lempert;
    est.method = est.exact ? "linear candidates, exact containment sups"
                           : "linear candidates, sampled containment";
    est.c_witness = affine_witness(z, c_map, -kContainmentSlack);
    est.k_witness = affine_witness(z, k_map, -kContainmentSlack);
    est.c_witness.family = "general-linear";
    est.k_witness.family = "general-linear";
    return est;
}

}  // namespace kobmetric
