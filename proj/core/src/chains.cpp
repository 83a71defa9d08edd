#include "kobmetric/chains.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>
#include <stdexcept>
#include <utility>

#include "circle_util.hpp"
#include "kobmetric/optimize.hpp"
#include "rng_util.hpp"

namespace kobmetric {

using detail::CircleGrid;
using detail::circle_margin;
using detail::gaussian;

namespace {

// Interior margin demanded of every chain disc on a dense circle grid.
constexpr double kChainSlack = 1e-9;

// ---------------------------------------------------------------------------
// endpoint-pinned coefficient assembly
//
// A disc through P at 0 and Q at r has one linear degree of freedom less than
// a free disc: given the tail a_2..a_d, the linear coefficient
//   a_1 = (Q - P - sum_{k>=2} a_k r^k) / r
// makes phi(r) = Q exact, so the search space is (r, tail) and endpoint
// residuals stay at rounding level by construction.

std::vector<Point> assemble_endpoint_coeffs(const Point& P, const Point& Q, double r,
                                            const std::vector<Point>& tail) {
    const std::size_t n = P.size();
    Point acc = subtracted(Q, P);
    std::vector<Point> coeffs(tail.size() + 1, Point(n, 0.0));
    double rk = r;
    for (std::size_t j = 0; j < tail.size(); ++j) {
        rk *= r;
        for (std::size_t i = 0; i < n; ++i) acc[i] -= tail[j][i] * rk;
        coeffs[j + 1] = tail[j];
    }
    for (std::size_t i = 0; i < n; ++i) coeffs[0][i] = acc[i] / r;
    return coeffs;
}

// Best feasible candidate so far: coefficients a_1..a_d with a_0 = P implied.
struct DiscSearch {
    double r = 1.0;
    std::vector<Point> coeffs;
    bool found = false;
    bool cheap = false;  // coarser verification grids (chain coordinate descent)
};

double verify_margin(const DomainSpec& dom, const Point& P, const std::vector<Point>& coeffs,
                     bool cheap) {
    const int d = static_cast<int>(coeffs.size());
    const int angles = cheap ? std::max(256, 4 * (d + 1)) : std::max(1024, 16 * (d + 1));
    CircleGrid grid(angles);
    return circle_margin(dom, P, coeffs, grid);
}

// Accepts the candidate iff it improves the node and verifies feasible.
// `verified` skips the margin check for candidates already validated by a
// stronger test (the outer-function construction verifies four rings at 8x
// oversampling before it returns anything).
bool consider(DiscSearch& best, const DomainSpec& dom, const Point& P, double r,
              std::vector<Point> coeffs, bool verified) {
    if (!(r > 0.0) || r >= 1.0) return false;
    if (best.found && r >= best.r) return false;
    if (!verified && verify_margin(dom, P, coeffs, best.cheap) > -kChainSlack) return false;
    best.r = r;
    best.coeffs = std::move(coeffs);
    best.found = true;
    return true;
}

// ---------------------------------------------------------------------------
// candidate: straight segment phi(zeta) = P + (zeta / r) (Q - P)
//
// The image is the closed complex disc around P through Q scaled by 1/r, so
// feasibility is monotone in r and the smallest feasible r is a bisection.

void try_segment(DiscSearch& best, const DomainSpec& dom, const Point& P, const Point& Q) {
    CircleGrid grid(512);
    const Point d = subtracted(Q, P);
    auto feasible = [&](double r) {
        std::vector<Point> coeffs{scaled(d, 1.0 / r)};
        return circle_margin(dom, P, coeffs, grid) <= -1e-8;
    };
    double hi = 1.0 - 1e-9;
    if (!feasible(hi)) return;
    double lo = 1e-6;
    if (!feasible(lo)) {
        for (int it = 0; it < 60; ++it) {
            double mid = 0.5 * (lo + hi);
            (feasible(mid) ? hi : lo) = mid;
        }
    } else {
        hi = lo;
    }
    consider(best, dom, P, hi, {scaled(d, 1.0 / hi)}, false);
}

// ---------------------------------------------------------------------------
// candidate: exact geodesics where available
//
// Ball: phi(zeta) = m_P(rho u zeta) with m_P the involutive automorphism
// exchanging 0 and P, u the direction of m_P(Q) and rho slightly below 1 so
// the disc stays strictly interior; the node is |m_P(Q)| / rho. StretchedBall
// reduces to the ball through the linear change of coordinates (z1, z2/N).
// Polydisc: per-coordinate Mobius discs driven at speeds matching the slowest
// coordinate (the polydisc distance is the max of coordinate distances).

Point ball_mobius(const Point& a, const Point& w) {
    const double na = norm_sq(a);
    if (na < 1e-28) return scaled(w, -1.0);
    const double s = std::sqrt(1.0 - na);
    const cplx proj = hermitian_dot(w, a) / na;
    const cplx den = 1.0 - hermitian_dot(w, a);
    Point out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const cplx pw = proj * a[i];
        out[i] = (a[i] - pw - s * (w[i] - pw)) / den;
    }
    return out;
}

int geometric_degree(double ratio, double target, bool cheap) {
    if (ratio < 1e-3) return 12;
    int d = static_cast<int>(std::ceil(std::log(target) / std::log(ratio)));
    return std::clamp(d, 12, cheap ? 160 : 400);
}

// Geodesic for the unit ball between p and q (both strictly inside); scale_back
// maps the computed coefficients back to the original coordinates.
void try_ball_geodesic(DiscSearch& best, const DomainSpec& dom, const Point& P, const Point& Q,
                       const Point& p, const Point& q,
                       const std::function<Point(const Point&)>& scale_back) {
    const std::size_t n = p.size();
    const Point m = ball_mobius(p, q);
    const double rg = euclid_norm(m);
    if (rg < 1e-15 || rg >= 1.0) return;
    for (double delta : {1e-6, 1e-5, 1e-4, 1e-3}) {
        double rho = std::max(1.0 - delta, 0.5 * (1.0 + rg));
        if (rho <= rg || rho >= 1.0) continue;
        const double r = rg / rho;
        const Point ru = scaled(m, rho / rg);
        // Taylor series of m_p(ru zeta): with c = <ru, p> and
        // M = proj_p(ru) + s (ru - proj_p(ru)),
        //   a_0 = p,  a_k = (p c - M) c^{k-1}.
        const double np = norm_sq(p);
        cplx c;
        Point M(n);
        if (np < 1e-28) {
            c = 0.0;
            M = ru;  // m_0(w) = -w, so a_1 = -M = -ru and the series stops
        } else {
            const double s = std::sqrt(1.0 - np);
            const cplx proj = hermitian_dot(ru, p) / np;
            c = hermitian_dot(ru, p);
            for (std::size_t i = 0; i < n; ++i) {
                const cplx pw = proj * p[i];
                M[i] = pw + s * (ru[i] - pw);
            }
        }
        const int deg = geometric_degree(std::abs(c), 1e-16, best.cheap);
        std::vector<Point> series(deg, Point(n));
        cplx ck = 1.0;
        for (int k = 1; k <= deg; ++k) {
            for (std::size_t i = 0; i < n; ++i) series[k - 1][i] = (p[i] * c - M[i]) * ck;
            ck *= c;
        }
        // back to the original coordinates, then re-pin the endpoint
        std::vector<Point> tail(series.begin() + 1, series.end());
        for (auto& a : tail) a = scale_back(a);
        auto coeffs = assemble_endpoint_coeffs(P, Q, r, tail);
        if (consider(best, dom, P, r, std::move(coeffs), false)) return;
    }
}

void try_geodesic(DiscSearch& best, const DomainSpec& dom, const Point& P, const Point& Q) {
    const std::size_t n = P.size();
    switch (dom.kind()) {
        case DomainKind::Ball:
            try_ball_geodesic(best, dom, P, Q, P, Q, [](const Point& a) { return a; });
            break;
        case DomainKind::StretchedBall: {
            const double N = dom.stretch();
            Point p{P[0], P[1] / N}, q{Q[0], Q[1] / N};
            try_ball_geodesic(best, dom, P, Q, p, q, [N](const Point& a) {
                return Point{a[0], a[1] * N};
            });
            break;
        }
        case DomainKind::Polydisc: {
            const auto& rad = dom.radii();
            std::vector<cplx> p(n), m(n);
            double rmax = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                p[j] = P[j] / rad[j];
                const cplx q = Q[j] / rad[j];
                m[j] = (q - p[j]) / (1.0 - std::conj(p[j]) * q);
                rmax = std::max(rmax, std::abs(m[j]));
            }
            if (rmax < 1e-15 || rmax >= 1.0) break;
            const double rho = std::max(1.0 - 1e-6, 0.5 * (1.0 + rmax));
            const double r = rmax / rho;
            // h_j(zeta) = mob_{p_j}(beta_j zeta), beta_j = m_j / r:
            //   a_0 = p_j, a_k = gamma^{k-1} beta_j (1 - |p_j|^2),
            //   gamma = -conj(p_j) beta_j.
            double gmax = 0.0;
            std::vector<cplx> beta(n), gam(n);
            for (std::size_t j = 0; j < n; ++j) {
                beta[j] = m[j] / r;
                gam[j] = -std::conj(p[j]) * beta[j];
                gmax = std::max(gmax, std::abs(gam[j]));
            }
            const int deg = geometric_degree(gmax, 1e-16, best.cheap);
            std::vector<Point> series(deg, Point(n, 0.0));
            for (std::size_t j = 0; j < n; ++j) {
                cplx gk = 1.0;
                for (int k = 1; k <= deg; ++k) {
                    series[k - 1][j] = rad[j] * beta[j] * (1.0 - std::norm(p[j])) * gk;
                    gk *= gam[j];
                }
            }
            std::vector<Point> tail(series.begin() + 1, series.end());
            auto coeffs = assemble_endpoint_coeffs(P, Q, r, tail);
            consider(best, dom, P, r, std::move(coeffs), false);
            break;
        }
        default:
            break;
    }
}

// ---------------------------------------------------------------------------
// candidate: Lempert kind, two-branch outer-function construction
//
// Between (1,0) and (0,1) the coordinates must exchange magnitudes while
// |f g| <= eps holds on the whole disc, which forces any connecting disc to
// spend logarithmic "area" (Example-1 obstruction); the straight segment is
// infeasible for small eps. The construction designs log-modulus boundary
// profiles T_f, T_g (a smoothstep window of angular radius a and rise kap
// around theta = 0), realizes them as outer functions exp(G) with Re G = T by
// analytic completion of the Fourier series, and pins the endpoints exactly
// through the normalizing factors:
//   f(zeta) = c_f (r - zeta) p_f(zeta)    f(0) = 1, f(r) = 0
//   g(zeta) = c_g zeta p_g(zeta)          g(0) = 0, g(r) = 1.
// Profile levels: |f| dips to ~eps/1.65 inside the window where |g| ~ 1.65,
// and |g| dips to ~eps/2 outside it; the mean of T_f must equal -log r
// (Jensen), which bounds how small r can be. Candidates failing the analytic
// screens, a degree cap, or the verified ring margins are rejected, so every
// returned disc is strictly feasible.

struct FftPlan {
    int n = 0;
    fftw_complex* buf = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;

    explicit FftPlan(int size) : n(size) {
        buf = fftw_alloc_complex(static_cast<std::size_t>(n));
        fwd = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~FftPlan() {
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
        fftw_free(buf);
    }
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;
};

constexpr int kOuterGrid = 32768;
constexpr int kOuterDegreeCap = 4200;

double smoothstep01(double x) {
    x = std::clamp(x, 0.0, 1.0);
    return x * x * x * (x * (6.0 * x - 15.0) + 10.0);
}

// Coefficients of G analytic in the disc with Re G = T on the circle:
// g_0 = t_0, g_m = 2 t_m for the Fourier coefficients t_m of T.
std::vector<cplx> analytic_completion(const std::vector<double>& T, FftPlan& fft) {
    const int N = fft.n;
    for (int t = 0; t < N; ++t) {
        fft.buf[t][0] = T[t];
        fft.buf[t][1] = 0.0;
    }
    fftw_execute(fft.fwd);
    std::vector<cplx> g(N / 2);
    g[0] = fft.buf[0][0] / N;
    for (int m = 1; m < N / 2; ++m)
        g[m] = 2.0 * cplx(fft.buf[m][0], fft.buf[m][1]) / static_cast<double>(N);
    return g;
}

// Drops the tail whose cumulative coefficient mass is below tol (keeps >= 8).
void trunc_by_tail(std::vector<cplx>& v, double tol) {
    std::vector<double> cum(v.size() + 1, 0.0);
    for (int i = static_cast<int>(v.size()) - 1; i >= 0; --i) cum[i] = cum[i + 1] + std::abs(v[i]);
    for (std::size_t d = 8; d + 1 < v.size(); ++d) {
        if (cum[d + 1] <= tol) {
            v.resize(d + 1);
            return;
        }
    }
}

// Taylor coefficients of the outer function exp(G) with Re G = T on the circle.
std::vector<cplx> outer_poly(const std::vector<double>& T, double g_tol, double p_tol,
                             FftPlan& fft) {
    const int N = fft.n;
    std::vector<cplx> g = analytic_completion(T, fft);
    trunc_by_tail(g, g_tol);
    for (int t = 0; t < N; ++t) fft.buf[t][0] = fft.buf[t][1] = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        fft.buf[k][0] = g[k].real();
        fft.buf[k][1] = g[k].imag();
    }
    fftw_execute(fft.bwd);  // G on the grid: sum_k g_k e^{+ik theta}
    std::vector<cplx> boundary(N);
    for (int t = 0; t < N; ++t) boundary[t] = std::exp(cplx(fft.buf[t][0], fft.buf[t][1]));
    for (int t = 0; t < N; ++t) {
        fft.buf[t][0] = boundary[t].real();
        fft.buf[t][1] = boundary[t].imag();
    }
    fftw_execute(fft.fwd);
    std::vector<cplx> p(N / 2);
    for (int k = 0; k < N / 2; ++k)
        p[k] = cplx(fft.buf[k][0], fft.buf[k][1]) / static_cast<double>(N);
    trunc_by_tail(p, p_tol);
    return p;
}

struct OuterPair {
    std::vector<cplx> f, g;
};

std::optional<OuterPair> lempert_construct(double eps, double r, double a, double kap,
                                           FftPlan& fft) {
    const int N = fft.n;
    const double le = std::log(eps);
    const double Hg = std::log(1.65);
    const double l2 = std::log(2.0);
    const double dip_f = le - Hg - 0.35;
    const double dip_g = le - l2 - 0.35;

    std::vector<double> s(N);
    double mb = 0.0;
    for (int t = 0; t < N; ++t) {
        const double th = 2.0 * M_PI * t / N;
        const double tha = std::min(th, 2.0 * M_PI - th);
        s[t] = smoothstep01((tha - a) / kap);
        mb += 1.0 - s[t];
    }
    mb /= N;
    const double H_f = (-std::log(r) - dip_f * mb) / (1.0 - mb);
    if (H_f > l2 - 0.12) return std::nullopt;  // |f| cap has no headroom

    std::vector<double> Tf(N), Tg(N);
    for (int t = 0; t < N; ++t) {
        Tf[t] = H_f + (dip_f - H_f) * (1.0 - s[t]);
        Tg[t] = Hg + (dip_g - Hg) * s[t];
    }
    // screen: the normalizer c_g = 1/(r e^{P_r[T_g]}) must keep |g| under 2
    double PrTg = 0.0;
    for (int t = 0; t < N; ++t) {
        const double th = 2.0 * M_PI * t / N;
        PrTg += (1.0 - r * r) / (1.0 - 2.0 * r * std::cos(th) + r * r) * Tg[t];
    }
    PrTg /= N;
    if (std::exp(Hg) / (r * std::exp(PrTg)) > 1.9) return std::nullopt;

    const double p_tol = eps * 1e-3;
    std::vector<double> Tf_div(N);
    for (int t = 0; t < N; ++t) {
        const double th = 2.0 * M_PI * t / N;
        Tf_div[t] = Tf[t] - std::log(std::abs(std::polar(1.0, th) - r));
    }
    const auto pf = outer_poly(Tf_div, 0.04, p_tol, fft);
    const auto pg = outer_poly(Tg, 0.04, p_tol, fft);

    OuterPair out;
    const cplx cf = 1.0 / (r * pf[0]);
    out.f.assign(pf.size() + 1, 0.0);
    for (std::size_t k = 0; k < pf.size(); ++k) {
        out.f[k] += r * pf[k] * cf;
        out.f[k + 1] -= pf[k] * cf;
    }
    cplx pg_r = 0.0;
    for (int k = static_cast<int>(pg.size()) - 1; k >= 0; --k) pg_r = pg_r * r + pg[k];
    const cplx cg = 1.0 / (r * pg_r);
    out.g.assign(pg.size() + 1, 0.0);
    for (std::size_t k = 0; k < pg.size(); ++k) out.g[k + 1] = pg[k] * cg;
    return out;
}

// Max over four rings of the Lempert defining function along (f, g); the
// rings are evaluated by FFT at >= 8x the polynomial degree.
double ring_margins(const OuterPair& co, double eps) {
    const int deg = static_cast<int>(std::max(co.f.size(), co.g.size())) - 1;
    int N = 8192;
    while (N < 8 * (deg + 1)) N <<= 1;
    FftPlan fft(N);
    std::vector<cplx> F(N), G(N);
    double worst = -std::numeric_limits<double>::infinity();
    for (double rho : {1.0, 0.997, 0.95, 0.7}) {
        auto eval = [&](const std::vector<cplx>& c, std::vector<cplx>& out) {
            for (int t = 0; t < N; ++t) fft.buf[t][0] = fft.buf[t][1] = 0.0;
            double rk = 1.0;
            for (std::size_t k = 0; k < c.size(); ++k) {
                fft.buf[k][0] = c[k].real() * rk;
                fft.buf[k][1] = c[k].imag() * rk;
                rk *= rho;
            }
            fftw_execute(fft.bwd);
            for (int t = 0; t < N; ++t) out[t] = cplx(fft.buf[t][0], fft.buf[t][1]);
        };
        eval(co.f, F);
        eval(co.g, G);
        for (int t = 0; t < N; ++t) {
            const double m = std::max({std::norm(F[t]) / 4.0, std::norm(G[t]) / 4.0,
                                       std::abs(F[t] * G[t]) / eps}) -
                             1.0;
            worst = std::max(worst, m);
        }
    }
    return worst;
}

std::optional<std::pair<double, OuterPair>> lempert_outer_search(double eps) {
    static const double kR[] = {0.35,  0.5,   0.65,  0.75,  0.82,  0.88,
                                0.92,  0.95,  0.965, 0.975, 0.982, 0.987,
                                0.991, 0.994, 0.996, 0.9975, 0.9985, 0.999};
    static const double kA[] = {0.6, 0.45, 0.34, 0.26, 0.2, 0.15, 0.11, 0.085, 0.065, 0.05};
    FftPlan fft(kOuterGrid);
    for (double r : kR) {
        for (double a : kA) {
            const double kap = std::max(0.05, 0.55 * a);
            auto co = lempert_construct(eps, r, a, kap, fft);
            if (!co) continue;
            if (static_cast<int>(std::max(co->f.size(), co->g.size())) - 1 > kOuterDegreeCap)
                continue;
            if (ring_margins(*co, eps) <= -5e-3) return std::make_pair(r, std::move(*co));
        }
    }
    return std::nullopt;
}

void try_lempert_outer(DiscSearch& best, const DomainSpec& dom, const Point& P, const Point& Q) {
    if (dom.kind() != DomainKind::Lempert) return;
    auto is = [](const Point& z, double a, double b) {
        return std::abs(z[0] - a) < 1e-12 && std::abs(z[1] - b) < 1e-12;
    };
    bool canonical = is(P, 1.0, 0.0) && is(Q, 0.0, 1.0);
    bool swapped = is(P, 0.0, 1.0) && is(Q, 1.0, 0.0);
    if (!canonical && !swapped) return;
    auto found = lempert_outer_search(dom.epsilon());
    if (!found) return;
    const double r = found->first;
    const OuterPair& co = found->second;
    const std::size_t len = std::max(co.f.size(), co.g.size());
    std::vector<Point> full(len, Point(2, 0.0));
    for (std::size_t k = 0; k < len; ++k) {
        const cplx fv = k < co.f.size() ? co.f[k] : 0.0;
        const cplx gv = k < co.g.size() ? co.g[k] : 0.0;
        full[k] = canonical ? Point{fv, gv} : Point{gv, fv};
    }
    // a_0 equals P exactly by the construction's normalization; re-pin the
    // endpoint at r through the linear coefficient as usual.
    std::vector<Point> tail(full.begin() + 2, full.end());
    auto coeffs = assemble_endpoint_coeffs(P, Q, r, tail);
    consider(best, dom, P, r, std::move(coeffs), true);
}

// ---------------------------------------------------------------------------
// penalized Nelder-Mead refinement over (artanh r, tail coefficients)

void pack_tail(const std::vector<Point>& tail, std::vector<double>& x) {
    for (const Point& a : tail)
        for (const cplx& c : a) {
            x.push_back(c.real());
            x.push_back(c.imag());
        }
}

std::vector<Point> unpack_tail(const std::vector<double>& x, std::size_t offset, int count,
                               int n) {
    std::vector<Point> tail(count, Point(n));
    std::size_t p = offset;
    for (int k = 0; k < count; ++k)
        for (int i = 0; i < n; ++i) {
            tail[k][i] = cplx(x[p], x[p + 1]);
            p += 2;
        }
    return tail;
}

void nm_polish(DiscSearch& best, const DomainSpec& dom, const Point& P, const Point& Q,
               const OptimizerBudget& budget) {
    if (best.found && static_cast<int>(best.coeffs.size()) > 24) return;  // outer-function disc
    const int n = static_cast<int>(P.size());
    const int d_free = std::clamp(budget.degree, 2, 10);
    const int tail_count = d_free - 1;
    const CircleGrid grid(std::max(256, 8 * (d_free + 1)));
    const double scale = std::max(1e-3, euclid_norm(subtracted(Q, P)));

    std::vector<double> x0{best.found ? std::atanh(best.r) : std::atanh(0.9)};
    {
        std::vector<Point> tail0(tail_count, Point(n, 0.0));
        if (best.found)
            for (int k = 0; k + 1 < static_cast<int>(best.coeffs.size()) && k < tail_count; ++k)
                tail0[k] = best.coeffs[k + 1];
        pack_tail(tail0, x0);
    }
    std::vector<double> step(x0.size(), 0.05 * scale);
    step[0] = 0.1;

    std::mt19937_64 rng(budget.seed ^ 0x5bd1e995c4a7ull);
    double weight = 100.0;
    for (int restart = 0; restart <= std::max(0, budget.restarts); ++restart) {
        auto objective = [&](const std::vector<double>& x) {
            const double xi = x[0];
            if (!(xi > 1e-9) || xi > 8.0) return 1e9 + std::abs(xi);
            const double r = std::tanh(xi);
            auto coeffs =
                assemble_endpoint_coeffs(P, Q, r, unpack_tail(x, 1, tail_count, n));
            const double m = circle_margin(dom, P, coeffs, grid);
            return xi + weight * std::max(0.0, m + 1e-8);
        };
        auto res = nelder_mead(objective, x0, step, budget.max_iterations);
        double xi = res.x[0];
        if (xi > 1e-9 && xi <= 8.0) {
            auto tail = unpack_tail(res.x, 1, tail_count, n);
            // the penalty tolerates a hair of infeasibility; push the node out
            // until the dense verification accepts
            for (int push = 0; push < 30; ++push) {
                const double r = std::tanh(xi);
                if (best.found && r >= best.r) break;
                auto coeffs = assemble_endpoint_coeffs(P, Q, r, tail);
                if (consider(best, dom, P, r, std::move(coeffs), false)) break;
                xi *= 1.0 + 1e-4 * (push + 1);
            }
        }
        // jittered warm restart from the incumbent
        x0.assign(1, best.found ? std::atanh(best.r) : std::atanh(0.9));
        x0[0] *= 1.0 + 0.05 * gaussian(rng);
        std::vector<Point> tail0(tail_count, Point(n, 0.0));
        if (best.found)
            for (int k = 0; k + 1 < static_cast<int>(best.coeffs.size()) && k < tail_count; ++k)
                tail0[k] = best.coeffs[k + 1];
        for (auto& a : tail0)
            for (auto& c : a) c += 0.05 * scale * cplx(gaussian(rng), gaussian(rng));
        pack_tail(tail0, x0);
        weight = std::min(weight * 10.0, 1e7);
    }
}

// Shared candidate sweep. `cheap` skips the Nelder-Mead polish and the
// outer-function search and verifies on coarser grids; the chain coordinate
// descent uses it for guidance only, re-solving accepted moves in full mode.
std::optional<DiscSearch> search_disc(const DomainSpec& dom, const Point& P, const Point& Q,
                                      const OptimizerBudget& budget, bool cheap) {
    DiscSearch best;
    best.cheap = cheap;
    try_segment(best, dom, P, Q);
    try_geodesic(best, dom, P, Q);
    if (!cheap) {
        try_lempert_outer(best, dom, P, Q);
        nm_polish(best, dom, P, Q, budget);
    }
    if (!best.found) return std::nullopt;
    return best;
}

OneDiscResult pack_result(const Point& P, const Point& Q, const DiscSearch& best) {
    std::vector<Point> all(best.coeffs.size() + 1);
    all[0] = P;
    std::copy(best.coeffs.begin(), best.coeffs.end(), all.begin() + 1);
    const int deg = static_cast<int>(all.size()) - 1;
    AnalyticDisc disc(std::move(all), std::max(kDefaultMaxDegree, deg));
    const Point at0 = disc.evaluate(0.0);
    const Point atr = disc.evaluate(best.r);
    return OneDiscResult{std::atanh(best.r), std::move(disc), DiscNode{best.r},
                         {euclid_norm(subtracted(at0, P)), euclid_norm(subtracted(atr, Q))}};
}

constexpr double kDegenerate = 1e-12;

}  // namespace

std::optional<OneDiscResult> one_disc_distance_upper(const DomainSpec& domain, const Point& P,
                                                     const Point& Q,
                                                     const OptimizerBudget& budget) {
    const std::size_t n = static_cast<std::size_t>(domain.dimension());
    require_dimension(n, P.size(), "one_disc_distance_upper");
    require_dimension(n, Q.size(), "one_disc_distance_upper");
    if (!domain.contains(P) || !domain.contains(Q))
        throw std::invalid_argument("one_disc_distance_upper: endpoints must be interior");
    const double gap = euclid_norm(subtracted(Q, P));
    if (gap <= kDegenerate)
        return OneDiscResult{0.0, AnalyticDisc::constant(P), DiscNode{0.0}, {0.0, gap}};
    auto best = search_disc(domain, P, Q, budget, /*cheap=*/false);
    if (!best) return std::nullopt;
    OneDiscResult out = pack_result(P, Q, *best);
    if (out.residuals[0] > kEndpointTolerance || out.residuals[1] > kEndpointTolerance)
        return std::nullopt;
    return out;
}

LempertLowerBound lempert_lower_bound(double epsilon) {
    if (!(epsilon > 0.0) || !(epsilon < 1.0))
        throw std::invalid_argument("lempert_lower_bound: epsilon must lie in (0,1)");
    const double L = std::log(1.0 / epsilon);
    const double l2 = std::log(2.0);
    LempertLowerBound out;
    if (L <= l2) return out;
    const double sL = std::sqrt(L);
    const double s2 = std::sqrt(l2);
    out.r_min = (sL - s2) / (sL + s2);
    out.distance_lower = std::atanh(out.r_min);
    return out;
}

std::pair<double, double> harnack_poisson_bounds(double r) {
    if (!(r >= 0.0) || !(r < 1.0))
        throw std::domain_error("harnack_poisson_bounds: r must lie in [0,1)");
    return {(1.0 - r) / (1.0 + r), (1.0 + r) / (1.0 - r)};
}

namespace {

// cheap guidance value for the coordinate descent (initializer candidates only)
double guidance_value(const DomainSpec& dom, const Point& P, const Point& Q,
                      const OptimizerBudget& budget) {
    if (euclid_norm(subtracted(Q, P)) <= kDegenerate) return 0.0;
    auto best = search_disc(dom, P, Q, budget, /*cheap=*/true);
    return best ? std::atanh(best->r) : 1e9;
}

// The disc solver keeps every disc strictly interior by backing the node off
// to r = r_exact / rho with 1 - rho >= 1e-6, which inflates a leg of length d
// by about (1 - rho) sinh(2d) / 2. sinh is superadditive, so splitting a leg
// at a point of its geodesic lowers this inflation without lowering the true
// distance -- and the resulting pair can never re-merge under the merge rule
// (merged <= sum). A descent step therefore only counts as geometry when it
// beats the combined inflation scale; this floor is 8x the worst such gain.
double descent_noise_floor(double pair_sum) {
    return 4e-6 * (1.0 + std::sinh(std::min(2.0 * pair_sum, 20.0)));
}

}  // namespace

ChainPath chain_distance_upper(const DomainSpec& domain, const Point& P, const Point& Q, int k,
                               const OptimizerBudget& budget) {
    if (k < 1) throw std::invalid_argument("chain_distance_upper: k must be >= 1");
    const std::size_t n = static_cast<std::size_t>(domain.dimension());
    require_dimension(n, P.size(), "chain_distance_upper");
    require_dimension(n, Q.size(), "chain_distance_upper");

    OptimizerBudget leg_budget = budget;
    leg_budget.max_iterations = std::min(budget.max_iterations, 150);
    leg_budget.restarts = std::min(budget.restarts, 2);
    leg_budget.degree = std::min(budget.degree, 6);
    auto solve = [&](const Point& A, const Point& B) {
        auto leg = one_disc_distance_upper(domain, A, B, leg_budget);
        if (!leg) throw std::runtime_error("chain_distance_upper: leg failed to produce a disc");
        return *leg;
    };

    std::vector<Point> waypoints{P, Q};
    std::vector<OneDiscResult> legs{solve(P, Q)};

    for (int stage = 2; stage <= k; ++stage) {
        // nested initialization: duplicate the terminal waypoint (a zero-cost
        // degenerate leg), then let the descent move it
        waypoints.insert(waypoints.end() - 1, Q);
        legs.push_back(solve(Q, Q));
        for (int round = 0; round < 2; ++round) {
            for (std::size_t i = 1; i + 1 < waypoints.size(); ++i) {
                const Point& prev = waypoints[i - 1];
                const Point& next = waypoints[i + 1];
                auto objective = [&](const std::vector<double>& x) {
                    Point w(n);
                    for (std::size_t c = 0; c < n; ++c) w[c] = cplx(x[2 * c], x[2 * c + 1]);
                    const double dv = domain.defining_value(w);
                    if (dv > -1e-6) return 1e7 + dv;
                    return guidance_value(domain, prev, w, leg_budget) +
                           guidance_value(domain, w, next, leg_budget);
                };
                std::vector<double> x0(2 * n);
                for (std::size_t c = 0; c < n; ++c) {
                    x0[2 * c] = waypoints[i][c].real();
                    x0[2 * c + 1] = waypoints[i][c].imag();
                }
                const double local = std::min(euclid_norm(subtracted(waypoints[i], prev)),
                                              euclid_norm(subtracted(next, waypoints[i])));
                std::vector<double> step(2 * n, 0.2 * std::max(1e-3, local));
                auto res = nelder_mead(objective, x0, step, 80);
                Point w(n);
                for (std::size_t c = 0; c < n; ++c) w[c] = cplx(res.x[2 * c], res.x[2 * c + 1]);
                if (domain.defining_value(w) > -1e-6) continue;
                if (euclid_norm(subtracted(w, waypoints[i])) <= 1e-14) continue;
                auto legA = one_disc_distance_upper(domain, prev, w, leg_budget);
                if (!legA) continue;
                auto legB = one_disc_distance_upper(domain, w, next, leg_budget);
                if (!legB) continue;
                const double old_sum = legs[i - 1].distance_upper + legs[i].distance_upper;
                if (legA->distance_upper + legB->distance_upper <
                    old_sum - descent_noise_floor(old_sum)) {
                    waypoints[i] = w;
                    legs[i - 1] = std::move(*legA);
                    legs[i] = std::move(*legB);
                }
            }
        }
    }

    ChainPath out;
    out.waypoints = std::move(waypoints);
    out.legs = std::move(legs);
    for (const auto& leg : out.legs) out.total += leg.distance_upper;
    return out;
}

std::optional<OneDiscResult> merge_discs(const DomainSpec& domain, const OneDiscResult& leg1,
                                         const OneDiscResult& leg2, double delta,
                                         const OptimizerBudget& budget) {
    const Point p1 = leg1.start();
    const Point m1 = leg1.end();
    const Point m2 = leg2.start();
    const Point q2 = leg2.end();
    require_dimension(p1.size(), m2.size(), "merge_discs");
    if (euclid_norm(subtracted(m1, m2)) > 10.0 * kEndpointTolerance)
        throw std::invalid_argument("merge_discs: legs do not share a waypoint");
    if (euclid_norm(subtracted(q2, m2)) <= kDegenerate) return leg1;
    if (euclid_norm(subtracted(m1, p1)) <= kDegenerate) return leg2;

    // proximity hypothesis: the two discs delta-close on a fixed grid
    double sup = 0.0;
    for (double rho : {0.0, 0.3, 0.6, 0.9}) {
        for (int s = 0; s < 8; ++s) {
            const cplx zeta = std::polar(rho, 2.0 * M_PI * s / 8.0);
            sup = std::max(sup, euclid_norm(subtracted(leg1.disc.evaluate(zeta),
                                                       leg2.disc.evaluate(zeta))));
            if (rho == 0.0) break;
        }
    }
    if (sup >= delta) return std::nullopt;

    auto merged = one_disc_distance_upper(domain, p1, q2, budget);
    if (!merged) return std::nullopt;
    if (merged->distance_upper <= leg1.distance_upper + leg2.distance_upper) return merged;
    return std::nullopt;
}

std::vector<Point> domain_net(const DomainSpec& domain, double eta) {
    if (!(eta > 0.0)) throw std::invalid_argument("domain_net: eta must be positive");
    const int n = domain.dimension();
    const double R = domain.circumscribing_radius();
    double step = eta;
    auto lattice_size = [&](double st) {
        return std::pow(2.0 * std::floor(R / st) + 1.0, 2.0 * n);
    };
    while (lattice_size(step) > 3.0e5) step *= 1.5;
    const int m = static_cast<int>(std::floor(R / step));
    std::vector<Point> net;
    std::vector<int> idx(2 * n, -m);
    while (true) {
        Point z(n);
        for (int c = 0; c < n; ++c)
            z[c] = cplx(idx[2 * c] * step, idx[2 * c + 1] * step);
        if (domain.defining_value(z) < -1e-9) net.push_back(std::move(z));
        int c = 0;
        while (c < 2 * n && ++idx[c] > m) idx[c++] = -m;
        if (c == 2 * n) break;
    }
    return net;
}

NetSignature net_signature(const DomainSpec& domain, const OneDiscResult& leg,
                           const std::vector<Point>& net, double eta, double eta_prime) {
    if (!(eta > 0.0) || !(eta_prime > 0.0))
        throw std::invalid_argument("net_signature: nets must have positive spacing");
    require_dimension(static_cast<std::size_t>(domain.dimension()),
                      static_cast<std::size_t>(leg.disc.dimension()), "net_signature");
    NetSignature sig;
    sig.disc_nodes.push_back(0.0);
    const double r_cap = std::max(0.95, std::abs(leg.node.parameter));
    for (int ring = 1; static_cast<int>(sig.disc_nodes.size()) < 400; ++ring) {
        const double rr = std::tanh(ring * eta_prime);
        if (rr > r_cap + 1e-15) break;
        int count = static_cast<int>(std::ceil(2.0 * M_PI * rr / ((1.0 - rr * rr) * eta_prime)));
        count = std::clamp(count, 8, 64);
        for (int s = 0; s < count; ++s)
            sig.disc_nodes.push_back(std::polar(rr, 2.0 * M_PI * s / count));
    }
    sig.disc_nodes.push_back(leg.node.parameter);

    std::set<int> hit;
    for (const cplx& zeta : sig.disc_nodes) {
        const Point w = leg.disc.evaluate(zeta);
        for (std::size_t j = 0; j < net.size(); ++j) {
            if (euclid_norm(subtracted(net[j], w)) <= eta) hit.insert(static_cast<int>(j));
        }
    }
    sig.net_points.assign(hit.begin(), hit.end());
    if (static_cast<int>(sig.net_points.size()) > kMaxSignaturePoints)
        sig.net_points.resize(kMaxSignaturePoints);
    return sig;
}

ChainPath shorten_chain(const DomainSpec& domain, const ChainPath& chain, double eta,
                        double eta_prime, const OptimizerBudget& budget) {
    if (chain.legs.empty()) return chain;
    std::vector<OneDiscResult> legs = chain.legs;
    // |phi1 - phi2| never exceeds the diameter, so this delta makes the
    // proximity gate vacuous: the acceptance rule (merged <= sum) is what
    // actually decides, and the signatures order the attempts.
    const double delta = domain.diameter() + eta;
    const std::vector<Point> net = domain_net(domain, eta);

    bool improved = true;
    while (improved && legs.size() > 1) {
        improved = false;
        std::vector<NetSignature> sigs;
        sigs.reserve(legs.size());
        for (const auto& leg : legs) sigs.push_back(net_signature(domain, leg, net, eta, eta_prime));
        std::set<std::size_t> attempted;
        auto attempt = [&](std::size_t i) {
            if (attempted.count(i)) return false;
            attempted.insert(i);
            auto merged = merge_discs(domain, legs[i], legs[i + 1], delta, budget);
            if (!merged) return false;
            legs[i] = std::move(*merged);
            legs.erase(legs.begin() + static_cast<std::ptrdiff_t>(i) + 1);
            return true;
        };
        for (std::size_t i = 0; !improved && i + 1 < legs.size(); ++i)
            if (sigs[i].net_points == sigs[i + 1].net_points) improved = attempt(i);
        for (std::size_t i = 0; !improved && i + 1 < legs.size(); ++i) improved = attempt(i);
    }

    ChainPath out;
    out.legs = std::move(legs);
    out.waypoints.push_back(out.legs.front().start());
    for (const auto& leg : out.legs) {
        out.waypoints.push_back(leg.end());
        out.total += leg.distance_upper;
    }
    return out;
}

}  // namespace kobmetric
