#include "kobmetric/discs.hpp"

#include <cmath>
#include <stdexcept>

namespace kobmetric {

AnalyticDisc::AnalyticDisc(std::vector<Point> coefficients, int max_degree)
    : coeffs_(std::move(coefficients)), max_degree_(max_degree) {
    if (coeffs_.empty()) throw std::invalid_argument("AnalyticDisc: no coefficients");
    if (degree() > max_degree_)
        throw std::invalid_argument("AnalyticDisc: degree exceeds configured maximum");
    const std::size_t n = coeffs_[0].size();
    if (n == 0) throw std::invalid_argument("AnalyticDisc: zero-dimensional target");
    for (const Point& a : coeffs_) {
        require_dimension(n, a.size(), "AnalyticDisc");
        for (const cplx& c : a)
            if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
                throw std::invalid_argument("AnalyticDisc: non-finite coefficient");
    }
}

AnalyticDisc AnalyticDisc::constant(Point a0, int max_degree) {
    return AnalyticDisc({std::move(a0)}, max_degree);
}

AnalyticDisc AnalyticDisc::linear(Point a0, Point a1, int max_degree) {
    return AnalyticDisc({std::move(a0), std::move(a1)}, max_degree);
}

Point AnalyticDisc::evaluate(cplx zeta) const {
    if (std::abs(zeta) > 1.0 + 1e-12)
        throw std::domain_error("evaluate: |zeta| > 1");
    const int n = dimension();
    Point acc = coeffs_.back();
    for (int k = degree() - 1; k >= 0; --k)
        for (int i = 0; i < n; ++i)
            acc[i] = acc[i] * zeta + coeffs_[k][i];
    return acc;
}

Direction AnalyticDisc::derivative_at(cplx zeta) const {
    if (std::abs(zeta) > 1.0 + 1e-12)
        throw std::domain_error("derivative_at: |zeta| > 1");
    const int n = dimension();
    const int d = degree();
    if (d == 0) return Point(n, 0.0);
    Point acc = scaled(coeffs_[d], static_cast<double>(d));
    for (int k = d - 1; k >= 1; --k)
        for (int i = 0; i < n; ++i)
            acc[i] = acc[i] * zeta + static_cast<double>(k) * coeffs_[k][i];
    return acc;
}

double AnalyticDisc::coefficient_tail_norm(int count) const {
    double s = 0.0;
    for (int k = std::max(0, degree() - count + 1); k <= degree(); ++k)
        s += euclid_norm(coeffs_[k]);
    return s;
}

AnalyticDisc AnalyticDisc::precompose_mobius(cplx a) const {
    if (std::abs(a) >= 1.0) throw std::domain_error("precompose_mobius: |a| >= 1");
    if (a == 0.0) return *this;
    const int n = dimension();
    const int D = max_degree_;

    // Taylor series of m(zeta) = (zeta + a)/(1 + conj(a) zeta):
    //   m = a + (1 - |a|^2) sum_{k>=1} (-conj(a))^{k-1} zeta^k.
    std::vector<cplx> m(D + 1, 0.0);
    m[0] = a;
    const double s2 = 1.0 - std::norm(a);
    cplx pow = 1.0;
    for (int k = 1; k <= D; ++k) {
        m[k] = s2 * pow;
        pow *= -std::conj(a);
    }

    // Horner in truncated arithmetic: out = a_d, then out = out*m + a_{k}.
    // Truncated products keep the leading D coefficients of the true series.
    auto mul_trunc = [&](const std::vector<std::vector<cplx>>& f) {
        std::vector<std::vector<cplx>> out(D + 1, std::vector<cplx>(n, 0.0));
        for (int i = 0; i <= D; ++i) {
            for (int j = 0; i + j <= D; ++j) {
                if (m[j] == 0.0) continue;
                for (int c = 0; c < n; ++c) out[i + j][c] += f[i][c] * m[j];
            }
        }
        return out;
    };

    std::vector<std::vector<cplx>> acc(D + 1, std::vector<cplx>(n, 0.0));
    for (int c = 0; c < n; ++c) acc[0][c] = coeffs_[degree()][c];
    for (int k = degree() - 1; k >= 0; --k) {
        acc = mul_trunc(acc);
        for (int c = 0; c < n; ++c) acc[0][c] += coeffs_[k][c];
    }

    int last = D;
    while (last > 0) {
        double mag = 0.0;
        for (int c = 0; c < n; ++c) mag += std::abs(acc[last][c]);
        if (mag > 0.0) break;
        --last;
    }
    std::vector<Point> coeffs(last + 1);
    for (int k = 0; k <= last; ++k) coeffs[k] = Point(acc[k].begin(), acc[k].end());
    return AnalyticDisc(std::move(coeffs), max_degree_);
}

FeasibilityReport feasibility(const DomainSpec& domain, const AnalyticDisc& disc,
                              int n_angles) {
    require_dimension(static_cast<std::size_t>(domain.dimension()),
                      static_cast<std::size_t>(disc.dimension()), "feasibility");
    if (n_angles <= 0) n_angles = std::max(96, 8 * disc.degree());
    FeasibilityReport rep;
    rep.sample_count = n_angles;
    rep.margin = -std::numeric_limits<double>::infinity();
    for (int s = 0; s < n_angles; ++s) {
        double th = 2.0 * M_PI * s / n_angles;
        cplx zeta = std::polar(1.0, th);
        double v = domain.defining_value(disc.evaluate(zeta));
        if (v > rep.margin) {
            rep.margin = v;
            rep.worst_parameter = zeta;
        }
    }
    return rep;
}

double poincare_distance(cplx a, cplx b) {
    if (std::abs(a) >= 1.0 || std::abs(b) >= 1.0)
        throw std::domain_error("poincare_distance: arguments must be inside the unit disc");
    double r = std::abs((a - b) / (1.0 - std::conj(a) * b));
    return std::atanh(r);
}

}  // namespace kobmetric
