#include <doctest.h>

#include <cmath>

#include "kobmetric/discs.hpp"

using namespace kobmetric;

namespace {

AnalyticDisc sample_disc() {
    // phi(z) = (0.1 + 0.4 z + 0.05 z^2, -0.2 + 0.3i z)
    std::vector<Point> coeffs = {
        Point{cplx(0.1, 0.0), cplx(-0.2, 0.0)},
        Point{cplx(0.4, 0.0), cplx(0.0, 0.3)},
        Point{cplx(0.05, 0.0), cplx(0.0, 0.0)},
    };
    return AnalyticDisc(std::move(coeffs));
}

}  // namespace

TEST_CASE("evaluation and derivative are the exact polynomial operations") {
    const AnalyticDisc phi = sample_disc();
    CHECK(phi.degree() == 2);
    CHECK(phi.dimension() == 2);
    const cplx zeta(0.3, -0.2);
    const Point v = phi.evaluate(zeta);
    CHECK(std::abs(v[0] - (cplx(0.1) + cplx(0.4) * zeta + cplx(0.05) * zeta * zeta)) < 1e-15);
    CHECK(std::abs(v[1] - (cplx(-0.2) + cplx(0.0, 0.3) * zeta)) < 1e-15);
    const Direction d = phi.derivative_at(zeta);
    CHECK(std::abs(d[0] - (cplx(0.4) + cplx(0.1) * zeta)) < 1e-15);
    CHECK(std::abs(d[1] - cplx(0.0, 0.3)) < 1e-15);
    CHECK_THROWS_AS(phi.evaluate(cplx(1.5, 0.0)), std::domain_error);
}

TEST_CASE("factories") {
    const AnalyticDisc c = AnalyticDisc::constant(Point{cplx(0.2, 0.1)});
    CHECK(c.degree() == 0);
    CHECK(std::abs(c.evaluate(0.7)[0] - cplx(0.2, 0.1)) < 1e-15);
    const AnalyticDisc l = AnalyticDisc::linear(Point{cplx(0.0, 0.0)}, Point{cplx(0.5, 0.0)});
    CHECK(l.degree() == 1);
    CHECK(std::abs(l.evaluate(cplx(0.0, 1.0))[0] - cplx(0.0, 0.5)) < 1e-15);
}

TEST_CASE("degree cap is enforced per instance") {
    const std::vector<Point> coeffs(kDefaultMaxDegree + 2, Point{cplx(0.01, 0.0)});
    CHECK_THROWS_AS(AnalyticDisc{coeffs}, std::invalid_argument);
    CHECK_NOTHROW(AnalyticDisc(coeffs, kDefaultMaxDegree + 1));
    CHECK_THROWS_AS(AnalyticDisc({}), std::invalid_argument);
}

TEST_CASE("mobius precomposition matches pointwise composition") {
    const AnalyticDisc phi = sample_disc();
    const cplx a(0.3, 0.1);
    const AnalyticDisc composed = phi.precompose_mobius(a);
    for (double t = 0.0; t < 6.28; t += 0.7) {
        const cplx zeta = std::polar(0.8, t);
        const cplx m = (zeta + a) / (cplx(1.0) + std::conj(a) * zeta);
        const Point lhs = composed.evaluate(zeta);
        const Point rhs = phi.evaluate(m);
        // truncation tail of the composed series at the default cap
        CHECK(std::abs(lhs[0] - rhs[0]) < 1e-6);
        CHECK(std::abs(lhs[1] - rhs[1]) < 1e-6);
    }
}

TEST_CASE("coefficient tail norm") {
    const AnalyticDisc phi = sample_disc();
    CHECK(phi.coefficient_tail_norm(1) == doctest::Approx(0.05));
    CHECK(phi.coefficient_tail_norm(2) == doctest::Approx(0.05 + 0.5));
}

TEST_CASE("feasibility margins on the circle") {
    const DomainSpec ball = DomainSpec::ball(2);
    // phi(z) = (0.3 + 0.5 z, 0): sup |phi|^2 - 1 = 0.8^2 - 1
    const AnalyticDisc phi =
        AnalyticDisc::linear(Point{cplx(0.3, 0.0), cplx(0.0, 0.0)},
                             Point{cplx(0.5, 0.0), cplx(0.0, 0.0)});
    const FeasibilityReport rep = feasibility(ball, phi);
    CHECK(rep.margin == doctest::Approx(0.8 * 0.8 - 1.0).epsilon(1e-9));
    CHECK(rep.sample_count >= 96);
    // an escaping disc has positive margin, attained near the right angle
    const AnalyticDisc big =
        AnalyticDisc::linear(Point{cplx(0.9, 0.0), cplx(0.0, 0.0)},
                             Point{cplx(0.5, 0.0), cplx(0.0, 0.0)});
    CHECK(feasibility(ball, big).margin > 0.0);
}

TEST_CASE("poincare distance") {
    CHECK(poincare_distance(cplx(0.0, 0.0), cplx(0.5, 0.0)) == doctest::Approx(std::atanh(0.5)));
    CHECK(poincare_of_radius(0.5) == doctest::Approx(std::atanh(0.5)));
    const cplx a(0.3, -0.2), b(-0.1, 0.55);
    CHECK(poincare_distance(a, b) == doctest::Approx(poincare_distance(b, a)));
    CHECK(poincare_distance(a, a) == doctest::Approx(0.0));
    // invariance under the rotation z -> -z
    CHECK(poincare_distance(-a, -b) == doctest::Approx(poincare_distance(a, b)));
    // triangle inequality through 0
    CHECK(poincare_distance(a, b) <=
          poincare_distance(a, cplx(0.0, 0.0)) + poincare_distance(cplx(0.0, 0.0), b) + 1e-12);
}
