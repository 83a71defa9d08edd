#include <doctest.h>

#include <cmath>

#include "kobmetric/domains.hpp"

using namespace kobmetric;

namespace {

Point pt(cplx a, cplx b) { return Point{a, b}; }

std::vector<DomainSpec> all_kinds() {
    return {DomainSpec::ball(2), DomainSpec::polydisc({1.0, 2.0}), DomainSpec::egg({1, 2}),
            DomainSpec::lempert(0.25), DomainSpec::stretched_ball(4.0)};
}

}  // namespace

TEST_CASE("constructor validation") {
    CHECK_THROWS_AS(DomainSpec::ball(0), std::invalid_argument);
    CHECK_THROWS_AS(DomainSpec::polydisc({}), std::invalid_argument);
    CHECK_THROWS_AS(DomainSpec::polydisc({1.0, -1.0}), std::invalid_argument);
    CHECK_THROWS_AS(DomainSpec::egg({}), std::invalid_argument);
    CHECK_THROWS_AS(DomainSpec::egg({1, 0}), std::invalid_argument);
    CHECK_THROWS_AS(DomainSpec::lempert(0.0), std::invalid_argument);
    CHECK_THROWS_AS(DomainSpec::lempert(1.0), std::invalid_argument);
    CHECK_THROWS_AS(DomainSpec::stretched_ball(0.5), std::invalid_argument);
}

TEST_CASE("defining function signs") {
    for (const DomainSpec& dom : all_kinds()) {
        CAPTURE(kind_name(dom.kind()));
        Point center(dom.dimension(), cplx(0.0, 0.0));
        if (dom.kind() == DomainKind::Lempert) {
            // the lempert center 0 lies inside as well
            CHECK(dom.defining_value(center) < 0.0);
        } else {
            CHECK(dom.defining_value(center) == -1.0);
        }
        CHECK(dom.contains(center));
        const Point far(dom.dimension(), cplx(10.0, 0.0));
        CHECK(dom.defining_value(far) > 0.0);
        CHECK_FALSE(dom.contains(far));
    }
}

TEST_CASE("gauge: homogeneity, boundary normalization, closed forms") {
    for (const DomainSpec& dom : all_kinds()) {
        CAPTURE(kind_name(dom.kind()));
        Point z(dom.dimension(), cplx(0.0, 0.0));
        z[0] = cplx(0.21, -0.4);
        if (dom.dimension() > 1) z[1] = cplx(0.11, 0.05);
        const double mu = dom.gauge(z);
        CHECK(mu > 0.0);
        CHECK(dom.gauge(scaled(z, 0.5)) == doctest::Approx(0.5 * mu).epsilon(1e-12));
        // z / mu sits on the boundary: gauge 1 and defining value ~0
        const Point zb = scaled(z, 1.0 / mu);
        CHECK(dom.gauge(zb) == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(std::abs(dom.defining_value(zb)) < 1e-9);
    }
    CHECK(DomainSpec::ball(2).gauge(pt(cplx(0.0, 0.3), cplx(0.4, 0.0))) == doctest::Approx(0.5));
    CHECK(DomainSpec::polydisc({1.0, 2.0}).gauge(pt(0.5, 0.5)) == doctest::Approx(0.5));
    CHECK(DomainSpec::stretched_ball(4.0).gauge(pt(0.0, 2.0)) == doctest::Approx(0.5));
}

TEST_CASE("egg gauge agrees with the defining function root") {
    const DomainSpec egg = DomainSpec::egg({1, 2, 3});
    Point z{cplx(0.3, 0.1), cplx(-0.2, 0.4), cplx(0.05, -0.33)};
    const double mu = egg.gauge(z);
    // sum |z_j/mu|^{2 m_j} = 1 at the gauge value
    double s = 0.0;
    const auto& m = egg.exponents();
    for (int j = 0; j < 3; ++j) s += std::pow(std::abs(z[j]) / mu, 2.0 * m[j]);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("boundary distance closed forms and interior positivity") {
    CHECK(DomainSpec::ball(2).boundary_distance(pt(0.6, 0.0)) == doctest::Approx(0.4));
    CHECK(DomainSpec::polydisc({1.0, 2.0}).boundary_distance(pt(0.5, 0.5)) ==
          doctest::Approx(0.5));
    CHECK(DomainSpec::stretched_ball(4.0).boundary_distance(pt(0.0, 0.0)) == doctest::Approx(1.0));
    for (const DomainSpec& dom : all_kinds()) {
        CAPTURE(kind_name(dom.kind()));
        Point z(dom.dimension(), cplx(0.1, 0.05));
        const double d = dom.boundary_distance(z);
        CHECK(d > 0.0);
        CHECK(d <= dom.circumscribing_radius() + 1e-9);
        CHECK_THROWS_AS(dom.boundary_distance(Point(dom.dimension(), cplx(10.0, 0.0))),
                        std::domain_error);
    }
}

TEST_CASE("normal ray points") {
    const DomainSpec ball = DomainSpec::ball(2);
    const Point p = ball.normal_ray_point(pt(1.0, 0.0), 0.1);
    CHECK(std::abs(p[0] - cplx(0.9, 0.0)) < 1e-12);
    CHECK(std::abs(p[1]) < 1e-12);

    const DomainSpec egg = DomainSpec::egg({1, 2});
    const Point q = egg.normal_ray_point(pt(0.0, 1.0), 0.05);
    CHECK(egg.contains(q));
    CHECK(std::abs(q[1] - cplx(0.95, 0.0)) < 1e-12);

    CHECK_THROWS_AS(ball.normal_ray_point(pt(0.5, 0.0), 0.1), std::domain_error);  // not boundary
    CHECK_THROWS_AS(ball.normal_ray_point(pt(1.0, 0.0), 3.0), std::domain_error);  // exits
    CHECK_THROWS_AS(ball.normal_ray_point(pt(1.0, 0.0), -1.0), std::invalid_argument);
}

TEST_CASE("defining gradient parallels the outward direction on spheres") {
    const DomainSpec ball = DomainSpec::ball(2);
    const Point z = pt(cplx(0.6, 0.3), cplx(-0.2, 0.5));
    const Point g = ball.defining_gradient(z);
    // gradient of |z|^2 - 1 as 2 d/d(conj z) = 2 z
    CHECK(std::abs(g[0] - 2.0 * z[0]) < 1e-12);
    CHECK(std::abs(g[1] - 2.0 * z[1]) < 1e-12);
}

TEST_CASE("circumscribing radius is attained and never exceeded") {
    CHECK(DomainSpec::ball(3).circumscribing_radius() == doctest::Approx(1.0));
    CHECK(DomainSpec::polydisc({1.0, 2.0}).circumscribing_radius() ==
          doctest::Approx(std::sqrt(5.0)));
    CHECK(DomainSpec::egg({1, 2}).circumscribing_radius() == doctest::Approx(std::sqrt(1.25)));
    CHECK(DomainSpec::stretched_ball(4.0).circumscribing_radius() == doctest::Approx(4.0));
    for (const DomainSpec& dom : all_kinds()) {
        CAPTURE(kind_name(dom.kind()));
        const double R = dom.circumscribing_radius();
        CHECK(dom.diameter() == doctest::Approx(2.0 * R));
        // no gauge-normalized direction escapes the ball of radius R
        double worst = 0.0;
        for (int a = 0; a < 24; ++a) {
            for (int b = 0; b < 24; ++b) {
                Point dir(dom.dimension(), cplx(0.0, 0.0));
                dir[0] = std::polar(1.0, 0.26 * a);
                if (dom.dimension() > 1) dir[1] = std::polar(0.2 + 0.05 * b, 1.7 * b);
                const double mu = dom.gauge(dir);
                worst = std::max(worst, euclid_norm(dir) / mu);
            }
        }
        CHECK(worst <= R + 1e-9);
    }
}

TEST_CASE("kind names") {
    CHECK(std::string(kind_name(DomainKind::Ball)) == "ball");
    CHECK(std::string(kind_name(DomainKind::Polydisc)) == "polydisc");
    CHECK(std::string(kind_name(DomainKind::Egg)) == "egg");
    CHECK(std::string(kind_name(DomainKind::Lempert)) == "lempert");
    CHECK(std::string(kind_name(DomainKind::StretchedBall)) == "stretched_ball");
}
