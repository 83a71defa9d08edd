#include <doctest.h>

#include <cmath>

#include "kobmetric/metrics.hpp"

using namespace kobmetric;

namespace {

OptimizerBudget small_budget(std::uint64_t seed = 11) {
    OptimizerBudget b;
    b.max_iterations = 150;
    b.restarts = 2;
    b.degree = 6;
    b.seed = seed;
    return b;
}

MetricQuery query(cplx z1, cplx z2, cplx x1, cplx x2) {
    return MetricQuery{Point{z1, z2}, Direction{x1, x2}};
}

}  // namespace

TEST_CASE("closed forms") {
    const DomainSpec ball = DomainSpec::ball(2);
    // center: the metric is the euclidean norm
    CHECK(kobayashi_exact_model(ball, query(0, 0, 3, 4)).value == doctest::Approx(5.0));
    // radial direction at (r,0): 1/(1-r^2); tangential: 1/sqrt(1-r^2)
    CHECK(kobayashi_exact_model(ball, query(0.5, 0, 1, 0)).value == doctest::Approx(1.0 / 0.75));
    CHECK(kobayashi_exact_model(ball, query(0.5, 0, 0, 1)).value ==
          doctest::Approx(1.0 / std::sqrt(0.75)));

    const DomainSpec pd = DomainSpec::polydisc({1.0, 2.0});
    CHECK(kobayashi_exact_model(pd, query(0.5, 0, 1, 0)).value == doctest::Approx(1.0 / 0.75));
    CHECK(kobayashi_exact_model(pd, query(0, 0, 0, 1)).value == doctest::Approx(0.5));

    const DomainSpec sb = DomainSpec::stretched_ball(4.0);
    CHECK(kobayashi_exact_model(sb, query(0, 0, 1, 0)).value == doctest::Approx(1.0));
    CHECK(kobayashi_exact_model(sb, query(0, 0, 0, 1)).value == doctest::Approx(0.25));

    CHECK_THROWS_AS(kobayashi_exact_model(DomainSpec::egg({1, 2}), query(0, 0, 1, 0)),
                    std::invalid_argument);
    CHECK_THROWS_AS(kobayashi_exact_model(ball, query(2, 0, 1, 0)), std::domain_error);
}

TEST_CASE("upper bound dominates the closed form and is reproducible") {
    const DomainSpec ball = DomainSpec::ball(2);
    const OptimizerBudget budget = small_budget();
    for (const MetricQuery& q : {query(0.5, 0, 1, 0), query(cplx(0.2, 0.3), cplx(-0.4, 0.1),
                                                            cplx(1, 1), cplx(0, -2))}) {
        const double exact = kobayashi_exact_model(ball, q).value;
        const MetricBound up = kobayashi_upper(ball, q, budget);
        CHECK(up.kind == BoundKind::Upper);
        CHECK(up.value >= exact * (1.0 - 1e-9));
        CHECK(up.value <= exact * 1.01);
        CHECK_FALSE(up.method.empty());
        REQUIRE(up.witness_disc.has_value());
        // the witness is strictly interior and its derivative certifies the value
        const FeasibilityReport rep = feasibility(ball, *up.witness_disc);
        CHECK(rep.margin < 0.0);
        const Direction d0 = up.witness_disc->derivative_at(0.0);
        CHECK(euclid_norm(q.direction) / euclid_norm(d0) == doctest::Approx(up.value));
        // determinism: same seed, same value
        CHECK(kobayashi_upper(ball, q, budget).value == up.value);
    }
    CHECK_THROWS_AS(kobayashi_upper(ball, query(2, 0, 1, 0), budget), std::domain_error);
    CHECK_THROWS_AS(kobayashi_upper(ball, query(0, 0, 0, 0), budget), std::invalid_argument);
}

TEST_CASE("order: caratheodory <= kobayashi on every kind") {
    const OptimizerBudget budget = small_budget(5);
    const MetricQuery q = query(cplx(0.25, 0.1), cplx(-0.15, 0.2), cplx(0.7, -0.2), cplx(1, 0.4));
    for (const DomainSpec& dom :
         {DomainSpec::ball(2), DomainSpec::polydisc({1.0, 2.0}), DomainSpec::egg({1, 2}),
          DomainSpec::stretched_ball(4.0), DomainSpec::lempert(0.25)}) {
        CAPTURE(kind_name(dom.kind()));
        const MetricBound low = caratheodory_lower(dom, q, budget);
        const MetricBound up = kobayashi_upper(dom, q, budget);
        CHECK(low.kind == BoundKind::Lower);
        CHECK(low.value > 0.0);
        CHECK(low.value <= up.value * (1.0 + 1e-9));
    }
}

TEST_CASE("caratheodory is exact on the ball") {
    const DomainSpec ball = DomainSpec::ball(3);
    const MetricQuery q{Point{cplx(0.3, 0.2), cplx(-0.1, 0.4), cplx(0.05, 0.0)},
                        Direction{cplx(1, -1), cplx(0.3, 0.2), cplx(0, 1)}};
    const double exact = kobayashi_exact_model(ball, q).value;
    const MetricBound low = caratheodory_lower(ball, q, small_budget());
    CHECK(low.value == doctest::Approx(exact).epsilon(1e-12));
    REQUIRE(low.witness_map.has_value());
    // the witness map sends the domain into the unit disc with w(z) = 0
    const CandidateMap& map = *low.witness_map;
    CHECK(std::abs(candidate_evaluate(map, q.point)) < 1e-9);
    for (double t = 0.3; t < 1.0; t += 0.3) {
        Point w{cplx(0.6 * t, 0.1), cplx(0.0, -0.5 * t), cplx(0.4 * t, 0.2 * t)};
        if (ball.contains(w)) CHECK(std::abs(candidate_evaluate(map, w)) < 1.0 + 1e-9);
    }
}

TEST_CASE("candidate derivative matches finite differences") {
    const DomainSpec egg = DomainSpec::egg({1, 2});
    const MetricQuery q = query(cplx(0.3, 0.0), cplx(0.2, 0.1), cplx(1, 0), cplx(0.5, -0.5));
    const MetricBound low = caratheodory_lower(egg, q, small_budget(3));
    REQUIRE(low.witness_map.has_value());
    const double h = 1e-6;
    const cplx d = candidate_derivative(*low.witness_map, q.point, q.direction);
    Point zp = q.point;
    for (int i = 0; i < 2; ++i) zp[i] += h * q.direction[i];
    Point zm = q.point;
    for (int i = 0; i < 2; ++i) zm[i] -= h * q.direction[i];
    const cplx fd =
        (candidate_evaluate(*low.witness_map, zp) - candidate_evaluate(*low.witness_map, zm)) /
        (2.0 * h);
    CHECK(std::abs(d - fd) < 1e-6 * (1.0 + std::abs(d)));
}

TEST_CASE("linear functional sups are exact per kind") {
    CHECK(linear_functional_sup(DomainSpec::ball(2), {cplx(3, 0), cplx(0, 4)}) ==
          doctest::Approx(5.0));
    CHECK(linear_functional_sup(DomainSpec::polydisc({1.0, 2.0}), {cplx(1, 0), cplx(1, 0)}) ==
          doctest::Approx(3.0));
    CHECK(linear_functional_sup(DomainSpec::stretched_ball(4.0), {cplx(1, 0), cplx(1, 0)}) ==
          doctest::Approx(std::sqrt(1.0 + 16.0)));
    // egg axis functionals peak at the axis points
    const DomainSpec egg = DomainSpec::egg({1, 2});
    CHECK(linear_functional_sup(egg, {cplx(1, 0), cplx(0, 0)}) == doctest::Approx(1.0));
    CHECK(linear_functional_sup(egg, {cplx(0, 0), cplx(1, 0)}) == doctest::Approx(1.0));
    // generic functional: dominates a dense boundary sample, within 1e-6 of it
    const std::vector<cplx> c{cplx(0.8, 0.2), cplx(0.5, -0.4)};
    double sampled = 0.0;
    for (int a = 0; a <= 200; ++a) {
        const double x = a / 200.0;  // |z1| = x on the gauge curve, |z2| = (1-x^2)^{1/4}
        const double y = std::pow(std::max(0.0, 1.0 - x * x), 0.25);
        sampled = std::max(sampled, std::abs(c[0]) * x + std::abs(c[1]) * y);
    }
    const double sup = linear_functional_sup(egg, c);
    CHECK(sup >= sampled - 1e-9);
    CHECK(sup <= sampled + 1e-4);
}

TEST_CASE("egg direction bounds: closed forms and ordering") {
    for (double alpha : {0.0, 0.3, 0.7}) {
        const EggDirectionBounds normal = egg_direction_bounds(2, alpha, EggDirection::Normal);
        CHECK(normal.upper.value == doctest::Approx(1.0 / (1.0 - alpha * alpha)));
        CHECK(normal.lower.value == doctest::Approx(normal.upper.value));
        const EggDirectionBounds tang = egg_direction_bounds(2, alpha, EggDirection::Tangential);
        CHECK(tang.upper.value == doctest::Approx(std::pow(1.0 - alpha * alpha, -0.25)));
        CHECK(tang.lower.value <= tang.upper.value * (1.0 + 1e-12));
    }
    CHECK_THROWS_AS(egg_direction_bounds(2, 1.0, EggDirection::Normal), std::invalid_argument);
}

TEST_CASE("inclusion lower bound never exceeds the metric") {
    const DomainSpec ball = DomainSpec::ball(2);
    const MetricQuery q = query(0.4, 0.1, 1, 2);
    const MetricBound incl = kobayashi_lower_inclusion(ball, q);
    // the ball is its own circumscribing ball, so the bound is tight there
    CHECK(incl.kind == BoundKind::Exact);
    CHECK(incl.value == doctest::Approx(kobayashi_exact_model(ball, q).value).epsilon(1e-12));
    const DomainSpec lem = DomainSpec::lempert(0.25);
    const MetricQuery q2 = query(0.5, 0.1, 1, 0);
    const MetricBound lincl = kobayashi_lower_inclusion(lem, q2);
    CHECK(lincl.kind == BoundKind::Lower);
    CHECK(lincl.value <= kobayashi_upper(lem, q2, small_budget()).value * (1.0 + 1e-9));
}

TEST_CASE("direction comparability report") {
    const DomainSpec egg = DomainSpec::egg({1, 2});
    const ComparabilityReport rep = direction_comparability_report(
        egg, Point{cplx(0.3, 0.0), cplx(0.0, 0.0)}, Direction{cplx(1, 0), cplx(0, 0)},
        Direction{cplx(0, 0), cplx(1, 0)}, small_budget());
    CHECK(rep.difference == doctest::Approx(std::abs(rep.bound1.value - rep.bound2.value)));
    CHECK_THROWS_AS(direction_comparability_report(
                        egg, Point{cplx(0.999, 0.0), cplx(0.0, 0.0)},
                        Direction{cplx(1, 0), cplx(0, 0)}, Direction{cplx(0, 0), cplx(1, 0)},
                        small_budget()),
                    std::domain_error);
}
