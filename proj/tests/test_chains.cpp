#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "kobmetric/chains.hpp"

using namespace kobmetric;

namespace {

OptimizerBudget small_budget(std::uint64_t seed = 29) {
    OptimizerBudget b;
    b.max_iterations = 150;
    b.restarts = 2;
    b.degree = 6;
    b.seed = seed;
    return b;
}

// Kobayashi distance of the unit ball: tanh d(P,Q) = |phi_P(Q)| with
// 1 - |phi_P(Q)|^2 = (1-|P|^2)(1-|Q|^2) / |1 - <Q,P>|^2.
double ball_distance(const Point& P, const Point& Q) {
    const double num = (1.0 - norm_sq(P)) * (1.0 - norm_sq(Q));
    const double den = std::norm(cplx(1.0, 0.0) - hermitian_dot(Q, P));
    const double t2 = std::max(0.0, 1.0 - num / den);
    return std::atanh(std::sqrt(t2));
}

}  // namespace

TEST_CASE("one-disc bound is exact on the model kinds") {
    const OptimizerBudget budget = small_budget();
    const DomainSpec ball = DomainSpec::ball(2);

    const Point P{cplx(0.3, 0.1), cplx(0.0, 0.0)};
    const Point Q{cplx(-0.2, 0.0), cplx(0.4, 0.0)};
    auto leg = one_disc_distance_upper(ball, P, Q, budget);
    REQUIRE(leg.has_value());
    CHECK(leg->distance_upper == doctest::Approx(ball_distance(P, Q)).epsilon(1e-5));
    CHECK(leg->residuals[0] <= kEndpointTolerance);
    CHECK(leg->residuals[1] <= kEndpointTolerance);
    CHECK(euclid_norm(subtracted(leg->start(), P)) <= kEndpointTolerance);
    CHECK(euclid_norm(subtracted(leg->end(), Q)) <= kEndpointTolerance);
    // the normalized node is a parameter of the unit disc
    CHECK(std::abs(leg->node.parameter) < 1.0);

    // symmetry through the reversed geodesic
    auto rev = one_disc_distance_upper(ball, Q, P, budget);
    REQUIRE(rev.has_value());
    CHECK(rev->distance_upper == doctest::Approx(leg->distance_upper).epsilon(1e-6));

    // polydisc: the distance is the max of the per-factor disc distances
    const DomainSpec pd = DomainSpec::polydisc({1.0, 2.0});
    auto pleg = one_disc_distance_upper(pd, Point{cplx(0), cplx(0)},
                                        Point{cplx(0.5), cplx(1.0)}, budget);
    REQUIRE(pleg.has_value());
    CHECK(pleg->distance_upper == doctest::Approx(std::atanh(0.5)).epsilon(1e-5));

    // stretched ball: transported geodesic
    const DomainSpec sb = DomainSpec::stretched_ball(4.0);
    auto sleg = one_disc_distance_upper(sb, Point{cplx(0), cplx(0)},
                                        Point{cplx(0), cplx(2.0)}, budget);
    REQUIRE(sleg.has_value());
    CHECK(sleg->distance_upper == doctest::Approx(std::atanh(0.5)).epsilon(1e-5));

    // degenerate pair: zero distance
    auto dleg = one_disc_distance_upper(ball, P, P, budget);
    REQUIRE(dleg.has_value());
    CHECK(dleg->distance_upper == doctest::Approx(0.0).epsilon(1e-12));

    CHECK_THROWS_AS(one_disc_distance_upper(ball, Point{cplx(2), cplx(0)}, Q, budget),
                    std::invalid_argument);
}

TEST_CASE("analytic lower bound for the thin-neck family") {
    // eps = 2^{-9}: sqrt(L)/sqrt(log 2) = 3, so r_min = 1/2 exactly
    const LempertLowerBound nine = lempert_lower_bound(std::pow(2.0, -9.0));
    CHECK(nine.r_min == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(nine.distance_lower == doctest::Approx(std::atanh(0.5)).epsilon(1e-12));

    // degenerate regime: the constraint is vacuous for eps >= 1/2
    CHECK(lempert_lower_bound(0.5).distance_lower == 0.0);
    CHECK(lempert_lower_bound(0.7).distance_lower == 0.0);

    // monotone in the neck width
    double prev = -1.0;
    for (int k = 2; k <= 12; ++k) {
        const double d = lempert_lower_bound(std::pow(2.0, -k)).distance_lower;
        CHECK(d >= prev);
        prev = d;
    }

    CHECK_THROWS_AS(lempert_lower_bound(0.0), std::invalid_argument);
    CHECK_THROWS_AS(lempert_lower_bound(1.0), std::invalid_argument);
    CHECK_THROWS_AS(lempert_lower_bound(-0.1), std::invalid_argument);
}

TEST_CASE("harnack bounds") {
    auto [lo0, hi0] = harnack_poisson_bounds(0.0);
    CHECK(lo0 == 1.0);
    CHECK(hi0 == 1.0);
    auto [lo, hi] = harnack_poisson_bounds(0.5);
    CHECK(lo == doctest::Approx(1.0 / 3.0));
    CHECK(hi == doctest::Approx(3.0));
    CHECK(lo * hi == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(harnack_poisson_bounds(1.0), std::domain_error);
    CHECK_THROWS_AS(harnack_poisson_bounds(-0.1), std::domain_error);
}

TEST_CASE("thin-neck one-disc bound brackets with the analytic lower bound") {
    const double eps = 0.25;
    const DomainSpec lem = DomainSpec::lempert(eps);
    const Point P{cplx(1.0), cplx(0.0)};
    const Point Q{cplx(0.0), cplx(1.0)};
    auto leg = one_disc_distance_upper(lem, P, Q, small_budget(41));
    REQUIRE(leg.has_value());
    CHECK(leg->residuals[0] <= kEndpointTolerance);
    CHECK(leg->residuals[1] <= kEndpointTolerance);
    const LempertLowerBound lower = lempert_lower_bound(eps);
    CHECK(lower.distance_lower <= leg->distance_upper + 1e-9);
}

TEST_CASE("chains are monotone in the leg count and never beat the distance") {
    const DomainSpec ball = DomainSpec::ball(2);
    const Point P{cplx(-0.5), cplx(0.0)};
    const Point Q{cplx(0.5), cplx(0.0)};
    const double ref = ball_distance(P, Q);
    const OptimizerBudget budget = small_budget(43);

    double prev = 1e9;
    for (int k = 1; k <= 3; ++k) {
        const ChainPath chain = chain_distance_upper(ball, P, Q, k, budget);
        CHECK(chain.legs.size() == static_cast<std::size_t>(k));
        CHECK(chain.waypoints.size() == static_cast<std::size_t>(k) + 1);
        double sum = 0.0;
        for (const auto& leg : chain.legs) sum += leg.distance_upper;
        CHECK(chain.total == doctest::Approx(sum).epsilon(1e-12));
        CHECK(chain.total >= ref - 1e-5);       // upper bounds never undercut
        CHECK(chain.total <= prev + 1e-9);      // nested initialization
        prev = chain.total;
    }
    CHECK(prev == doctest::Approx(ref).epsilon(1e-4));

    CHECK_THROWS_AS(chain_distance_upper(ball, P, Q, 0, budget), std::invalid_argument);
}

TEST_CASE("merging adjacent discs") {
    const DomainSpec ball = DomainSpec::ball(2);
    const OptimizerBudget budget = small_budget(47);
    const Point P{cplx(-0.4), cplx(0.1)};
    const Point Q{cplx(0.4), cplx(0.0)};

    auto forward = one_disc_distance_upper(ball, P, Q, budget);
    auto back = one_disc_distance_upper(ball, Q, P, budget);
    auto still = one_disc_distance_upper(ball, Q, Q, budget);
    REQUIRE(forward.has_value());
    REQUIRE(back.has_value());
    REQUIRE(still.has_value());

    // a degenerate second leg is absorbed
    auto absorbed = merge_discs(ball, *forward, *still, 0.5, budget);
    REQUIRE(absorbed.has_value());
    CHECK(absorbed->distance_upper == forward->distance_upper);

    // out-and-back collapses to the zero disc under a generous delta
    auto loop = merge_discs(ball, *forward, *back, 10.0, budget);
    REQUIRE(loop.has_value());
    CHECK(loop->distance_upper <= 1e-9);

    // the same pair under a tiny delta fails the proximity gate
    CHECK_FALSE(merge_discs(ball, *forward, *back, 1e-12, budget).has_value());

    // legs that do not share a waypoint are rejected outright
    CHECK_THROWS_AS(merge_discs(ball, *forward, *forward, 0.5, budget), std::invalid_argument);
}

TEST_CASE("nets and signatures") {
    const DomainSpec ball = DomainSpec::ball(2);
    // spacing 0.8 on the bounding lattice leaves the center and one step along
    // each of the 8 real axes
    const std::vector<Point> net = domain_net(ball, 0.8);
    CHECK(net.size() == 9);
    for (const Point& z : net) CHECK(ball.defining_value(z) < 0.0);

    // a fine request is coarsened to a bounded lattice rather than exploding
    const std::vector<Point> fine = domain_net(ball, 0.01);
    CHECK(fine.size() > 0);
    CHECK(fine.size() <= 300000);

    CHECK_THROWS_AS(domain_net(ball, 0.0), std::invalid_argument);

    auto leg = one_disc_distance_upper(ball, Point{cplx(-0.5), cplx(0.0)},
                                       Point{cplx(0.5), cplx(0.0)}, small_budget());
    REQUIRE(leg.has_value());
    const NetSignature sig = net_signature(ball, *leg, net, 0.8, 0.5);
    CHECK_FALSE(sig.net_points.empty());
    CHECK(std::is_sorted(sig.net_points.begin(), sig.net_points.end()));
    CHECK(sig.net_points.size() <= static_cast<std::size_t>(kMaxSignaturePoints));
    CHECK_FALSE(sig.disc_nodes.empty());
    CHECK(sig.disc_nodes.front() == cplx(0.0, 0.0));
    CHECK(sig.disc_nodes.back() == leg->node.parameter);
    CHECK_THROWS_AS(net_signature(ball, *leg, net, 0.0, 0.5), std::invalid_argument);

    // shortening a redundant chain recovers the single geodesic leg
    const ChainPath chain = chain_distance_upper(ball, Point{cplx(-0.5), cplx(0.0)},
                                                 Point{cplx(0.5), cplx(0.0)}, 3, small_budget());
    const ChainPath shortened = shorten_chain(ball, chain, 0.35, 0.3, small_budget());
    CHECK(shortened.total <= chain.total + 1e-12);
    CHECK(shortened.legs.size() == 1);
    CHECK(shortened.total ==
          doctest::Approx(ball_distance(Point{cplx(-0.5), cplx(0.0)}, Point{cplx(0.5), cplx(0.0)}))
              .epsilon(1e-4));
}
