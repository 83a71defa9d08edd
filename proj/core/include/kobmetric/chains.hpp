#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "kobmetric/discs.hpp"
#include "kobmetric/domains.hpp"
#include "kobmetric/types.hpp"

namespace kobmetric {

// Endpoint residuals above this invalidate a one-disc result.
inline constexpr double kEndpointTolerance = 1e-6;

// One analytic disc phi with phi(0) = P and phi(node) = Q, where node is real
// in (0,1) after normalization (the first node is always 0; any disc through
// two prescribed points can be brought to this form by a Mobius change of
// parameter and a rotation). distance_upper = artanh(node) bounds the
// Kobayashi distance d(P, Q) from above.
struct OneDiscResult {
    double distance_upper = 0.0;
    AnalyticDisc disc;
    DiscNode node;
    std::array<double, 2> residuals{0.0, 0.0};  // |phi(0) - P|, |phi(node) - Q|

    Point start() const { return disc.evaluate(0.0); }
    Point end() const { return disc.evaluate(node.parameter); }
};

// A chain of discs joining P = waypoints[0] to Q = waypoints[k]; legs[i]
// joins waypoints[i] to waypoints[i+1] and total is the sum of leg distances.
struct ChainPath {
    std::vector<Point> waypoints;
    std::vector<OneDiscResult> legs;
    double total = 0.0;
};

// Which points of a fixed eta-net of the domain a disc's image visits (within
// eta), probed on a Poincare eta'-net of disc parameters. Legs with equal
// signatures trace nearby images and are the first candidates for merging.
struct NetSignature {
    std::vector<int> net_points;   // sorted indices into the eta-net
    std::vector<cplx> disc_nodes;  // the disc parameters probed
};

// Cardinality cap for a signature's net_points.
inline constexpr int kMaxSignaturePoints = 512;

// Upper bound for the one-disc distance d(P,Q): minimizes artanh(r) over
// feasible polynomial discs with phi(0) = P pinned and phi(r) = Q enforced
// exactly by interpolating the linear coefficient. Candidates: the straight
// segment disc, exact geodesic discs where the domain is a ball up to a
// linear change of coordinates (Ball, StretchedBall) or a product of discs
// (Polydisc), a dedicated two-branch outer-function construction for the
// Lempert kind between (1,0) and (0,1), and a penalized Nelder-Mead refinement
// of the best candidate. Returns nullopt when no feasible disc with endpoint
// residual <= kEndpointTolerance is found within the budget.
std::optional<OneDiscResult> one_disc_distance_upper(const DomainSpec& domain, const Point& P,
                                                     const Point& Q,
                                                     const OptimizerBudget& budget);

struct LempertLowerBound {
    double r_min = 0.0;
    double distance_lower = 0.0;
};

// Analytic lower bound for the distance between (1,0) and (0,1) in the
// Lempert kind with parameter epsilon: any feasible normalization
// phi(0) = (1,0), phi(r) = (0,1) forces log(1/eps) <= ((1+r)/(1-r))^2 log 2,
// hence r >= r_min = (sqrt(L) - sqrt(log 2))/(sqrt(L) + sqrt(log 2)) with
// L = log(1/eps), and distance_lower = artanh(r_min). For L <= log 2 the
// bound degenerates to r_min = 0.
LempertLowerBound lempert_lower_bound(double epsilon);

// Harnack bounds for the Poisson kernel at radius r:
// (1-r)/(1+r) <= P_r(e^{i theta}) <= (1+r)/(1-r).
std::pair<double, double> harnack_poisson_bounds(double r);

// Upper bound for the Kobayashi distance by a k-leg chain. Builds the chain
// incrementally: starts from the one-disc bound, then repeatedly inserts a
// waypoint and runs coordinate descent over the interior waypoints (each leg
// solved by one_disc_distance_upper, updates accepted only when the summed
// distance drops by more than the disc solver's interiority noise floor, so
// waypoint moves that merely shuffle the solver's boundary slack between the
// legs are not taken). The nested initialization makes total nonincreasing
// in k.
// Throws std::runtime_error if any leg fails to produce a feasible disc.
ChainPath chain_distance_upper(const DomainSpec& domain, const Point& P, const Point& Q, int k,
                               const OptimizerBudget& budget);

// Attempts to replace two adjacent legs by a single disc from leg1's start to
// leg2's end. Preconditions: leg1 ends where leg2 starts (throws otherwise);
// the two discs must be delta-close in sup distance over a fixed parameter
// grid (returns nullopt otherwise). Returns the merged disc iff its distance
// does not exceed the sum of the two legs; absence is a valid outcome. A
// degenerate leg (equal endpoints) is absorbed: the other leg is returned.
std::optional<OneDiscResult> merge_discs(const DomainSpec& domain, const OneDiscResult& leg1,
                                         const OneDiscResult& leg2, double delta,
                                         const OptimizerBudget& budget = {});

// Deterministic eta-net of the domain: the interior points of an axis-aligned
// lattice of spacing eta over the bounding box (coarsened if the lattice
// would exceed a size cap, so the net is always finite and reproducible).
std::vector<Point> domain_net(const DomainSpec& domain, double eta);

// Signature of one leg against a fixed net (see NetSignature).
NetSignature net_signature(const DomainSpec& domain, const OneDiscResult& leg,
                           const std::vector<Point>& net, double eta, double eta_prime);

// Chain shortening: repeatedly attempts merge_discs on adjacent legs --
// first pairs sharing a net signature, then all adjacent pairs -- accepting
// only merges that do not increase the total, until no merge is accepted.
// The result's total is never larger than the input's.
ChainPath shorten_chain(const DomainSpec& domain, const ChainPath& chain, double eta,
                        double eta_prime, const OptimizerBudget& budget = {});

}  // namespace kobmetric
