#pragma once

#include <optional>
#include <string>

#include "kobmetric/discs.hpp"
#include "kobmetric/domains.hpp"
#include "kobmetric/types.hpp"

namespace kobmetric {

struct MetricQuery {
    Point point;
    Direction direction;  // nonzero
};

enum class BoundKind { Upper, Lower, Exact };

enum class CandidateFamily {
    LinearFunctionalMobius,
    EggAutomorphismComponent,
    BallAutomorphismComponent,
};

// A scalar candidate map Omega -> D used for Caratheodory lower bounds.
// parameters layout depends on the family:
//   LinearFunctionalMobius:     c_1..c_n (functional), then the Mobius center
//   BallAutomorphismComponent:  the base point z, then the pairing vector u
//   EggAutomorphismComponent:   (alpha, m) packed as complex numbers
struct CandidateMap {
    CandidateFamily family;
    std::vector<cplx> parameters;
};

struct MetricBound {
    double value = 0.0;
    BoundKind kind = BoundKind::Upper;
    std::string method;
    std::optional<AnalyticDisc> witness_disc;
    std::optional<CandidateMap> witness_map;
};

// Witnesses are kept strictly interior: every feasibility test demands
// margin <= -kFeasibilitySlack, so all bounds are conservative.
inline constexpr double kFeasibilitySlack = 1e-4;

// Closed forms. Supported kinds: Ball, Polydisc, StretchedBall.
MetricBound kobayashi_exact_model(const DomainSpec& domain, const MetricQuery& q);

// Upper bound by explicit feasible analytic discs. Pipeline: exact best
// linear disc (bisection), boundary-stretch refinement (alternating
// projection along the Minkowski gauge), per-factor Mobius disc for the
// Polydisc kind, then the penalized Nelder-Mead engine (penalty weight
// ramped x10 per restart) on scaled coefficients; each stage ends with an
// exact radial feasibility rescale. Deterministic given budget.seed.
MetricBound kobayashi_upper(const DomainSpec& domain, const MetricQuery& q,
                            const OptimizerBudget& budget);

// Lower bound for F_K by inclusion monotonicity: the metric of the smallest
// circumscribing Ball (Polydisc |z|<2,|w|<2 for the Lempert kind).
MetricBound kobayashi_lower_inclusion(const DomainSpec& domain, const MetricQuery& q);

// Lower bound for F_C (hence for F_K) from candidate maps into the unit
// disc: linear functionals scaled by their exact sup over the domain,
// post-composed with a Mobius sending l(z) to 0, plus the automorphism
// component families where applicable.
MetricBound caratheodory_lower(const DomainSpec& domain, const MetricQuery& q,
                               const OptimizerBudget& budget);

// Evaluate a candidate map at a point / its derivative against a direction.
cplx candidate_evaluate(const CandidateMap& map, const Point& w);
cplx candidate_derivative(const CandidateMap& map, const Point& z, const Direction& xi);

// Exact sup of |l_c| = |sum_j c_j w_j| over the domain closure (per-kind
// closed forms; Egg(n=2) by concave stationary-point bisection).
double linear_functional_sup(const DomainSpec& domain, const std::vector<cplx>& c);

struct EggDirectionBounds {
    MetricBound upper;
    MetricBound lower;
};
enum class EggDirection { Normal, Tangential };

// Two-sided metric bounds on Egg(1,m) at (alpha, 0). Closed forms:
// Normal 1/(1-alpha^2) both sides; Tangential (1-alpha^2)^{-1/(2m)} both
// sides (linear-disc witness above, egg automorphism component below).
EggDirectionBounds egg_direction_bounds(int m, double alpha, EggDirection direction);

struct ComparabilityReport {
    MetricBound bound1;
    MetricBound bound2;
    double difference = 0.0;  // |bound1.value - bound2.value|
};

// Empirical direction-comparability gap at P for unit directions xi1, xi2.
// P must keep boundary_distance >= delta_compact.
ComparabilityReport direction_comparability_report(const DomainSpec& domain, const Point& P,
                                                   const Direction& xi1, const Direction& xi2,
                                                   const OptimizerBudget& budget,
                                                   double delta_compact = 0.1);

}  // namespace kobmetric
