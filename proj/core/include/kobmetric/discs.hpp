#pragma once

#include <vector>

#include "kobmetric/domains.hpp"
#include "kobmetric/types.hpp"

namespace kobmetric {

inline constexpr int kDefaultMaxDegree = 12;

// Truncated polynomial holomorphic map D -> C^n:
//   phi(zeta) = sum_{k=0}^{d} a_k zeta^k.
//
// The degree cap is per-instance: metric searches keep the default 12, while
// the Lempert feasible-disc constructor builds discs of degree in the
// thousands and passes an explicit cap.
class AnalyticDisc {
  public:
    AnalyticDisc(std::vector<Point> coefficients, int max_degree = kDefaultMaxDegree);

    static AnalyticDisc constant(Point a0, int max_degree = kDefaultMaxDegree);
    static AnalyticDisc linear(Point a0, Point a1, int max_degree = kDefaultMaxDegree);

    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    int max_degree() const { return max_degree_; }
    int dimension() const { return static_cast<int>(coeffs_[0].size()); }
    const std::vector<Point>& coefficients() const { return coeffs_; }

    Point evaluate(cplx zeta) const;        // Horner; requires |zeta| <= 1 + 1e-12
    Direction derivative_at(cplx zeta) const;  // exact polynomial derivative

    // Truncated expansion of phi((zeta + a) / (1 + conj(a) zeta)) to this
    // disc's max degree. The dropped tail is geometric with ratio |a|; the
    // returned disc stores the tail estimate from its own last coefficient.
    AnalyticDisc precompose_mobius(cplx a) const;

    // sum of |a_k| over the last `count` coefficients -- a cheap tail gauge.
    double coefficient_tail_norm(int count = 3) const;

  private:
    std::vector<Point> coeffs_;
    int max_degree_;
};

// |parameter| < 1, a marked point of the unit disc (chain nodes etc).
struct DiscNode {
    cplx parameter;
};

struct FeasibilityReport {
    double margin = 0.0;   // max over samples of defining_value(phi(zeta))
    int sample_count = 0;
    cplx worst_parameter = 0.0;
};

// Max of the defining function over the image of the unit circle, sampled at
// n_angles equispaced points. Since the defining functions are subharmonic
// along analytic discs, the circle max dominates the interior up to sampling
// error; callers that need certainty re-check on a denser circle.
FeasibilityReport feasibility(const DomainSpec& domain, const AnalyticDisc& disc,
                              int n_angles = 0);

// artanh(|(a-b)/(1-conj(a)b)|); the induced infinitesimal metric at 0 is |xi|.
double poincare_distance(cplx a, cplx b);

inline double poincare_of_radius(double r) { return std::atanh(r); }

}  // namespace kobmetric
