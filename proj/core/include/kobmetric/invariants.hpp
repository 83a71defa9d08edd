#pragma once

#include <array>
#include <string>
#include <vector>

#include "kobmetric/domains.hpp"
#include "kobmetric/types.hpp"

namespace kobmetric {

// A sampled holomorphic candidate map between a domain and a model, described
// by a family tag plus its parameter vector. Parameter layout by family:
//   "ball-automorphism"          : center a (n entries)
//   "transported-automorphism"   : center a (2), stretch N (1)
//   "product-mobius-scaled"      : centers (n), scale (1)
//   "diagonal-linear"            : diagonal entries (n)
//   "general-linear"             : row-major matrix (n*n)
//   "affine-linear"              : base point (n), row-major matrix (n*n)
struct HolomorphicMapSample {
    std::string family;
    std::vector<cplx> parameters;
    double containment_margin = 0.0;  // max defining value over the checked sample
};

// Two-sided volume-invariant data at a point: c_lower <= C(z), k_upper >= K(z),
// so m_upper = k_upper / c_lower bounds the quotient M(z) = K(z)/C(z) from
// above, while M(z) >= 1 always.
struct VolumeInvariantEstimate {
    double c_lower = 0.0;
    double k_upper = 0.0;
    double m_upper = 0.0;
    double m_lower = 1.0;
    bool exact = false;  // set when witnesses are certified optimal (centers, ball)
    std::string method;
    HolomorphicMapSample c_witness;
    HolomorphicMapSample k_witness;
};

// Model-domain generalization: the ball is replaced by `model` with a fixed
// interior basepoint.
struct ModelSpec {
    DomainSpec model;
    Point basepoint;
};

// Polynomial holomorphic map of two complex variables given by its bidegree
// coefficient table: coefficients[j][p][q] multiplies z1^p z2^q in component j.
struct PolyMap2 {
    std::array<std::vector<std::vector<cplx>>, 2> coefficients;

    int degree1() const;
    int degree2() const;
    std::array<cplx, 2> evaluate(cplx z1, cplx z2) const;
};

// Lower bound for C(z) = sup |det phi'(z)| over holomorphic phi: domain -> B
// with phi(z) = 0, from explicit feasible candidates.
std::pair<double, HolomorphicMapSample> c_lower(const DomainSpec& domain, const Point& z,
                                                const OptimizerBudget& budget);

// Upper bound for K(z) = inf 1/|det psi'(0)| over psi: B -> domain, psi(0) = z.
std::pair<double, HolomorphicMapSample> k_upper(const DomainSpec& domain, const Point& z,
                                                const OptimizerBudget& budget);

// Combined two-sided estimate of the quotient invariant M(z).
VolumeInvariantEstimate quotient_upper(const DomainSpec& domain, const Point& z,
                                       const OptimizerBudget& budget);

// Torus-rotation average of a polynomial map fixing 0, with per-component
// weights e^{-i theta_j}: extracts the diagonal linear part (c1 z1, c2 z2)
// by tensor-product trapezoid quadrature, exact above the Nyquist node count.
// nodes = 0 picks the smallest exact rule; throws below max degree + 2.
std::array<cplx, 2> circular_average(const PolyMap2& map, int nodes = 0);

// Exact center value of M(0) for Egg(1, m): the averaging reduction justifies
// optimizing over linear maps only; diagonal scalings are solved by certified
// brute force (analytic containment, grid then local refinement), and a
// general-linear multistart refinement is recorded but never replaces the
// certified diagonal value.
VolumeInvariantEstimate circular_center_exact(const DomainSpec& egg);

// Same construction with the ball replaced by a model domain (implemented for
// model = Polydisc with basepoint 0).
VolumeInvariantEstimate model_quotient(const DomainSpec& domain, const Point& z,
                                       const ModelSpec& model, const OptimizerBudget& budget);

}  // namespace kobmetric
