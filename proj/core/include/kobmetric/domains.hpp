#pragma once

#include <optional>
#include <vector>

#include "kobmetric/types.hpp"

namespace kobmetric {

enum class DomainKind { Ball, Polydisc, Egg, Lempert, StretchedBall };

// A validated, immutable description of one of the five model domains.
//
// Defining functions are fixed as:
//   Ball            |z|^2 - 1
//   Polydisc        max_j (|z_j / r_j|^2 - 1)
//   Egg             sum_j |z_j|^{2 m_j} - 1
//   Lempert         max(|z|^2/4 - 1, |w|^2/4 - 1, |zw|/eps - 1)
//   StretchedBall   |z1|^2 + |z2/N|^2 - 1
//
// All five are complete circular (balanced): z in the closure and 0 <= s <= 1
// implies s z in the closure. Several routines rely on this.
class DomainSpec {
  public:
    static DomainSpec ball(int n);
    static DomainSpec polydisc(std::vector<double> radii);
    static DomainSpec egg(std::vector<int> exponents);
    static DomainSpec lempert(double epsilon);
    static DomainSpec stretched_ball(double N);

    DomainKind kind() const { return kind_; }
    int dimension() const { return dim_; }

    const std::vector<double>& radii() const { return radii_; }
    const std::vector<int>& exponents() const { return exponents_; }
    double epsilon() const { return epsilon_; }
    double stretch() const { return stretch_; }

    // rho(z): negative inside, zero on the boundary, positive outside.
    double defining_value(const Point& z) const;
    bool contains(const Point& z) const { return defining_value(z) < 0.0; }

    // Minkowski gauge mu(z) = inf { t > 0 : z/t inside closure }. Closed form
    // for every kind except Egg (scalar bisection). mu < 1 inside, = 1 on the
    // boundary. Used by the boundary-stretch disc refinement.
    double gauge(const Point& z) const;

    // Euclidean distance to the boundary. Closed form for Ball, Polydisc and
    // StretchedBall; for Egg and Lempert a documented approximation: bisection
    // along rays over a deterministic direction sample (see domains.cpp).
    double boundary_distance(const Point& z) const;

    // P - eps * nu with nu the unit outward normal from the analytic gradient
    // of the defining function. Throws if the gradient vanishes (Lempert
    // corner rays, egg axis points with m_j > 1 off-axis) or if the result
    // escapes the domain.
    Point normal_ray_point(const Point& boundary_point, double eps) const;

    // Real gradient of rho seen as a function of (Re z, Im z), reassembled as
    // the complex vector 2 * d(rho)/d(conj z); parallel to the outward normal.
    Point defining_gradient(const Point& z) const;

    // Radius of the smallest circumscribing Euclidean ball centered at 0.
    double circumscribing_radius() const;

    // Euclidean diameter (2x circumscribing radius: all kinds are balanced,
    // hence symmetric about 0).
    double diameter() const { return 2.0 * circumscribing_radius(); }

  private:
    DomainSpec() = default;

    DomainKind kind_ = DomainKind::Ball;
    int dim_ = 0;
    std::vector<double> radii_;     // Polydisc
    std::vector<int> exponents_;    // Egg
    double epsilon_ = 0.0;          // Lempert
    double stretch_ = 1.0;          // StretchedBall
};

const char* kind_name(DomainKind kind);

}  // namespace kobmetric
