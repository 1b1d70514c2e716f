#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "bubbleforge/circle_map.hpp"
#include "bubbleforge/numerics.hpp"
#include "bubbleforge/rotation.hpp"

namespace bubbleforge {

/// Linearizing chart at a hyperbolic fixed point a with multiplier lambda:
/// to_linear (= psi^{-1}) satisfies to_linear(f(z)) = lambda * to_linear(z),
/// to_linear(a) = 0, to_linear'(a) = 1; to_cylinder is its inverse.
class KoenigsChart {
  public:
    double point() const;
    double multiplier() const;

    Complex to_linear(Complex z) const;
    Complex to_linear_deriv(Complex z) const;
    Complex to_cylinder(Complex zeta) const;

    double to_linear(double x) const { return to_linear(Complex(x, 0)).real(); }
    double to_cylinder(double t) const { return to_cylinder(Complex(t, 0)).real(); }

  private:
    friend KoenigsChart koenigs_chart(const CircleMap&, double, double);
    struct Impl;
    std::shared_ptr<const Impl> impl_;
};

/// Builds the chart by the Koenigs limit (forward orbits at attractors,
/// inverse orbits at repellors) with geometric-sequence extrapolation.
/// Throws PreconditionError within parabolic tolerance |lambda - 1| <= 1e-8,
/// ConvergenceError if the limit does not stabilize.
KoenigsChart koenigs_chart(const CircleMap& f, double point, double multiplier);

/// Transition map psi_{j;j+1} = psi_{j+1}^{-1} o psi_j between adjacent
/// linearizing charts; maps positive reals to negative reals and satisfies
/// psi(lambda_j t) = lambda_{j+1} psi(t).
struct TransitionMap {
    int index = 0;  // j, between fixed point j and j+1 (cyclic)
    double lambda_from = 1.0;
    double lambda_to = 1.0;
    std::function<double(double)> eval;
};

/// The full classification data of a hyperbolic diffeomorphism with rot = 0:
/// 2m transition maps between consecutive charts.
std::vector<TransitionMap> transition_maps(const CircleMap& f);

/// Closed curve gamma through the linearizing charts: circle arcs in chart
/// coordinates, below attractors and above repellors, with f(gamma) strictly
/// above gamma.
struct AscendingCurve {
    Contour contour;                 // winding 1 on the cylinder
    PeriodicOrbitSet orbits;
    std::vector<double> junctions;   // real points where gamma meets R/Z
    double amplitude = 0.0;
};

/// Throws PreconditionError for non-hyperbolic maps / rot != 0, GeometryError
/// when the amplitude leaves the band or the ordering check fails.
AscendingCurve ascending_curve(const CircleMap& f, double amplitude);

}  // namespace bubbleforge
