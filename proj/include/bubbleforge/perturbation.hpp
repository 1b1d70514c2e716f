#pragma once

#include <utility>
#include <vector>

#include "bubbleforge/circle_map.hpp"
#include "bubbleforge/complex_rot.hpp"
#include "bubbleforge/rotation.hpp"

namespace bubbleforge {

/// d tau(f + eps g) / d eps at eps = 0, along the family f_eps = f + eps g,
/// for a Moebius-induced f and real omega with rot(f + omega) = 0 hyperbolic:
///   tau'(0) = contour integral of (g(z) / f'(z)) H'(z)^2 dz
/// over a cylinder contour passing below the attractor and above the repellor
/// of f + omega. The default contour is chosen from those fixed points; a
/// caller-supplied one must satisfy the same separation (checked, throws
/// GeometryError otherwise).
Complex dtau_depsilon(const CircleMap& f, const TrigPolyDisplacement& g, double omega,
                      const Contour* contour = nullptr);

/// d tau / d omega from an interior conjugacy solution:
///   tau'(omega) = contour integral of Phi'(z)^2 / f'(z) dz
/// over the solution's contour (or a homotopic caller-supplied one). For the
/// rigid rotation this is identically 1.
Complex dtau_domega(const CircleMap& f, const ConjugacySolution& solution,
                    const Contour* contour = nullptr);

/// First-order model of the bubble over I_0 of the family f + eps g:
/// samples omega in the interior of I_0(f) and records
///   tau_lin(omega) = tau-bar_f(omega) + eps * dtau_depsilon(f, g, omega).
/// Samples where the correction is no longer perturbative, i.e.
///   eps |tau'(0)| > cutoff_ratio * Im tau-bar,
/// are dropped and counted instead of extrapolated.
struct InfinitesimalBubble {
    RotationInterval interval;
    double eps = 0.0;
    double cutoff_ratio = 0.0;
    std::vector<std::pair<double, Complex>> samples;  // (omega, tau_lin), kept
    int dropped = 0;                                  // samples over the cutoff
};

InfinitesimalBubble infinitesimal_bubble(const CircleMap& f, const TrigPolyDisplacement& g,
                                         double eps, int n_samples,
                                         double cutoff_ratio = 0.5);

}  // namespace bubbleforge
