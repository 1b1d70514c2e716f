#pragma once

#include <vector>

#include "bubbleforge/circle_map.hpp"

namespace bubbleforge {

/// Reduced rational p/q with gcd(p, q) = 1 and 0 <= p/q < 1.
struct RationalRotation {
    long p = 0;
    long q = 1;

    static RationalRotation make(long p, long q);
    double value() const { return static_cast<double>(p) / static_cast<double>(q); }
};

enum class RationalCompare { Less, Equal, Greater };

/// Certified trichotomy rot(f) <? p/q via the zero set of F^q - id - p.
/// Throws UndecidedError when the refinement budget is exhausted near a
/// tangential zero, PreconditionError for q beyond the configured bound (64).
RationalCompare compare_to_rational(const CircleMap& f, RationalRotation r);

/// Rotation number to within tol: Farey bisection driven by
/// compare_to_rational, falling back to orbit-average bracketing.
/// Throws ConvergenceError (carrying the best bracket) on budget exhaustion.
double rotation_number(const CircleMap& f, double tol);

struct RotationInterval {
    RationalRotation rational;
    double left = 0.0;   // mod 1; may exceed `right` when the interval wraps
    double right = 0.0;  // mod 1
    bool degenerate = false;

    double length() const;  // cyclic length
};

/// The interval I_{p/q} = { omega : rot(f + omega) = p/q }, endpoints to tol.
RotationInterval rational_interval(const CircleMap& f, RationalRotation r, double tol);

struct PeriodicOrbit {
    double point = 0.0;  // mod 1
    long period = 1;
    double multiplier = 1.0;  // (F^q)'(point)
    bool hyperbolic = false;
};

struct PeriodicOrbitSet {
    std::vector<PeriodicOrbit> orbits;  // sorted by point
    bool all_hyperbolic() const;
};

/// All periodic points of rotation number p/q with multipliers.
PeriodicOrbitSet periodic_orbits(const CircleMap& f, RationalRotation r);

/// Distortion D_f = integral over the circle of |f''/f'| dx, to 1e-8.
double distortion(const CircleMap& f);

}  // namespace bubbleforge
