#pragma once

#include <array>

#include "bubbleforge/numerics.hpp"

namespace bubbleforge {

/// Fractional-linear map w -> (a w + b) / (c w + d), ad - bc != 0.
struct MoebiusTransform {
    Complex a{1, 0}, b{0, 0}, c{0, 0}, d{1, 0};

    Complex apply(Complex w) const { return (a * w + b) / (c * w + d); }
    Complex deriv(Complex w) const {
        const Complex den = c * w + d;
        return (a * d - b * c) / (den * den);
    }
    MoebiusTransform compose(const MoebiusTransform& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
    MoebiusTransform scaled_by(Complex lambda) const { return {lambda * a, lambda * b, c, d}; }
    bool is_identity(double tol = 1e-14) const;

    // Unit-circle-preserving normal form e^{2 pi i theta} (w + a) / (1 + conj(a) w).
    static MoebiusTransform unit_circle(Complex a, double theta = 0.0);
    static MoebiusTransform scaling(Complex lambda) { return {lambda, 0, 0, 1}; }

    bool preserves_unit_circle(double tol = 1e-12) const;
};

/// Fixed points and their multipliers. For maps fixing infinity the point is
/// encoded as Complex(inf, 0). Parabolic maps report a doubled root with
/// multiplier 1.
struct FixedPointData {
    std::array<Complex, 2> points;
    std::array<Complex, 2> multipliers;
    bool parabolic = false;
};

FixedPointData fixed_points(const MoebiusTransform& m);

enum class CircleDynamics { HyperbolicOnCircle, Parabolic, NoCircleFixedPoints };

CircleDynamics classify_on_circle(const MoebiusTransform& m);

/// Complex rotation number of the circle map induced by F, shifted by omega:
/// tau = (1 / 2 pi i) ln mu(omega) with mu the multiplier of the attractor of
/// F_omega = e^{2 pi i omega} F. Real part normalized to [0, 1) (half-cylinder
/// coordinate). Requires Im omega >= 0 and circle preservation.
Complex moebius_tau(const MoebiusTransform& f, Complex omega);

/// Derivative H'(z) of the uniformizing coordinate of E(f+omega) for real
/// omega with F_omega hyperbolic on the circle:
///   H'(z) = w (R - A) / ((w - A)(w - R)),  w = e^{2 pi i z},
/// normalized so that H has degree +1 on a base-homotopic contour passing
/// below the attractor and above the repellor.
Complex uniformizing_derivative(const MoebiusTransform& f, double omega, Complex z);

/// Attractor/repellor of F_omega on or near the unit circle; helper shared by
/// moebius_tau, uniformizing_derivative and the perturbation module.
struct AttractorRepellor {
    Complex attractor;
    Complex repellor;
    Complex multiplier;  // at the attractor
};
AttractorRepellor attractor_repellor(const MoebiusTransform& f, Complex omega);

}  // namespace bubbleforge
