#include "bubbleforge/moebius.hpp"

#include <cmath>
#include <limits>

#include "bubbleforge/errors.hpp"

namespace bubbleforge {

namespace {

Complex cis(double x) { return std::exp(Complex(0, kTwoPi * x)); }
Complex cisc(Complex z) { return std::exp(Complex(0, kTwoPi) * z); }

bool near(double x, double y, double tol) { return std::abs(x - y) <= tol; }

}  // namespace

bool MoebiusTransform::is_identity(double tol) const {
    // identity iff b = c = 0 and a = d (up to common scale)
    const double scale = std::abs(a) + std::abs(b) + std::abs(c) + std::abs(d);
    return std::abs(b) <= tol * scale && std::abs(c) <= tol * scale &&
           std::abs(a - d) <= tol * scale;
}

MoebiusTransform MoebiusTransform::unit_circle(Complex a, double theta) {
    if (std::abs(a) >= 1.0)
        throw PreconditionError("MoebiusTransform::unit_circle: |a| must be < 1");
    const Complex e = cis(theta);
    return {e, e * a, std::conj(a), Complex(1, 0)};
}

bool MoebiusTransform::preserves_unit_circle(double tol) const {
    for (int j = 0; j < 16; ++j) {
        const Complex w = cis(static_cast<double>(j) / 16.0);
        if (!near(std::abs(apply(w)), 1.0, tol)) return false;
    }
    return true;
}

FixedPointData fixed_points(const MoebiusTransform& m) {
    if (m.is_identity())
        throw PreconditionError("fixed_points: identity transform has no isolated fixed points");
    const Complex B = m.d - m.a;  // c w^2 + B w - b = 0
    const double scale = std::abs(m.a) + std::abs(m.b) + std::abs(m.c) + std::abs(m.d);
    FixedPointData out;
    if (std::abs(m.c) <= 1e-15 * scale) {
        // affine: one fixed point at infinity
        const Complex inf(std::numeric_limits<double>::infinity(), 0);
        if (std::abs(B) <= 1e-14 * scale) {
            out.points = {inf, inf};
            out.multipliers = {Complex(1, 0), Complex(1, 0)};
            out.parabolic = true;  // translation
            return out;
        }
        const Complex p = m.b / B;
        out.points = {p, inf};
        out.multipliers = {m.a / m.d, m.d / m.a};
        out.parabolic = false;
        return out;
    }
    const Complex disc = B * B + 4.0 * m.b * m.c;
    Complex sq = std::sqrt(disc);
    if (std::abs(B + sq) < std::abs(B - sq)) sq = -sq;  // |B + sq| maximal
    const Complex t = -0.5 * (B + sq);
    const Complex r1 = t / m.c;
    const Complex r2 = (std::abs(t) > 0) ? -m.b / t : -B / (2.0 * m.c);
    const double sep = std::abs(r1 - r2);
    if (sep <= 1e-7 * std::max({std::abs(r1), std::abs(r2), 1.0})) {
        const Complex p = 0.5 * (r1 + r2);
        out.points = {p, p};
        out.multipliers = {Complex(1, 0), Complex(1, 0)};
        out.parabolic = true;
        return out;
    }
    out.points = {r1, r2};
    out.multipliers = {m.deriv(r1), m.deriv(r2)};
    out.parabolic = false;
    return out;
}

CircleDynamics classify_on_circle(const MoebiusTransform& m) {
    if (!m.preserves_unit_circle())
        throw ConsistencyError("classify_on_circle: transform does not preserve the unit circle");
    const FixedPointData fp = fixed_points(m);
    if (fp.parabolic) {
        if (!near(std::abs(fp.points[0]), 1.0, 1e-6))
            throw ConsistencyError("classify_on_circle: parabolic point off the unit circle");
        return CircleDynamics::Parabolic;
    }
    const bool on0 = near(std::abs(fp.points[0]), 1.0, 1e-9);
    const bool on1 = near(std::abs(fp.points[1]), 1.0, 1e-9);
    if (on0 && on1) return CircleDynamics::HyperbolicOnCircle;
    if (!on0 && !on1) return CircleDynamics::NoCircleFixedPoints;
    throw ConsistencyError("classify_on_circle: exactly one fixed point on the circle");
}

AttractorRepellor attractor_repellor(const MoebiusTransform& f, Complex omega) {
    const MoebiusTransform fo = f.scaled_by(cisc(omega));
    const FixedPointData fp = fixed_points(fo);
    AttractorRepellor ar;
    if (fp.parabolic) {
        ar.attractor = ar.repellor = fp.points[0];
        ar.multiplier = Complex(1, 0);
        return ar;
    }
    const double m0 = std::abs(fp.multipliers[0]);
    const double m1 = std::abs(fp.multipliers[1]);
    if (omega.imag() > 0.0) {
        if (std::abs(m0 - m1) <= 1e-13 * (m0 + m1))
            throw ConsistencyError(
                "attractor_repellor: ambiguous attractor for Im omega > 0");
        const int i = (m0 < m1) ? 0 : 1;
        ar.attractor = fp.points[i];
        ar.repellor = fp.points[1 - i];
        ar.multiplier = fp.multipliers[i];
        return ar;
    }
    // real omega: hyperbolic on circle -> pick |mu| < 1; otherwise the inner point
    if (std::abs(m0 - m1) > 1e-12 * (m0 + m1)) {
        const int i = (m0 < m1) ? 0 : 1;
        ar.attractor = fp.points[i];
        ar.repellor = fp.points[1 - i];
        ar.multiplier = fp.multipliers[i];
        return ar;
    }
    const int i = (std::abs(fp.points[0]) < std::abs(fp.points[1])) ? 0 : 1;
    ar.attractor = fp.points[i];
    ar.repellor = fp.points[1 - i];
    ar.multiplier = fp.multipliers[i];
    return ar;
}

Complex moebius_tau(const MoebiusTransform& f, Complex omega) {
    if (!f.preserves_unit_circle())
        throw PreconditionError("moebius_tau: transform must preserve the unit circle");
    if (omega.imag() < -1e-12)
        throw PreconditionError("moebius_tau: Im omega must be >= 0");
    const AttractorRepellor ar = attractor_repellor(f, omega);
    Complex tau = std::log(ar.multiplier) / Complex(0, kTwoPi);
    tau -= std::floor(tau.real());  // half-cylinder coordinate, Re in [0, 1)
    if (tau.imag() < 0.0 && tau.imag() > -1e-12) tau = Complex(tau.real(), 0.0);
    return tau;
}

Complex uniformizing_derivative(const MoebiusTransform& f, double omega, Complex z) {
    const MoebiusTransform fo = f.scaled_by(cis(omega));
    if (classify_on_circle(fo) != CircleDynamics::HyperbolicOnCircle)
        throw PreconditionError(
            "uniformizing_derivative: F_omega must be hyperbolic on the circle");
    const AttractorRepellor ar = attractor_repellor(f, Complex(omega, 0));
    const Complex w = cisc(z);
    if (std::abs(w - ar.attractor) < 1e-12 || std::abs(w - ar.repellor) < 1e-12)
        throw DomainError("uniformizing_derivative: z is at a fixed point (pole)");
    return w * (ar.repellor - ar.attractor) / ((w - ar.attractor) * (w - ar.repellor));
}

}  // namespace bubbleforge
