#pragma once

#include <algorithm>
#include <memory>
#include <string>
#include <vector>

#include "bubbleforge/numerics.hpp"

namespace bubbleforge {

/// Displacement given by a real trigonometric polynomial
///   d(x) = c + sum_k a_k cos(2 pi k x) + b_k sin(2 pi k x).
struct TrigPolyDisplacement {
    double c = 0.0;
    std::vector<double> a;  // cos coefficients, a[k-1] for frequency k
    std::vector<double> b;  // sin coefficients

    static TrigPolyDisplacement sine(int n, double amplitude);

    int degree() const { return static_cast<int>(std::max(a.size(), b.size())); }
    Complex eval(Complex z) const;
    Complex deriv(Complex z) const;
    Complex deriv2(Complex z) const;
    double eval(double x) const { return eval(Complex(x, 0)).real(); }
};

/// An analytic orientation-preserving circle diffeomorphism together with its
/// complex extension on a band |Im z| < analyticity_band(). Values are
/// immutable after construction and safe to share across threads.
///
/// Maps may carry a complex shift: shifted(omega) evaluates to f(z) + omega.
/// The real lift is only available when the shift is real.
class CircleMap {
  public:
    enum class Kind { Rotation, TrigPoly, Moebius, Perturbed, Conjugated };

    static CircleMap rotation(double c);
    static CircleMap trig_poly(TrigPolyDisplacement d, double band = kDefaultTrigBand);
    // f = pi^{-1} o F o pi with F(w) = (w + a) / (1 + a w), |a| < 1 real.
    static CircleMap moebius_induced(double a);
    static CircleMap perturbed(const CircleMap& base, TrigPolyDisplacement g, double eps);
    // h o f o h^{-1} for a trig-poly diffeomorphism h (lift x + d(x)).
    static CircleMap conjugated(const CircleMap& f, TrigPolyDisplacement h_displacement);

    CircleMap shifted(Complex omega) const;

    Kind kind() const { return kind_; }
    Complex offset() const { return offset_; }
    double analyticity_band() const { return band_; }
    double moebius_parameter() const;  // Moebius kind only
    std::string spec_string() const;   // round-trips through the CLI mini-language

    // Lift F with F(x+1) = F(x) + 1; requires a real shift.
    double lift(double x) const;
    double lift_deriv(double x) const;
    double lift_deriv2(double x) const;

    // Complex extension; throws DomainError outside the band.
    Complex eval(Complex z) const;
    Complex deriv(Complex z) const;
    Complex deriv2(Complex z) const;

    // Inverse by Newton iteration from `seed`; real inverse picks its own seed.
    Complex inverse(Complex value, Complex seed) const;
    double inverse_real(double value) const;

    static constexpr double kDefaultTrigBand = 0.05;

  private:
    CircleMap() = default;
    void validate() const;  // diffeomorphism check on a grid; throws loudly
    Complex inverse_h(Complex z) const;     // Conjugated kind: h^{-1}
    double inverse_h_real(double x) const;  // Conjugated kind: real h^{-1}

    Kind kind_ = Kind::Rotation;
    double c_ = 0.0;                    // Rotation
    TrigPolyDisplacement disp_;         // TrigPoly / Perturbed g / Conjugated h
    double moebius_a_ = 0.0;            // Moebius
    std::shared_ptr<const CircleMap> base_;  // Perturbed / Conjugated
    double eps_ = 0.0;                  // Perturbed
    double band_ = 0.0;
    Complex offset_ = Complex(0, 0);
};

}  // namespace bubbleforge
