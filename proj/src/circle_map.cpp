#include "bubbleforge/circle_map.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "bubbleforge/errors.hpp"

namespace bubbleforge {

namespace {

Complex cis(Complex z) { return std::exp(Complex(0, kTwoPi) * z); }

// Moebius map F(w) = (w + a) / (1 + a w) with real |a| < 1 and its w-derivatives.
Complex moebius_apply(double a, Complex w) { return (w + a) / (1.0 + a * w); }
Complex moebius_d1(double a, Complex w) {
    const Complex den = 1.0 + a * w;
    return (1.0 - a * a) / (den * den);
}
Complex moebius_d2(double a, Complex w) {
    const Complex den = 1.0 + a * w;
    return -2.0 * a * (1.0 - a * a) / (den * den * den);
}

}  // namespace

TrigPolyDisplacement TrigPolyDisplacement::sine(int n, double amplitude) {
    TrigPolyDisplacement d;
    d.b.assign(static_cast<size_t>(n), 0.0);
    d.b[static_cast<size_t>(n) - 1] = amplitude;
    return d;
}

Complex TrigPolyDisplacement::eval(Complex z) const {
    Complex s(c, 0);
    for (size_t k = 0; k < a.size(); ++k)
        if (a[k] != 0.0) s += a[k] * std::cos(kTwoPi * (double)(k + 1) * z);
    for (size_t k = 0; k < b.size(); ++k)
        if (b[k] != 0.0) s += b[k] * std::sin(kTwoPi * (double)(k + 1) * z);
    return s;
}

Complex TrigPolyDisplacement::deriv(Complex z) const {
    Complex s(0, 0);
    for (size_t k = 0; k < a.size(); ++k) {
        const double f = kTwoPi * (double)(k + 1);
        if (a[k] != 0.0) s -= a[k] * f * std::sin(f * z);
    }
    for (size_t k = 0; k < b.size(); ++k) {
        const double f = kTwoPi * (double)(k + 1);
        if (b[k] != 0.0) s += b[k] * f * std::cos(f * z);
    }
    return s;
}

Complex TrigPolyDisplacement::deriv2(Complex z) const {
    Complex s(0, 0);
    for (size_t k = 0; k < a.size(); ++k) {
        const double f = kTwoPi * (double)(k + 1);
        if (a[k] != 0.0) s -= a[k] * f * f * std::cos(f * z);
    }
    for (size_t k = 0; k < b.size(); ++k) {
        const double f = kTwoPi * (double)(k + 1);
        if (b[k] != 0.0) s -= b[k] * f * f * std::sin(f * z);
    }
    return s;
}

CircleMap CircleMap::rotation(double c) {
    CircleMap m;
    m.kind_ = Kind::Rotation;
    m.c_ = c - std::floor(c);
    m.band_ = std::numeric_limits<double>::infinity();
    return m;
}

CircleMap CircleMap::trig_poly(TrigPolyDisplacement d, double band) {
    CircleMap m;
    m.kind_ = Kind::TrigPoly;
    m.disp_ = std::move(d);
    m.band_ = band;
    m.validate();
    return m;
}

CircleMap CircleMap::moebius_induced(double a) {
    if (std::abs(a) >= 1.0)
        throw PreconditionError("moebius_induced: |a| must be < 1");
    CircleMap m;
    m.kind_ = Kind::Moebius;
    m.moebius_a_ = a;
    m.band_ = (a == 0.0) ? std::numeric_limits<double>::infinity()
                         : std::log(1.0 / std::abs(a)) / kTwoPi;
    m.validate();
    return m;
}

CircleMap CircleMap::perturbed(const CircleMap& base, TrigPolyDisplacement g, double eps) {
    CircleMap m;
    m.kind_ = Kind::Perturbed;
    m.base_ = std::make_shared<CircleMap>(base);
    m.disp_ = std::move(g);
    m.eps_ = eps;
    m.band_ = std::min(base.band_, kDefaultTrigBand);
    m.offset_ = base.offset_;
    m.validate();
    return m;
}

CircleMap CircleMap::conjugated(const CircleMap& f, TrigPolyDisplacement h_displacement) {
    CircleMap m;
    m.kind_ = Kind::Conjugated;
    m.base_ = std::make_shared<CircleMap>(f);
    m.disp_ = std::move(h_displacement);
    m.band_ = std::min(f.band_, kDefaultTrigBand) * 0.5;
    m.offset_ = Complex(0, 0);
    m.validate();
    return m;
}

CircleMap CircleMap::shifted(Complex omega) const {
    CircleMap m = *this;
    m.offset_ += omega;
    return m;
}

double CircleMap::moebius_parameter() const {
    if (kind_ != Kind::Moebius)
        throw PreconditionError("moebius_parameter: not a Moebius-induced map");
    return moebius_a_;
}

namespace {

// Branch-tracked displacement of a Moebius-induced map:
// delta(z) = log(F(w)/w) / (2 pi i), w = e^{2 pi i z}. The principal branch is
// exact on the real circle (displacement lies in (-1/2, 1/2)); off the circle
// the branch is continued along the vertical path from Re z.
Complex moebius_displacement(double a, Complex z) {
    auto principal = [a](Complex zz) {
        const Complex w = cis(zz);
        return std::log(moebius_apply(a, w) / w) / Complex(0, kTwoPi);
    };
    const double y = z.imag();
    if (y == 0.0) return principal(z);
    const int steps = 1 + static_cast<int>(std::abs(y) / 0.02);
    Complex prev = principal(Complex(z.real(), 0));
    for (int j = 1; j <= steps; ++j) {
        const Complex zz(z.real(), y * j / steps);
        Complex d = principal(zz);
        d += std::round((prev - d).real());  // log jumps are exact multiples of 2 pi i
        prev = d;
    }
    return prev;
}

}  // namespace

double CircleMap::lift(double x) const {
    if (offset_.imag() != 0.0)
        throw PreconditionError("lift: map carries a non-real shift");
    const double w = offset_.real();
    switch (kind_) {
        case Kind::Rotation:
            return x + c_ + w;
        case Kind::TrigPoly:
            return x + disp_.eval(x) + w;
        case Kind::Moebius:
            return x + moebius_displacement(moebius_a_, Complex(x, 0)).real() + w;
        case Kind::Perturbed:
            return base_->lift(x) + eps_ * disp_.eval(x) + w;
        case Kind::Conjugated: {
            const double u = inverse_h_real(x);
            return u + disp_.eval(base_->lift(u)) + (base_->lift(u) - u) + w;
        }
    }
    return 0.0;
}

// h(x) = x + d(x); monotone inverse by bisection + Newton polish.
double CircleMap::inverse_h_real(double x) const {
    double lo = x - 1.0, hi = x + 1.0;
    auto h = [this](double u) { return u + disp_.eval(u); };
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (h(mid) < x ? lo : hi) = mid;
    }
    double u = 0.5 * (lo + hi);
    for (int it = 0; it < 4; ++it) {
        const double hp = 1.0 + disp_.deriv(Complex(u, 0)).real();
        u -= (h(u) - x) / hp;
    }
    return u;
}

double CircleMap::lift_deriv(double x) const {
    return deriv(Complex(x, 0)).real();
}

double CircleMap::lift_deriv2(double x) const {
    return deriv2(Complex(x, 0)).real();
}

Complex CircleMap::eval(Complex z) const {
    if (std::abs(z.imag()) > band_ * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "eval: point outside analyticity band (|Im z| = " << std::abs(z.imag())
           << ", halfwidth = " << band_ << ")";
        throw DomainError(os.str());
    }
    switch (kind_) {
        case Kind::Rotation:
            return z + c_ + offset_;
        case Kind::TrigPoly:
            return z + disp_.eval(z) + offset_;
        case Kind::Moebius:
            return z + moebius_displacement(moebius_a_, z) + offset_;
        case Kind::Perturbed:
            return base_->eval(z) + eps_ * disp_.eval(z) + offset_;
        case Kind::Conjugated: {
            const Complex u = inverse_h(z);
            const Complex fu = base_->eval(u);
            return fu + disp_.eval(fu) + offset_;
        }
    }
    return z;
}

Complex CircleMap::inverse_h(Complex z) const {
    Complex u = z;
    for (int it = 0; it < 60; ++it) {
        const Complex r = u + disp_.eval(u) - z;
        if (std::abs(r) < 1e-15) break;
        u -= r / (1.0 + disp_.deriv(u));
    }
    return u;
}

Complex CircleMap::deriv(Complex z) const {
    switch (kind_) {
        case Kind::Rotation:
            return Complex(1, 0);
        case Kind::TrigPoly:
            return 1.0 + disp_.deriv(z);
        case Kind::Moebius: {
            const Complex w = cis(z);
            const Complex Fw = moebius_apply(moebius_a_, w);
            return w * moebius_d1(moebius_a_, w) / Fw;
        }
        case Kind::Perturbed:
            return base_->deriv(z) + eps_ * disp_.deriv(z);
        case Kind::Conjugated: {
            const Complex u = inverse_h(z);
            const Complex fu = base_->eval(u);
            return (1.0 + disp_.deriv(fu)) * base_->deriv(u) / (1.0 + disp_.deriv(u));
        }
    }
    return Complex(1, 0);
}

Complex CircleMap::deriv2(Complex z) const {
    switch (kind_) {
        case Kind::Rotation:
            return Complex(0, 0);
        case Kind::TrigPoly:
            return disp_.deriv2(z);
        case Kind::Moebius: {
            // f'(z) = Q(w), Q(w) = w F'(w)/F(w); f''(z) = Q'(w) * 2 pi i w.
            const Complex w = cis(z);
            const Complex F = moebius_apply(moebius_a_, w);
            const Complex F1 = moebius_d1(moebius_a_, w);
            const Complex F2 = moebius_d2(moebius_a_, w);
            const Complex Qp = (F1 + w * F2) / F - w * F1 * F1 / (F * F);
            return Qp * Complex(0, kTwoPi) * w;
        }
        case Kind::Perturbed:
            return base_->deriv2(z) + eps_ * disp_.deriv2(z);
        case Kind::Conjugated: {
            const Complex u = inverse_h(z);
            const Complex fu = base_->eval(u);
            const Complex hp_fu = 1.0 + disp_.deriv(fu);
            const Complex hpp_fu = disp_.deriv2(fu);
            const Complex hp_u = 1.0 + disp_.deriv(u);
            const Complex hpp_u = disp_.deriv2(u);
            const Complex fp = base_->deriv(u), fpp = base_->deriv2(u);
            const Complex up = 1.0 / hp_u;
            const Complex upp = -hpp_u * up * up * up;
            return (hpp_fu * fp * fp + hp_fu * fpp) * up * up + hp_fu * fp * upp;
        }
    }
    return Complex(0, 0);
}

Complex CircleMap::inverse(Complex value, Complex seed) const {
    Complex u = seed;
    double res = std::abs(eval(u) - value);
    for (int it = 0; it < 100; ++it) {
        if (res < 1e-14) return u;
        const Complex du = (eval(u) - value) / deriv(u);
        // Damped step: accept only residual decrease, so the iteration cannot
        // escape toward a distant root of the complexified equation.
        double t = 1.0;
        bool accepted = false;
        for (int half = 0; half < 40 && !accepted; ++half, t *= 0.5) {
            const Complex cand = u - t * du;
            if (std::abs(cand.imag()) > band_) continue;
            const double r = std::abs(eval(cand) - value);
            if (r < res) {
                u = cand;
                res = r;
                accepted = true;
            }
        }
        if (!accepted) break;
    }
    if (res < 1e-11) return u;
    throw ConvergenceError("inverse: Newton iteration did not converge");
}

double CircleMap::inverse_real(double value) const {
    double lo = value - 2.0, hi = value + 2.0;
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        (lift(mid) < value ? lo : hi) = mid;
    }
    double u = 0.5 * (lo + hi);
    for (int it = 0; it < 4; ++it) u -= (lift(u) - value) / lift_deriv(u);
    return u;
}

void CircleMap::validate() const {
    constexpr int kGrid = 1024;
    for (int j = 0; j < kGrid; ++j) {
        const double x = static_cast<double>(j) / kGrid;
        const double fp = deriv(Complex(x, 0)).real();
        if (!(fp > 1e-9)) {
            std::ostringstream os;
            os << "CircleMap: not an orientation-preserving diffeomorphism "
               << "(F'(" << x << ") = " << fp << ")";
            throw PreconditionError(os.str());
        }
    }
}

std::string CircleMap::spec_string() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind_) {
        case Kind::Rotation:
            os << "rot:c=" << c_;
            break;
        case Kind::Moebius:
            os << "moebius:a=" << moebius_a_;
            break;
        case Kind::TrigPoly: {
            os << "trig:c=" << disp_.c;
            for (size_t k = 0; k < disp_.a.size(); ++k)
                if (disp_.a[k] != 0.0) os << ",a" << (k + 1) << "=" << disp_.a[k];
            for (size_t k = 0; k < disp_.b.size(); ++k)
                if (disp_.b[k] != 0.0) os << ",b" << (k + 1) << "=" << disp_.b[k];
            break;
        }
        case Kind::Perturbed: {
            os << base_->spec_string();
            // only pure-sine perturbations are expressible in the mini-language
            const int n = static_cast<int>(disp_.b.size());
            os << "+sin:n=" << n << ",eps=" << eps_ * (n > 0 ? disp_.b[n - 1] : 1.0);
            break;
        }
        case Kind::Conjugated:
            os << "<conjugated>";
            break;
    }
    return os.str();
}

}  // namespace bubbleforge
