#include "bubbleforge/linearization.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "bubbleforge/errors.hpp"

namespace bubbleforge {

namespace {

// The interesting parabolic parameters are typically irrational; at the
// nearest representable parameter the multiplier sits ~1e-8 from 1, so the
// cutoff needs headroom above that.
constexpr double kParabolicTol = 1e-7;

// Distance to the fixed point at which the Koenigs power series dominates;
// orbits are walked inside this radius before extrapolation starts.
constexpr double kAsymptoticRadius = 0.05;
constexpr int kMaxApproachSteps = 4096;

}  // namespace

struct KoenigsChart::Impl {
    CircleMap map;          // the contracting map near `point`: f itself at an
                            // attractor, f^{-1} (applied by Newton) at a repellor
    bool inverse = false;   // true when `map` must be iterated backwards
    double point = 0.0;
    double multiplier = 1.0;  // multiplier of f at `point`
    double lambda = 1.0;      // contraction rate of the iterated direction
    int depth = 0;            // iterations so that lambda^depth ~ 1e-5
    double basin_lo = 0.0;    // nearest fixed points flanking `point`; the
    double basin_hi = 0.0;    // chart is defined between them

    Impl(const CircleMap& f, double a, double mult)
        : map(f), inverse(std::abs(mult) > 1.0), point(a), multiplier(mult) {
        lambda = inverse ? 1.0 / multiplier : multiplier;
        depth = static_cast<int>(std::ceil(std::log(1e-5) / std::log(std::abs(lambda))));
        depth = std::clamp(depth, 4, 16384);
        basin_hi = neighbor(a, +1.0);
        basin_lo = neighbor(a, -1.0);
        // A sentinel return is 2 away; a genuine flanking pair is at most one
        // period apart (up to bisection noise when both neighbours coincide
        // mod 1).
        if (basin_hi - basin_lo > 1.5) {
            basin_lo = a - 0.5;
            basin_hi = a + 0.5;
        }
    }

    // Displacement lift(x) - x on the branch nearest `ref`; the raw lift wraps
    // its displacement into a half-open unit interval, which fabricates sign
    // changes wherever |f(x) - x| crosses 1/2.
    double displacement(double x, double ref) const {
        const double d = map.lift(x) - x;
        return d - std::round(d - ref);
    }

    // Nearest zero of f(x) - x strictly on the given side of a, as a lift.
    double neighbor(double a, double dir) const {
        const int n = 2048;
        double prev = a + dir * 1e-6;
        double sp = displacement(prev, 0.0);
        for (int i = 1; i <= n; ++i) {
            const double x = a + dir * (1e-6 + (1.0 - 2e-6) * i / n);
            const double s = displacement(x, sp);
            if ((sp < 0) != (s < 0)) {
                double lo = std::min(prev, x), hi = std::max(prev, x);
                const bool lo_neg = displacement(lo, 0.0) < 0;
                for (int it = 0; it < 80; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    if ((displacement(mid, 0.0) < 0) == lo_neg) lo = mid;
                    else hi = mid;
                }
                return 0.5 * (lo + hi);
            }
            prev = x;
            sp = s;
        }
        return a + dir * 2.0;  // sentinel: farther than one period
    }

    // Integer shift placing Re z inside the basin; the chart is single-valued
    // only there.
    Complex reduce(Complex z) const {
        const Complex r = z - std::floor(z.real() - basin_lo);
        if (r.real() < basin_hi) return r;
        throw DomainError("point is outside the chart basin");
    }

    Complex step(Complex z) const {
        if (!inverse) return map.eval(z);
        // The bisection-based real inverse cannot wander off into the complex
        // plane the way an unlucky Newton seed can.
        if (z.imag() == 0.0) return Complex(map.inverse_real(z.real()), 0.0);
        return map.inverse(z, z);
    }

    Complex step_deriv(Complex z_next, Complex z) const {
        if (!inverse) return map.deriv(z);
        return 1.0 / map.deriv(z_next);  // (f^{-1})'(z) = 1/f'(f^{-1}(z))
    }
};

double KoenigsChart::point() const { return impl_->point; }
double KoenigsChart::multiplier() const { return impl_->multiplier; }

Complex KoenigsChart::to_linear(Complex z) const {
    const Impl& im = *impl_;
    z = im.reduce(z);
    // v_n = lambda^{-n} (f^n(z) - a) = kappa(z) (1 + c1 lambda^n + c2 lambda^{2n} + ...),
    // so two levels of geometric extrapolation push the error to O(lambda^{3n}).
    // Near the basin boundary the orbit escapes slowly, so first walk it into
    // the asymptotic neighbourhood of the fixed point; the fixed depth alone
    // is calibrated for points that already start there.
    const int n = im.depth;
    Complex orbit = z;
    double scale = 1.0;
    for (int k = 0; std::abs(orbit - im.point) > kAsymptoticRadius; ++k) {
        if (k >= kMaxApproachSteps)
            throw ConvergenceError("koenigs orbit failed to approach the fixed point");
        orbit = im.step(orbit);
        scale *= im.lambda;
    }
    Complex v[3];  // v_{n-2}, v_{n-1}, v_n
    for (int k = 1; k <= n; ++k) {
        orbit = im.step(orbit);
        scale *= im.lambda;
        if (!std::isfinite(orbit.real()) || !std::isfinite(orbit.imag()))
            throw ConvergenceError("koenigs orbit escaped");
        if (k >= n - 2) v[k - (n - 2)] = (orbit - im.point) / scale;
    }
    const double l = im.lambda;
    Complex w0 = (v[1] - l * v[0]) / (1.0 - l);
    Complex w1 = (v[2] - l * v[1]) / (1.0 - l);
    return (w1 - l * l * w0) / (1.0 - l * l);
}

Complex KoenigsChart::to_linear_deriv(Complex z) const {
    const Impl& im = *impl_;
    z = im.reduce(z);
    const int n = im.depth;
    Complex orbit = z;
    Complex prod = 1.0;
    double scale = 1.0;
    for (int k = 0; std::abs(orbit - im.point) > kAsymptoticRadius; ++k) {
        if (k >= kMaxApproachSteps)
            throw ConvergenceError("koenigs orbit failed to approach the fixed point");
        Complex next = im.step(orbit);
        prod *= im.step_deriv(next, orbit);
        orbit = next;
        scale *= im.lambda;
    }
    Complex v[3];
    for (int k = 1; k <= n; ++k) {
        Complex next = im.step(orbit);
        prod *= im.step_deriv(next, orbit);
        orbit = next;
        scale *= im.lambda;
        if (k >= n - 2) v[k - (n - 2)] = prod / scale;
    }
    const double l = im.lambda;
    Complex w0 = (v[1] - l * v[0]) / (1.0 - l);
    Complex w1 = (v[2] - l * v[1]) / (1.0 - l);
    return (w1 - l * l * w0) / (1.0 - l * l);
}

Complex KoenigsChart::to_cylinder(Complex zeta) const {
    const Impl& im = *impl_;
    if (zeta == Complex(0, 0)) return im.point;
    // Newton with continuation along the segment 0 -> zeta, starting from the
    // tangent approximation psi(t) ~ a + t.
    const int stages = std::max(1, static_cast<int>(std::ceil(std::abs(zeta) / 0.02)));
    Complex u = im.point + zeta / static_cast<double>(stages);
    for (int s = 1; s <= stages; ++s) {
        const Complex target = zeta * (static_cast<double>(s) / stages);
        bool hit = false;
        Complex best_u = u;
        double best_r = std::numeric_limits<double>::infinity();
        for (int it = 0; it < 60; ++it) {
            const Complex r = to_linear(u) - target;
            if (std::abs(r) < best_r) {
                best_r = std::abs(r);
                best_u = u;
            }
            const Complex du = r / to_linear_deriv(u);
            u -= du;
            // the chart itself carries ~1e-11 noise; don't demand more
            if (std::abs(du) < 1e-10 * (1.0 + std::abs(u)) || std::abs(r) < 1e-10) {
                hit = true;
                break;
            }
        }
        // Newton can stall on the chart's noise floor without meeting the
        // step tolerance; a stalled iterate with a tiny residual is still a
        // valid inverse.
        if (!hit && best_r < 1e-8 * (1.0 + std::abs(target))) {
            u = best_u;
            hit = true;
        }
        if (!hit) throw ConvergenceError("koenigs inverse did not converge");
    }
    return u;
}

KoenigsChart koenigs_chart(const CircleMap& f, double point, double multiplier) {
    if (multiplier <= 0.0)
        throw PreconditionError("koenigs chart needs an orientation-preserving multiplier");
    if (std::abs(multiplier - 1.0) <= kParabolicTol)
        throw PreconditionError("fixed point is parabolic within tolerance");
    KoenigsChart chart;
    chart.impl_ = std::make_shared<KoenigsChart::Impl>(f, point, multiplier);
    return chart;
}

namespace {

PeriodicOrbitSet hyperbolic_fixed_points(const CircleMap& f) {
    if (compare_to_rational(f, RationalRotation::make(0, 1)) != RationalCompare::Equal)
        throw PreconditionError("rotation number is not 0");
    PeriodicOrbitSet orbits;
    try {
        orbits = periodic_orbits(f, RationalRotation::make(0, 1));
    } catch (const ConsistencyError&) {
        throw PreconditionError("map is not hyperbolic (identity-like or degenerate)");
    }
    if (orbits.orbits.size() < 2 || !orbits.all_hyperbolic())
        throw PreconditionError("map is not hyperbolic");
    return orbits;
}

}  // namespace

std::vector<TransitionMap> transition_maps(const CircleMap& f) {
    const PeriodicOrbitSet orbits = hyperbolic_fixed_points(f);
    const int m = static_cast<int>(orbits.orbits.size());
    std::vector<KoenigsChart> charts;
    charts.reserve(m);
    for (const auto& o : orbits.orbits) charts.push_back(koenigs_chart(f, o.point, o.multiplier));

    std::vector<TransitionMap> maps;
    for (int j = 0; j < m; ++j) {
        const KoenigsChart from = charts[j];
        const KoenigsChart to = charts[(j + 1) % m];
        // Lifted position of the next fixed point, strictly above from.point.
        double a_next = to.point();
        while (a_next <= from.point()) a_next += 1.0;
        const double gap = a_next - from.point();
        const double t_ref = from.to_linear(from.point() + 0.5 * gap);
        const double shift = a_next - to.point();

        TransitionMap tm;
        tm.index = j;
        tm.lambda_from = from.multiplier();
        tm.lambda_to = to.multiplier();
        tm.eval = [from, to, t_ref, shift](double t) {
            if (!(t > 0.0)) throw DomainError("transition maps take positive arguments");
            // Slide t into the window around t_ref by equivariance, evaluate,
            // then slide back with the target multiplier.
            const double lf = from.multiplier();
            const double lt = to.multiplier();
            const long k = std::lround(std::log(t_ref / t) / std::log(lf));
            const double t_red = t * std::pow(lf, static_cast<double>(k));
            const double z = from.to_cylinder(t_red);
            const double s_red = to.to_linear(z - shift);
            return s_red * std::pow(lt, static_cast<double>(-k));
        };
        maps.push_back(std::move(tm));
    }
    return maps;
}

namespace {

// Circle arc through (p, 0) and (q, 0), p < q, bulging down (sign = -1) or up
// (sign = +1) with the given sagitta; samples exclude the right endpoint.
std::vector<Complex> chart_arc(double p, double q, double sagitta, int sign, int n) {
    const double d = 0.5 * (q - p);
    if (sagitta >= d)
        throw GeometryError("amplitude too large: arc would not be a graph in the chart");
    const double cx = 0.5 * (p + q);
    const double h = (d * d - sagitta * sagitta) / (2.0 * sagitta);  // center offset
    const double cy = sign > 0 ? -h : h;
    const double rho = (d * d + sagitta * sagitta) / (2.0 * sagitta);
    double th_p = std::atan2(-cy, p - cx);
    double th_q = std::atan2(-cy, q - cx);
    // Traverse through the extremum on the bulge side; with sagitta < d this
    // stays a graph over the chord.
    if (sign < 0) {
        while (th_q <= th_p) th_q += 2.0 * kPi;  // counterclockwise, through -pi/2
    } else {
        while (th_q >= th_p) th_q -= 2.0 * kPi;  // clockwise, through +pi/2
    }
    std::vector<Complex> pts(n);
    for (int i = 0; i < n; ++i) {
        const double th = th_p + (th_q - th_p) * i / n;
        pts[i] = Complex(cx + rho * std::cos(th), cy + rho * std::sin(th));
    }
    return pts;
}

// Piecewise-linear height of the curve over the circle; samples must be a
// graph over a full period in the real direction.
double curve_height(const std::vector<Complex>& samples, double x) {
    const double x0 = samples.front().real();
    double xr = x0 + std::fmod(x - x0, 1.0);
    if (xr < x0) xr += 1.0;
    const int n = static_cast<int>(samples.size());
    for (int i = 0; i < n; ++i) {
        double xa = samples[i].real();
        double xb = (i + 1 < n) ? samples[i + 1].real() : samples[0].real() + 1.0;
        // normalize to the lifted window starting at x0
        if (xa < x0 - 1e-12) xa += 1.0;
        if (xb < xa) xb += 1.0;
        if (xr >= xa - 1e-12 && xr <= xb + 1e-12) {
            const double ya = samples[i].imag();
            const double yb = (i + 1 < n) ? samples[i + 1].imag() : samples[0].imag();
            const double t = (xb > xa) ? (xr - xa) / (xb - xa) : 0.0;
            return ya + t * (yb - ya);
        }
    }
    throw GeometryError("curve is not a graph over the circle");
}

}  // namespace

AscendingCurve ascending_curve(const CircleMap& f, double amplitude) {
    if (!(amplitude > 0.0)) throw PreconditionError("amplitude must be positive");
    const PeriodicOrbitSet orbits = hyperbolic_fixed_points(f);
    const int m = static_cast<int>(orbits.orbits.size());
    const double band = f.analyticity_band();
    if (amplitude >= band) throw GeometryError("amplitude exceeds the analyticity band");

    std::vector<KoenigsChart> charts;
    charts.reserve(m);
    for (const auto& o : orbits.orbits) charts.push_back(koenigs_chart(f, o.point, o.multiplier));

    // Junction j sits halfway between fixed points j and j+1 (lifted order).
    std::vector<double> junctions(m);
    for (int j = 0; j < m; ++j) {
        double a = orbits.orbits[j].point;
        double b = orbits.orbits[(j + 1) % m].point;
        while (b <= a) b += 1.0;
        junctions[j] = 0.5 * (a + b);
    }

    const int arc_samples = 96;
    std::vector<Complex> samples;
    samples.reserve(static_cast<size_t>(m) * arc_samples);
    for (int j = 0; j < m; ++j) {
        // Arc j spans junction j-1 -> junction j around fixed point j.
        const PeriodicOrbit& o = orbits.orbits[j];
        const bool attracting = std::abs(o.multiplier) < 1.0;
        double left = junctions[(j + m - 1) % m];
        while (left >= o.point) left -= 1.0;
        double right = junctions[j];
        while (right <= o.point) right += 1.0;

        const KoenigsChart& chart = charts[j];
        const double p = chart.to_linear(left);
        const double q = chart.to_linear(right);
        if (!(p < 0.0 && q > 0.0))
            throw GeometryError("chart coordinates do not straddle the fixed point");
        const int sign = attracting ? -1 : +1;  // below attractors, above repellors
        const std::vector<Complex> arc = chart_arc(p, q, amplitude, sign, arc_samples);
        for (Complex t : arc) {
            Complex z;
            try {
                z = chart.to_cylinder(t);
            } catch (const GeometryError&) {
                throw;
            } catch (const Error&) {
                throw GeometryError("amplitude too large for the linearizing charts");
            }
            if (std::abs(z.imag()) > 0.98 * band)
                throw GeometryError("curve leaves the analyticity band");
            // keep a continuous lift
            double x = z.real();
            if (samples.empty()) {
                x -= std::floor(x);
            } else {
                const double prev = samples.back().real();
                while (x < prev - 0.5) x += 1.0;
                while (x > prev + 0.5) x -= 1.0;
                if (x <= prev)
                    throw GeometryError("curve is not a graph over the circle");
            }
            samples.emplace_back(x, z.imag());
        }
    }
    if (samples.back().real() - samples.front().real() >= 1.0)
        throw GeometryError("curve wraps more than once");

    // f(gamma) must lie strictly above gamma on every vertical fiber.
    double min_margin = std::numeric_limits<double>::infinity();
    for (const Complex& z : samples) {
        const Complex fz = f.eval(z);
        const double margin = fz.imag() - curve_height(samples, fz.real());
        min_margin = std::min(min_margin, margin);
    }
    if (!(min_margin > 0.0))
        throw GeometryError("image of the curve is not strictly above the curve");

    AscendingCurve curve;
    curve.contour = Contour::from_samples(samples, 1);
    curve.orbits = orbits;
    curve.junctions = junctions;
    curve.amplitude = amplitude;
    return curve;
}

}  // namespace bubbleforge
