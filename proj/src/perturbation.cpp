#include "bubbleforge/perturbation.hpp"

#include <cmath>
#include <sstream>

#include "bubbleforge/errors.hpp"
#include "bubbleforge/moebius.hpp"

namespace bubbleforge {

namespace {

constexpr int kQuadratureNodes = 512;

double circle_arg(Complex w) {
    double x = std::arg(w) / kTwoPi;
    return x - std::floor(x);
}

// Height of a cylinder-graph contour over a given abscissa (piecewise linear
// through the contour samples; enough for sign checks).
double height_at(const Contour& gamma, double x) {
    const int M = 256;
    double best = 0.0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (int j = 0; j < M; ++j) {
        const Complex z = gamma.point(static_cast<double>(j) / M);
        double dx = std::abs(z.real() - x);
        dx -= std::floor(dx);
        dx = std::min(dx, 1.0 - dx);
        if (dx < best_dist) {
            best_dist = dx;
            best = z.imag();
        }
    }
    return best;
}

MoebiusTransform require_moebius(const CircleMap& f, const char* who) {
    if (f.kind() != CircleMap::Kind::Moebius || f.offset() != Complex(0, 0)) {
        std::ostringstream os;
        os << who << " needs an unshifted Moebius-induced map";
        throw PreconditionError(os.str());
    }
    return MoebiusTransform::unit_circle(Complex(f.moebius_parameter(), 0));
}

}  // namespace

Complex dtau_depsilon(const CircleMap& f, const TrigPolyDisplacement& g, double omega,
                      const Contour* contour) {
    const MoebiusTransform F = require_moebius(f, "dtau_depsilon");
    if (classify_on_circle(F.scaled_by(std::exp(Complex(0, kTwoPi * omega)))) !=
        CircleDynamics::HyperbolicOnCircle)
        throw PreconditionError("dtau_depsilon needs rot(f + omega) = 0 hyperbolic");

    const AttractorRepellor ar = attractor_repellor(F, Complex(omega, 0));
    const double xa = circle_arg(ar.attractor);
    const double xr = circle_arg(ar.repellor);

    Contour gamma;
    if (contour != nullptr) {
        if (!(height_at(*contour, xa) < 0.0) || !(height_at(*contour, xr) > 0.0))
            throw GeometryError(
                "contour does not separate the attractor (below) from the repellor (above)");
        gamma = *contour;
    } else {
        // Analytic graph with h(xa) = -amp, h(xr) = +amp; the amplitude
        // shrinks with |xa - xr| so the graph stays meaningful as the fixed
        // points collide at the ends of I_0.
        const double amp = 0.3 * f.analyticity_band();
        auto h = [=](double t) {
            return 0.5 * amp * (std::cos(kTwoPi * (t - xr)) - std::cos(kTwoPi * (t - xa)));
        };
        auto hd = [=](double t) {
            return kTwoPi * 0.5 * amp *
                   (std::sin(kTwoPi * (t - xa)) - std::sin(kTwoPi * (t - xr)));
        };
        gamma = Contour::cylinder_graph(h, hd, kQuadratureNodes);
    }

    auto integrand = [&](Complex z) {
        const Complex hp = uniformizing_derivative(F, omega, z);
        return g.eval(z) / f.deriv(z) * hp * hp;
    };
    return integrate_closed_contour(integrand, gamma, kQuadratureNodes);
}

Complex dtau_domega(const CircleMap& f, const ConjugacySolution& solution,
                    const Contour* contour) {
    const Contour& gamma = contour != nullptr ? *contour : solution.contour;
    auto integrand = [&](Complex z) {
        const Complex phip = solution.Phi_deriv(z);
        return phip * phip / f.deriv(z);
    };
    return integrate_closed_contour(integrand, gamma, kQuadratureNodes);
}

InfinitesimalBubble infinitesimal_bubble(const CircleMap& f, const TrigPolyDisplacement& g,
                                         double eps, int n_samples, double cutoff_ratio) {
    const MoebiusTransform F = require_moebius(f, "infinitesimal_bubble");
    if (n_samples < 2) throw PreconditionError("infinitesimal_bubble needs at least 2 samples");
    if (!(eps >= 0) || !(cutoff_ratio > 0))
        throw PreconditionError("eps must be >= 0 and cutoff_ratio > 0");

    InfinitesimalBubble out;
    out.interval = rational_interval(f, RationalRotation::make(0, 1), 1e-9);
    out.eps = eps;
    out.cutoff_ratio = cutoff_ratio;
    if (out.interval.degenerate)
        throw NotFoundError("I_0 is degenerate: no bubble to linearize over");

    double left = out.interval.left;
    const double right = out.interval.right;
    if (left > right) left -= 1.0;

    // Interior samples only; tau-bar is parabolic (and tau' singular) at the
    // endpoints, so the grid stops one step short on both sides.
    for (int i = 1; i <= n_samples; ++i) {
        const double omega =
            left + (right - left) * static_cast<double>(i) / (n_samples + 1);
        const Complex tau_bar = moebius_tau(F, Complex(omega, 0));
        const Complex slope = dtau_depsilon(f, g, omega);
        if (eps * std::abs(slope) > cutoff_ratio * tau_bar.imag()) {
            ++out.dropped;
            continue;
        }
        out.samples.emplace_back(omega, tau_bar + eps * slope);
    }
    return out;
}

}  // namespace bubbleforge
