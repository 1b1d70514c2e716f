#include "bubbleforge/bubbles.hpp"

#include <algorithm>
#include <cmath>

#include "bubbleforge/errors.hpp"
#include "bubbleforge/linearization.hpp"

namespace bubbleforge {

namespace {

// Interior-limit schedule for a sample at distance `s` from the nearest
// endpoint of the interval. tau(omega + i delta) is analytic in delta with
// radius ~ s (the endpoint is a sqrt branch point), so the schedule starts
// inside that disc and caps at the analytic window of the per-delta solves.
std::vector<double> limit_schedule(double s) {
    const double hi = std::min(0.048, 0.5 * s);
    const double lo = std::min(0.0045, s / 32.0);
    std::vector<double> sched;
    for (double d = hi; d > lo; d /= std::sqrt(2.0)) sched.push_back(d);
    return sched;
}

// Parabolic-endpoint schedule: deep enough for the order-1/2 tableau
// (tau - p/q ~ sqrt(delta) there) to settle.
std::vector<double> endpoint_schedule() {
    std::vector<double> sched;
    for (int j = 0; j <= 6; ++j) sched.push_back(0.02 * std::pow(2.0, -j));
    return sched;
}

// Branch of tau with Re within 1/2 of the anchor p/q.
Complex anchor_branch(Complex tau, double anchor) {
    return tau - std::round(tau.real() - anchor);
}

// Gluing route at a hyperbolic rot-0 parameter; the amplitude is walked down
// until the linearizing charts accept the curve.
Complex glue_tau(const CircleMap& fs, int K) {
    const double band = fs.analyticity_band();
    for (double c : {0.45, 0.3, 0.2, 0.1, 0.05, 0.02}) {
        try {
            const AscendingCurve curve = ascending_curve(fs, c * band);
            return tau_boundary_hyperbolic(fs, curve, K, 1e-2).tau;
        } catch (const Error&) {
            // amplitude too large for the charts at this parameter; retry lower
        }
    }
    throw GeometryError("no admissible ascending-curve amplitude");
}

// Smallest |multiplier - 1| over the rot-0 orbits, or -1 when the parameter
// is not plainly hyperbolic.
double hyperbolicity_margin(const CircleMap& fs) {
    PeriodicOrbitSet orbits;
    try {
        orbits = periodic_orbits(fs, RationalRotation::make(0, 1));
    } catch (const Error&) {
        return -1.0;
    }
    if (orbits.orbits.empty() || !orbits.all_hyperbolic()) return -1.0;
    double margin = 1.0;
    for (const PeriodicOrbit& o : orbits.orbits)
        margin = std::min(margin, std::abs(o.multiplier - 1.0));
    return margin;
}

double segment_sine(const Polyline2D& a, int seg_a, const Polyline2D& b, int seg_b) {
    const Eigen::Vector2d u = a.vertices[seg_a + 1] - a.vertices[seg_a];
    const Eigen::Vector2d v = b.vertices[seg_b + 1] - b.vertices[seg_b];
    const double nu = u.norm(), nv = v.norm();
    if (nu == 0.0 || nv == 0.0) return 0.0;
    return std::abs(u.x() * v.y() - u.y() * v.x()) / (nu * nv);
}

constexpr double kTangencySine = 0.05;

}  // namespace

Polyline2D BubbleCurve::polyline() const {
    Polyline2D line;
    for (const BubbleSample& s : samples)
        if (s.ok) line.vertices.emplace_back(s.tau.real(), s.tau.imag());
    return line;
}

BubbleCurve compute_bubble(const CircleMap& f, RationalRotation r, const BubbleConfig& config) {
    if (config.n_samples < 2) throw PreconditionError("compute_bubble needs at least 2 samples");

    BubbleCurve out;
    out.rational = r;
    out.interval = rational_interval(f, r, 1e-9);
    if (out.interval.degenerate)
        throw NotFoundError("I_{p/q} is degenerate: the bubble is a point");

    double left = out.interval.left;
    const double right = out.interval.right;
    if (left > right) left -= 1.0;

    const bool gluable = config.cross_check && r.p == 0 && r.q == 1;

    for (int i = 0; i < config.n_samples; ++i) {
        BubbleSample sample;
        sample.omega = left + (right - left) * i / (config.n_samples - 1);
        const bool endpoint = (i == 0 || i == config.n_samples - 1);
        const double s = std::min(sample.omega - left, right - sample.omega);
        try {
            BoundaryLimit limit = tau_boundary_limit(
                f, sample.omega, endpoint ? endpoint_schedule() : limit_schedule(s), config.K,
                endpoint ? 10.0 * config.tol : config.tol);
            sample.tau = anchor_branch(limit.tau, r.value());
            sample.error_estimate = limit.error_estimate;
            sample.richardson_order = limit.order;
            sample.ok = true;
        } catch (const Error& e) {
            sample.note = e.what();
            out.samples.push_back(sample);
            continue;
        }

        if (gluable && !endpoint) {
            const CircleMap fs = f.shifted(Complex(sample.omega, 0));
            if (hyperbolicity_margin(fs) > 0.05) {
                try {
                    const Complex glue = anchor_branch(glue_tau(fs, std::max(config.K, 64)),
                                                       r.value());
                    sample.cross_check = std::abs(glue - sample.tau);
                } catch (const Error&) {
                    // cross-check unavailable at this parameter; keep -1
                }
            }
        }
        out.samples.push_back(sample);
    }
    return out;
}

BoundReport bound_check(const BubbleCurve& bubble, double distortion) {
    BoundReport report;
    const double q = static_cast<double>(bubble.rational.q);
    report.radius = distortion / (2.0 * kTwoPi * q * q);
    const Complex center(bubble.rational.value(), report.radius);

    bool first = true;
    for (const BubbleSample& s : bubble.samples) {
        if (!s.ok) continue;
        const double slack = report.radius - std::abs(s.tau - center);
        if (first || slack < report.min_slack) report.min_slack = slack;
        first = false;
        if (slack < -(s.error_estimate + 1e-9)) ++report.violations;
    }
    return report;
}

IntersectionReport intersection_report(const std::vector<Polyline2D>& curves) {
    IntersectionReport report;
    const int n = static_cast<int>(curves.size());
    for (int i = 0; i < n; ++i) {
        for (const Crossing& c : self_intersections(curves[i])) {
            CurveCrossing cc{i, i, c, false};
            cc.tangency_suspect = c.kind != CrossingKind::Transversal ||
                                  segment_sine(curves[i], c.seg_a, curves[i], c.seg_b) <
                                      kTangencySine;
            report.self_crossings.push_back(cc);
        }
        for (int j = i + 1; j < n; ++j) {
            for (const Crossing& c : polyline_intersections(curves[i], curves[j])) {
                CurveCrossing cc{i, j, c, false};
                cc.tangency_suspect = c.kind != CrossingKind::Transversal ||
                                      segment_sine(curves[i], c.seg_a, curves[j], c.seg_b) <
                                          kTangencySine;
                report.pairwise.push_back(cc);
            }
        }
    }
    return report;
}

IntersectionReport intersection_report(const std::vector<BubbleCurve>& bubbles) {
    std::vector<Polyline2D> curves;
    curves.reserve(bubbles.size());
    for (const BubbleCurve& b : bubbles) curves.push_back(b.polyline());
    return intersection_report(curves);
}

}  // namespace bubbleforge
