#pragma once

#include <string>
#include <vector>

#include "bubbleforge/circle_map.hpp"
#include "bubbleforge/complex_rot.hpp"
#include "bubbleforge/numerics.hpp"
#include "bubbleforge/rotation.hpp"

namespace bubbleforge {

/// One boundary sample tau-bar(omega) of a bubble.
struct BubbleSample {
    double omega = 0.0;            // lift of the parameter, inside the interval
    Complex tau;                   // boundary value, Re within 1/2 of p/q
    double error_estimate = 0.0;   // Richardson gap of the limit route
    double richardson_order = 1.0;
    double cross_check = -1.0;     // |limit - gluing| when both routes ran, else -1
    bool ok = false;               // false marks a solver-failure gap
    std::string note;              // failure reason for gaps
};

/// The p/q-bubble: the image of I_{p/q} under the boundary extension of tau.
struct BubbleCurve {
    RationalRotation rational;
    RotationInterval interval;
    std::vector<BubbleSample> samples;  // ordered from left to right endpoint

    /// (Re tau, Im tau) of the ok samples, in parameter order.
    Polyline2D polyline() const;
};

struct BubbleConfig {
    int n_samples = 41;       // including both endpoints
    int K = 64;               // truncation order of the per-delta solves
    double tol = 1e-6;        // accepted Richardson gap
    bool cross_check = true;  // run tau_boundary_hyperbolic where it applies
};

/// Samples tau-bar over I_{p/q} by the interior-limit route, cross-checked
/// against the chart-gluing route at hyperbolic parameters (rot = 0 only).
/// Throws NotFoundError when I_{p/q} is degenerate; per-sample solver
/// failures become gaps (ok = false) carrying the reason, not throws.
BubbleCurve compute_bubble(const CircleMap& f, RationalRotation r, const BubbleConfig& config = {});

/// Check of the disc bound: every sample inside the disc of radius
/// D_f / (4 pi q^2) tangent to the real axis at p/q.
struct BoundReport {
    double radius = 0.0;
    double min_slack = 0.0;  // min over samples of radius - |tau - center|
    int violations = 0;      // samples outside by more than their error estimate
    bool pass() const { return violations == 0; }
};
BoundReport bound_check(const BubbleCurve& bubble, double distortion);

struct CurveCrossing {
    int curve_a = 0;
    int curve_b = 0;  // == curve_a for a self-crossing
    Crossing crossing;
    bool tangency_suspect = false;  // near-parallel branches or a vertex touch
};

struct IntersectionReport {
    std::vector<CurveCrossing> self_crossings;
    std::vector<CurveCrossing> pairwise;
};

/// Self-crossings of each curve and crossings of each pair. Crossings whose
/// branches meet at a small angle (or at a shared vertex) are flagged as
/// suspected tangencies rather than counted transversal.
IntersectionReport intersection_report(const std::vector<Polyline2D>& curves);

/// Same detector over the polylines of computed bubbles.
IntersectionReport intersection_report(const std::vector<BubbleCurve>& bubbles);

}  // namespace bubbleforge
