#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "bubbleforge/circle_map.hpp"
#include "bubbleforge/linearization.hpp"
#include "bubbleforge/numerics.hpp"

namespace bubbleforge {

struct ChartGlueData;  // internal: linearizing-chart representation of Phi

/// Truncated-Fourier solution of the conjugacy equation
///   Phi(f(z) + omega) = Phi(z) + tau,  Phi = id + phi,
/// with phi a trigonometric sum of modes |k| <= K, c_0 = 0.
struct ConjugacySolution {
    Complex tau;
    Complex omega;              // shift the solve was performed at
    int K = 0;
    double residual = 0.0;      // sup norm of the defect on a refined sample
    Contour contour;            // collocation curve
    Eigen::VectorXcd coeffs;    // c_k at index k + K, k = -K..K

    // phi is singular at the fixed points of f + omega (real points at the
    // boundary, ghosts for Im omega > 0): a logarithm plus a Laurent tail,
    // both single-valued around the point. A Fourier tail alone cannot
    // converge across them, so the basis carries, per point, the periodic log
    //   (1/2 pi i) Log(1 - e^{-s 2 pi i (z - a)})
    // with the cut running away from the contour (s = +1 cut upward, s = -1
    // downward) and its first few z-derivatives (periodic poles of increasing
    // order). Entry j is the derivative of order log_orders[j] (0 = the log).
    std::vector<Complex> log_points;
    std::vector<int> log_sides;
    std::vector<int> log_orders;
    Eigen::VectorXcd log_coeffs;

    // Boundary solves (tau_boundary_hyperbolic) represent Phi in the Koenigs
    // charts of the fixed points instead of a global Fourier sum; when set,
    // phi/phi_deriv evaluate through the charts and coeffs stays empty. Valid
    // near the horizontal collocation line `contour`.
    std::shared_ptr<const ChartGlueData> glue;

    Complex phi(Complex z) const;
    Complex phi_deriv(Complex z) const;
    Complex Phi(Complex z) const { return z + phi(z); }
    Complex Phi_deriv(Complex z) const { return 1.0 + phi_deriv(z); }
};

/// Complex rotation number for Im omega > 0 by least-squares collocation on
/// the base circle (or a caller-supplied homotopic contour). Throws
/// AccuracyError when the defect stays above tol, ConsistencyError when the
/// solution fails the regularity (winding) check.
ConjugacySolution tau_interior(const CircleMap& f, Complex omega, int K = 64, double tol = 1e-8,
                               const Contour* collocation = nullptr);

/// Extrapolated boundary value of tau along omega + i*delta for a real omega.
struct BoundaryLimit {
    Complex tau;
    double error_estimate = 0.0;   // gap between the last two extrapolants
    double order = 1.0;            // exponent of the Richardson variable u = delta^order
    std::vector<double> schedule;
    std::vector<Complex> values;   // solver output per delta
    std::vector<double> residuals;
};

/// Richardson-extrapolated interior limit. An empty schedule means the
/// default 0.02 * 2^{-j}, j = 0..4. Throws ConvergenceError (carrying the
/// sequence) when the extrapolants are not Cauchy within tol. A precomputed
/// ascending curve of f + omega may be passed to skip rebuilding one.
BoundaryLimit tau_boundary_limit(const CircleMap& f, double omega,
                                 std::vector<double> schedule = {}, int K = 64,
                                 double tol = 1e-6, const AscendingCurve* curve = nullptr);

/// Boundary value for a hyperbolic map with rot = 0 (no limit needed). The
/// conjugacy Phi(f(z)) = Phi(z) + tau is written as tau * zeta_j + g_j(xi_j)
/// in the Koenigs cylinder coordinate zeta_j of each fixed point (xi_j =
/// e^{2 pi i zeta_j}); the gluing conditions between adjacent charts are
/// collocated on a horizontal line at the curve's amplitude and solved in
/// least squares for tau and the Laurent tails g_j. The curve supplies the
/// orbit data and the collocation height.
ConjugacySolution tau_boundary_hyperbolic(const CircleMap& f, const AscendingCurve& gamma,
                                          int K = 64, double tol = 1e-8);

}  // namespace bubbleforge
