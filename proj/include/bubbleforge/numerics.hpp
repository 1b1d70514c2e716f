#pragma once

#include <complex>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace bubbleforge {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// A sampled closed (or open) curve in the complex plane / cylinder.
///
/// Contours built from an analytic parametrization keep it around, so that
/// quadrature can evaluate z(t), z'(t) at arbitrary resolution. Contours
/// built from raw samples fall back to trigonometric interpolation of the
/// samples (uniform parameter assumed). Cylinder contours that go around
/// once satisfy z(t+1) = z(t) + winding with winding = 1.
class Contour {
  public:
    Contour() = default;

    // Circle of given center/radius, positively oriented, winding 0.
    static Contour circle(Complex center, double radius, int n = 256);

    // Graph contour on the cylinder: z(t) = t + i*height(t), winding 1.
    static Contour cylinder_graph(std::function<double(double)> height,
                                  std::function<double(double)> height_deriv,
                                  int n = 256);

    static Contour from_parametrization(std::function<Complex(double)> z,
                                        std::function<Complex(double)> dz, int n,
                                        int winding);

    // Raw samples at uniform parameter t_j = j/n. `winding` is the real-part
    // increase over a full traversal (0 for a plane loop, 1 on the cylinder).
    static Contour from_samples(std::vector<Complex> samples, int winding);

    const std::vector<Complex>& samples() const { return samples_; }
    bool closed() const { return true; }
    int winding() const { return winding_; }
    bool has_parametrization() const { return static_cast<bool>(z_); }

    Complex point(double t) const;
    Complex velocity(double t) const;

  private:
    std::vector<Complex> samples_;
    std::vector<Complex> coeff_;  // DFT of the periodic part (sample-based contours)
    int winding_ = 0;
    std::function<Complex(double)> z_;
    std::function<Complex(double)> dz_;
};

/// Trapezoid approximation of the contour integral of `integrand` dz.
/// Exponentially accurate for integrands analytic in a neighborhood of an
/// analytic contour. Throws Error if the integrand is non-finite at a node.
Complex integrate_closed_contour(const std::function<Complex(Complex)>& integrand,
                                 const Contour& contour, int n);

struct Polyline2D {
    std::vector<Eigen::Vector2d> vertices;
};

enum class CrossingKind {
    Transversal,      // proper interior crossing of two segments
    VertexTouch,      // crossing within parameter tolerance of a vertex
    CollinearOverlap  // segments overlap along a common line
};

struct Crossing {
    Eigen::Vector2d point;
    int seg_a = 0;         // segment index in a
    int seg_b = 0;         // segment index in b
    double t_a = 0.0;      // parameter along segment a in [0,1]
    double t_b = 0.0;
    CrossingKind kind = CrossingKind::Transversal;
};

/// All crossings between segments of a and b. Pass the same polyline twice
/// (by address) for self-intersection mode: adjacent segments and shared
/// endpoints are then excluded.
std::vector<Crossing> polyline_intersections(const Polyline2D& a, const Polyline2D& b);

std::vector<Crossing> self_intersections(const Polyline2D& a);

struct RichardsonResult {
    Complex value;
    double error_estimate;  // gap between the last two Neville extrapolants
};

/// Extrapolates value(h) -> h = 0 assuming value(h) = v0 + c1*h^order + c2*h^(2*order) + ...
/// Samples must have distinct positive h. Throws PreconditionError on < 2 samples.
RichardsonResult richardson_extrapolate(const std::vector<std::pair<double, Complex>>& samples,
                                        double order = 1.0);

}  // namespace bubbleforge
