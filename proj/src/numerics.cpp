#include "bubbleforge/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bubbleforge/errors.hpp"

namespace bubbleforge {

namespace {

// DFT synthesis of uniformly sampled periodic data from its coefficients,
// using signed frequencies in (-n/2, n/2].
Complex trig_synth(const std::vector<Complex>& coeff, double t, bool derivative) {
    const int n = static_cast<int>(coeff.size());
    Complex s(0, 0);
    for (int k = 0; k < n; ++k) {
        const int m = (k <= n / 2) ? k : k - n;
        const Complex e = std::exp(Complex(0, kTwoPi * m * t));
        s += derivative ? coeff[k] * Complex(0, kTwoPi * m) * e : coeff[k] * e;
    }
    return s;
}

std::vector<Complex> dft_coefficients(const std::vector<Complex>& p) {
    const int n = static_cast<int>(p.size());
    std::vector<Complex> coeff(n);
    for (int k = 0; k < n; ++k) {
        Complex s(0, 0);
        for (int j = 0; j < n; ++j)
            s += p[j] * std::exp(Complex(0, -kTwoPi * k * j / n));
        coeff[k] = s / static_cast<double>(n);
    }
    return coeff;
}

}  // namespace

Contour Contour::circle(Complex center, double radius, int n) {
    auto z = [center, radius](double t) {
        return center + radius * std::exp(Complex(0, kTwoPi * t));
    };
    auto dz = [radius](double t) {
        return radius * Complex(0, kTwoPi) * std::exp(Complex(0, kTwoPi * t));
    };
    return from_parametrization(z, dz, n, 0);
}

Contour Contour::cylinder_graph(std::function<double(double)> height,
                                std::function<double(double)> height_deriv, int n) {
    auto z = [height](double t) { return Complex(t, height(t)); };
    auto dz = [height_deriv](double t) { return Complex(1.0, height_deriv(t)); };
    return from_parametrization(z, dz, n, 1);
}

Contour Contour::from_parametrization(std::function<Complex(double)> z,
                                      std::function<Complex(double)> dz, int n,
                                      int winding) {
    Contour c;
    c.z_ = std::move(z);
    c.dz_ = std::move(dz);
    c.winding_ = winding;
    c.samples_.resize(n);
    for (int j = 0; j < n; ++j) c.samples_[j] = c.z_(static_cast<double>(j) / n);
    return c;
}

Contour Contour::from_samples(std::vector<Complex> samples, int winding) {
    if (samples.size() < 2) throw PreconditionError("Contour: need at least 2 samples");
    for (size_t j = 1; j < samples.size(); ++j)
        if (samples[j] == samples[j - 1])
            throw PreconditionError("Contour: consecutive samples must be distinct");
    Contour c;
    const int n = static_cast<int>(samples.size());
    // interpolate the periodic part (samples minus the winding drift)
    std::vector<Complex> periodic(n);
    for (int j = 0; j < n; ++j)
        periodic[j] = samples[j] - Complex(winding * static_cast<double>(j) / n, 0);
    c.coeff_ = dft_coefficients(periodic);
    c.samples_ = std::move(samples);
    c.winding_ = winding;
    return c;
}

Complex Contour::point(double t) const {
    t -= std::floor(t);
    if (z_) return z_(t);
    return trig_synth(coeff_, t, false) + Complex(winding_ * t, 0);
}

Complex Contour::velocity(double t) const {
    t -= std::floor(t);
    if (dz_) return dz_(t);
    return trig_synth(coeff_, t, true) + Complex(winding_, 0);
}

Complex integrate_closed_contour(const std::function<Complex(Complex)>& integrand,
                                 const Contour& contour, int n) {
    if (n < 16) throw PreconditionError("integrate_closed_contour: n must be >= 16");
    Complex sum(0, 0);
    for (int j = 0; j < n; ++j) {
        const double t = static_cast<double>(j) / n;
        const Complex z = contour.point(t);
        const Complex v = contour.velocity(t);
        const Complex val = integrand(z);
        if (!std::isfinite(val.real()) || !std::isfinite(val.imag())) {
            std::ostringstream os;
            os << "integrate_closed_contour: non-finite integrand at node " << j
               << " (z = " << z.real() << (z.imag() < 0 ? " - " : " + ")
               << std::abs(z.imag()) << "i)";
            throw Error(os.str());
        }
        sum += val * v;
    }
    return sum / static_cast<double>(n);
}

namespace {

constexpr double kVertexParamTol = 1e-12;

// Segment-segment intersection; p + t*(q-p), r + u*(s-r).
bool segment_intersection(const Eigen::Vector2d& p, const Eigen::Vector2d& q,
                          const Eigen::Vector2d& r, const Eigen::Vector2d& s,
                          Crossing& out) {
    const Eigen::Vector2d d1 = q - p;
    const Eigen::Vector2d d2 = s - r;
    const double l1 = d1.norm(), l2 = d2.norm();
    if (l1 == 0.0 || l2 == 0.0) return false;  // degenerate segments skipped
    const double denom = d1.x() * d2.y() - d1.y() * d2.x();
    const Eigen::Vector2d w = r - p;
    const double cross_w2 = w.x() * d2.y() - w.y() * d2.x();
    const double cross_w1 = w.x() * d1.y() - w.y() * d1.x();
    // near-parallel: treat as non-transversal; check for collinear overlap
    if (std::abs(denom) <= 1e-9 * l1 * l2) {
        const double dist = std::abs(cross_w1) / l1;  // distance of r from line(p,q)
        if (dist <= 1e-9 * std::max(l1, l2)) {
            // project both segments on the common direction
            const Eigen::Vector2d e = d1 / l1;
            double a0 = 0.0, a1 = l1;
            double b0 = e.dot(r - p), b1 = e.dot(s - p);
            if (b0 > b1) std::swap(b0, b1);
            const double lo = std::max(a0, b0), hi = std::min(a1, b1);
            if (hi - lo > 1e-12 * std::max(l1, l2)) {
                out.point = p + e * (0.5 * (lo + hi));
                out.t_a = 0.5 * (lo + hi) / l1;
                out.t_b = 0.0;
                out.kind = CrossingKind::CollinearOverlap;
                return true;
            }
        }
        return false;
    }
    const double t = cross_w2 / denom;
    const double u = cross_w1 / denom;
    if (t < -kVertexParamTol || t > 1.0 + kVertexParamTol) return false;
    if (u < -kVertexParamTol || u > 1.0 + kVertexParamTol) return false;
    out.point = p + t * d1;
    out.t_a = t;
    out.t_b = u;
    const bool near_vertex = t < kVertexParamTol || t > 1.0 - kVertexParamTol ||
                             u < kVertexParamTol || u > 1.0 - kVertexParamTol;
    out.kind = near_vertex ? CrossingKind::VertexTouch : CrossingKind::Transversal;
    return true;
}

}  // namespace

std::vector<Crossing> polyline_intersections(const Polyline2D& a, const Polyline2D& b) {
    if (a.vertices.size() < 2 || b.vertices.size() < 2)
        return {};
    const bool self = (&a == &b);
    const int na = static_cast<int>(a.vertices.size()) - 1;
    const int nb = static_cast<int>(b.vertices.size()) - 1;
    std::vector<Crossing> result;
    for (int i = 0; i < na; ++i) {
        for (int j = self ? i + 2 : 0; j < nb; ++j) {
            Crossing c;
            if (!segment_intersection(a.vertices[i], a.vertices[i + 1], b.vertices[j],
                                      b.vertices[j + 1], c))
                continue;
            if (self && c.kind == CrossingKind::VertexTouch && j == i + 2 &&
                c.t_a > 1.0 - kVertexParamTol && c.t_b < kVertexParamTol)
                continue;  // shared-vertex contact of next-but-one segments
            c.seg_a = i;
            c.seg_b = j;
            result.push_back(c);
        }
    }
    return result;
}

std::vector<Crossing> self_intersections(const Polyline2D& a) {
    return polyline_intersections(a, a);
}

RichardsonResult richardson_extrapolate(const std::vector<std::pair<double, Complex>>& samples,
                                        double order) {
    if (samples.size() < 2)
        throw PreconditionError("richardson_extrapolate: need at least 2 samples");
    if (order <= 0) throw PreconditionError("richardson_extrapolate: order must be positive");
    const int n = static_cast<int>(samples.size());
    std::vector<double> u(n);
    std::vector<Complex> v(n);
    for (int i = 0; i < n; ++i) {
        if (samples[i].first <= 0.0)
            throw PreconditionError("richardson_extrapolate: h values must be positive");
        u[i] = std::pow(samples[i].first, order);
        v[i] = samples[i].second;
    }
    // Neville tableau evaluated at u = 0.
    Complex prev = v[0];
    for (int level = 1; level < n; ++level) {
        prev = v[0];
        for (int i = 0; i < n - level; ++i) {
            const double denom = u[i] - u[i + level];
            if (denom == 0.0)
                throw PreconditionError("richardson_extrapolate: h values must be distinct");
            v[i] = (u[i] * v[i + 1] - u[i + level] * v[i]) / denom;
        }
    }
    return {v[0], std::abs(v[0] - prev)};
}

}  // namespace bubbleforge
