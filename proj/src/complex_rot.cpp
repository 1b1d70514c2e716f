#include "bubbleforge/complex_rot.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bubbleforge/errors.hpp"

namespace bubbleforge {

namespace {

Complex cis(Complex z) { return std::exp(Complex(0, kTwoPi) * z); }

// Periodic logarithm with vertical branch cut and its z-derivatives
// (periodic poles). side = +1 puts the cut on {Re z = a, Im z >= 0} (use
// under attractors), side = -1 on the downward ray (use over repellors).
// With u = e / (1 - e), e = e^{-s 2 pi i (z - a)}:
//   T_0 = (1 / 2 pi i) Log(1 - e),  T_1 = s u,  du/dz = -s 2 pi i u (1 + u),
// so T_m for m >= 1 is a polynomial in u obtained by the chain rule.
Complex sing_term(Complex z, Complex a, int side, int order) {
    const Complex e = cis(-static_cast<double>(side) * (z - a));
    if (order == 0) return std::log(1.0 - e) / Complex(0, kTwoPi);
    const Complex u = e / (1.0 - e);
    std::vector<Complex> c{Complex(0, 0), Complex(static_cast<double>(side), 0)};
    for (int m = 1; m < order; ++m) {
        std::vector<Complex> d(c.size() + 1, Complex(0, 0));
        for (size_t j = 1; j < c.size(); ++j) {
            const Complex t =
                c[j] * static_cast<double>(j) * Complex(0, -kTwoPi) * static_cast<double>(side);
            d[j] += t;      // P'(u) u^j term of u (1 + u)
            d[j + 1] += t;  // and its u^{j+1} companion
        }
        c = std::move(d);
    }
    Complex out = 0;
    Complex up = 1;
    for (size_t j = 1; j < c.size(); ++j) {
        up *= u;
        out += c[j] * up;
    }
    return out;
}

Complex eval_phi(const ConjugacySolution& s, Complex z) {
    Complex out = 0;
    for (int k = -s.K; k <= s.K; ++k) {
        if (k == 0) continue;
        out += s.coeffs(k + s.K) * cis(static_cast<double>(k) * z);
    }
    for (size_t j = 0; j < s.log_points.size(); ++j)
        out += s.log_coeffs(j) * sing_term(z, s.log_points[j], s.log_sides[j], s.log_orders[j]);
    return out;
}

Complex eval_phi_deriv(const ConjugacySolution& s, Complex z) {
    Complex out = 0;
    for (int k = -s.K; k <= s.K; ++k) {
        if (k == 0) continue;
        out += s.coeffs(k + s.K) * Complex(0, kTwoPi * k) * cis(static_cast<double>(k) * z);
    }
    for (size_t j = 0; j < s.log_points.size(); ++j)
        out += s.log_coeffs(j) *
               sing_term(z, s.log_points[j], s.log_sides[j], s.log_orders[j] + 1);
    return out;
}

// Least-squares collocation of phi(f(z) + omega) - phi(z) = tau - (f(z)+omega - z)
// at 2(2K+2) points of `gamma`. Columns are norm-equilibrated before the QR
// solve; raw Laurent columns differ by e^{2 pi K Im omega} otherwise.
ConjugacySolution solve_conjugacy(const CircleMap& f, Complex omega, const Contour& gamma, int K,
                                  const std::vector<Complex>& log_points,
                                  const std::vector<int>& log_sides,
                                  const std::vector<int>& log_orders) {
    if (K < 4) throw PreconditionError("truncation order K must be at least 4");
    const int nlog = static_cast<int>(log_points.size());
    const int ncol = 2 * K + nlog + 1;  // modes k != 0, log terms, tau
    const int N = 2 * (2 * K + 2);

    Eigen::MatrixXcd A(N, ncol);
    Eigen::VectorXcd b(N);
    for (int j = 0; j < N; ++j) {
        const Complex z = gamma.point(static_cast<double>(j) / N);
        const Complex fz = f.eval(z) + omega;
        int col = 0;
        for (int k = -K; k <= K; ++k) {
            if (k == 0) continue;
            const double kk = static_cast<double>(k);
            A(j, col++) = cis(kk * fz) - cis(kk * z);
        }
        for (int l = 0; l < nlog; ++l)
            A(j, col++) = sing_term(fz, log_points[l], log_sides[l], log_orders[l]) -
                          sing_term(z, log_points[l], log_sides[l], log_orders[l]);
        A(j, col) = Complex(-1, 0);
        b(j) = -(fz - z);
    }

    Eigen::VectorXd scale(ncol);
    for (int c = 0; c < ncol; ++c) {
        scale(c) = A.col(c).norm();
        if (scale(c) == 0.0) scale(c) = 1.0;
        A.col(c) /= scale(c);
    }
    // Minimum-norm least squares with small singular values truncated: the
    // restriction operator has near-null directions (truncated images of
    // f-invariant functions on the annulus); a basic QR solution can park
    // large coefficients there and wreck the defect between collocation
    // points.
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-12);
    Eigen::VectorXcd x = svd.solve(b);
    for (int c = 0; c < ncol; ++c) x(c) /= scale(c);

    ConjugacySolution s;
    s.omega = omega;
    s.K = K;
    s.contour = gamma;
    s.coeffs = Eigen::VectorXcd::Zero(2 * K + 1);
    int col = 0;
    for (int k = -K; k <= K; ++k) {
        if (k == 0) continue;
        s.coeffs(k + K) = x(col++);
    }
    s.log_points = log_points;
    s.log_sides = log_sides;
    s.log_orders = log_orders;
    s.log_coeffs = Eigen::VectorXcd::Zero(nlog);
    for (int l = 0; l < nlog; ++l) s.log_coeffs(l) = x(col++);
    s.tau = x(col);

    // Defect sup-norm on a sample offset from the collocation points.
    const int M = 2 * N;
    double sup = 0.0;
    for (int j = 0; j < M; ++j) {
        const Complex z = gamma.point((j + 0.5) / M);
        const Complex fz = f.eval(z) + omega;
        const Complex defect = eval_phi(s, fz) - eval_phi(s, z) - s.tau + (fz - z);
        sup = std::max(sup, std::abs(defect));
    }
    s.residual = sup;
    return s;
}

void check_regularity(const ConjugacySolution& s) {
    const int M = 512;
    double min_deriv = std::numeric_limits<double>::infinity();
    for (int j = 0; j < M; ++j)
        min_deriv =
            std::min(min_deriv, std::abs(s.Phi_deriv(s.contour.point(static_cast<double>(j) / M))));
    if (min_deriv < 1e-6)
        throw ConsistencyError("conjugacy solution degenerates on the contour (winding check failed)");
}

void enforce_tolerance(const ConjugacySolution& s, double tol) {
    if (s.residual > tol) {
        std::ostringstream os;
        os << "conjugacy defect " << s.residual << " exceeds tolerance " << tol
           << " at K = " << s.K;
        throw AccuracyError(os.str(), s.residual);
    }
}

Contour base_circle(int n) {
    return Contour::cylinder_graph([](double) { return 0.0; }, [](double) { return 0.0; }, n);
}

// Derivative orders carried per singular point. Only the log itself (order
// 0) is genuinely outside the Fourier span on the annulus side of the cut;
// higher poles are one-sided geometric series in e^{-s 2 pi i (z-a)} and
// only degrade the conditioning of the solve.
constexpr int kSingularOrders = 0;

void push_singular(std::vector<Complex>& pts, std::vector<int>& sides, std::vector<int>& orders,
                   Complex a, int side) {
    for (int m = 0; m <= kSingularOrders; ++m) {
        pts.push_back(a);
        sides.push_back(side);
        orders.push_back(m);
    }
}

// For Im omega > 0 the branch points of phi are the complex (ghost) fixed
// points of f + omega inside the analyticity band, found by Newton from a
// grid of real seeds. The cut of each log term points away from the real
// axis: upward for ghosts in the upper half cylinder, downward below. At a
// hyperbolic parameter this reproduces the attractor/repellor convention; at
// a near-parabolic one it picks up the sqrt(Im omega)-split ghost pair that
// otherwise dominates the truncation error.
void ghost_log_basis(const CircleMap& f, Complex omega, std::vector<Complex>& pts,
                     std::vector<int>& sides, std::vector<int>& orders) {
    const double band = 0.9 * f.analyticity_band();
    const int nseed = 96;
    for (int i = 0; i < nseed; ++i) {
        const double y = 0.3 * band * static_cast<double>(i % 3 - 1);
        Complex z(static_cast<double>(i / 3) * 3.0 / nseed, y);
        bool converged = false;
        try {
            for (int it = 0; it < 60; ++it) {
                if (std::abs(z.imag()) > band) break;
                const Complex r = f.eval(z) + omega - z;
                const Complex d = f.deriv(z) - 1.0;
                if (std::abs(d) < 1e-12) break;
                const Complex dz = r / d;
                z -= dz;
                if (std::abs(dz) < 1e-12) {
                    converged = std::abs(f.eval(z) + omega - z) < 1e-9;
                    break;
                }
            }
        } catch (const Error&) {
            converged = false;
        }
        if (!converged || std::abs(z.imag()) > band) continue;
        z = Complex(z.real() - std::floor(z.real()), z.imag());
        bool dup = false;
        for (const Complex& p : pts) {
            double dx = std::abs(p.real() - z.real());
            dx = std::min(dx, 1.0 - dx);
            if (std::hypot(dx, p.imag() - z.imag()) < 1e-8) dup = true;
        }
        if (dup) continue;
        const int side = std::abs(z.imag()) > 1e-13 ? (z.imag() > 0 ? +1 : -1)
                                                    : (std::abs(f.deriv(z)) < 1.0 ? +1 : -1);
        push_singular(pts, sides, orders, z, side);
    }
}

// Fiberwise ordering check: f(gamma) strictly above gamma, cheap enough to
// re-run on caller-supplied curves.
void check_curve(const CircleMap& f, const Contour& gamma) {
    const int M = 256;
    std::vector<Complex> pts(M);
    for (int j = 0; j < M; ++j) pts[j] = gamma.point(static_cast<double>(j) / M);
    auto height = [&](double x) {
        const double x0 = pts[0].real();
        double xr = x0 + std::fmod(x - x0, 1.0);
        if (xr < x0) xr += 1.0;
        for (int i = 0; i < M; ++i) {
            double xa = pts[i].real();
            double xb = (i + 1 < M) ? pts[i + 1].real() : pts[0].real() + 1.0;
            if (xr >= xa - 1e-12 && xr <= xb + 1e-12) {
                const double ya = pts[i].imag();
                const double yb = (i + 1 < M) ? pts[i + 1].imag() : pts[0].imag();
                const double t = (xb > xa) ? (xr - xa) / (xb - xa) : 0.0;
                return ya + t * (yb - ya);
            }
        }
        return pts[0].imag();
    };
    for (const Complex& z : pts) {
        const Complex fz = f.eval(z);
        if (!(fz.imag() > height(fz.real())))
            throw GeometryError("curve invariant violated: image is not strictly above the curve");
    }
}

}  // namespace

// Chart representation of the boundary conjugacy. In the Koenigs cylinder
// coordinate zeta_j = log kappa_j / log lambda_j of fixed point j the map
// acts as zeta -> zeta + 1, so any H with H(f(z)) = H(z) + tau reads
//   H = tau * zeta_j + g_j(xi_j),   xi_j = e^{2 pi i zeta_j},
// with g_j a Laurent series (the f-invariant part, a Fourier series on the
// quotient torus). The coefficients and tau are fixed by gluing adjacent
// representations on the gaps between fixed points; going once around the
// cylinder H gains +1 while every zeta_j is periodic, so the gluing
// constants carry a total offset of -1, placed on the wrap-around gap.
struct ChartGlueData {
    struct Chart {
        KoenigsChart koenigs;
        double point = 0.0;      // lifted fixed point
        double lnlam = 0.0;
        // log kappa sampled and unwrapped along the line Im z = h0 across the
        // chart's basin; fixes the branch when evaluating near the line.
        std::vector<double> xs;
        std::vector<Complex> logk;
        double smax = 0.0;       // range of Re(2 pi i zeta) on the collocation
        double smin = 0.0;       // samples; scales the Laurent columns
    };
    double h0 = 0.0;
    int M = 0;                   // Laurent modes m = -M..M per chart
    int nc = 0;                  // gluing samples per gap
    double wrap_offset = 0.0;    // gluing constant of the wrap-around gap
    Complex tau;
    std::vector<Chart> charts;   // fixed points in ascending order
    std::vector<Eigen::VectorXcd> coeffs;  // per chart, a_m at index m + M
};

namespace {

// Branch-consistent zeta at z near the chain line, by rounding the principal
// log to the interpolated chain value.
Complex glue_zeta(const ChartGlueData::Chart& c, Complex z) {
    double x = z.real();
    x -= std::floor((x - c.xs.front()) / 1.0);  // lift into [front, front + 1)
    if (x > c.xs.back()) x = (x - c.xs.front() < 1.0 + c.xs.back() - x) ? c.xs.front() : c.xs.back();
    Complex lk = std::log(c.koenigs.to_linear(Complex(x, z.imag())));
    const auto it = std::lower_bound(c.xs.begin(), c.xs.end(), x);
    const size_t i1 = std::min(c.xs.size() - 1, static_cast<size_t>(it - c.xs.begin()));
    const size_t i0 = i1 == 0 ? 0 : i1 - 1;
    const double t = (i1 > i0) ? (x - c.xs[i0]) / (c.xs[i1] - c.xs[i0]) : 0.0;
    const Complex ref = c.logk[i0] + t * (c.logk[i1] - c.logk[i0]);
    lk += Complex(0, kTwoPi) * std::round((ref.imag() - lk.imag()) / kTwoPi);
    return lk / c.lnlam;
}

Complex glue_zeta_deriv(const ChartGlueData::Chart& c, Complex z) {
    return c.koenigs.to_linear_deriv(z) / (c.koenigs.to_linear(z) * c.lnlam);
}

// One scaled Laurent column: xi^m normalized so that |value| <= 1 on the
// chart's collocation samples (their |xi| spans several decades).
Complex glue_mode(const ChartGlueData::Chart& c, int m, Complex zeta) {
    if (m == 0) return 1.0;
    const Complex w = Complex(0, kTwoPi) * zeta;
    return std::exp(static_cast<double>(m) * (w - (m > 0 ? c.smax : c.smin)));
}

Complex glue_g(const ChartGlueData& d, size_t j, Complex zeta) {
    Complex out = 0;
    for (int m = -d.M; m <= d.M; ++m) out += d.coeffs[j](m + d.M) * glue_mode(d.charts[j], m, zeta);
    return out;
}

Complex glue_g_deriv(const ChartGlueData& d, size_t j, Complex zeta, Complex zeta_deriv) {
    Complex out = 0;
    for (int m = -d.M; m <= d.M; ++m) {
        if (m == 0) continue;
        out += d.coeffs[j](m + d.M) * Complex(0, kTwoPi * m) * zeta_deriv *
               glue_mode(d.charts[j], m, zeta);
    }
    return out;
}

size_t glue_chart_index(const ChartGlueData& d, double x) {
    size_t best = 0;
    double dist = std::numeric_limits<double>::infinity();
    for (size_t j = 0; j < d.charts.size(); ++j) {
        double dx = std::abs(x - d.charts[j].point);
        dx = std::abs(dx - std::round(dx));
        if (dx < dist) {
            dist = dx;
            best = j;
        }
    }
    return best;
}

Complex glue_phi(const ChartGlueData& d, Complex z) {
    const size_t j = glue_chart_index(d, z.real());
    const Complex zeta = glue_zeta(d.charts[j], z);
    return d.tau * zeta + glue_g(d, j, zeta) - z;
}

Complex glue_phi_deriv(const ChartGlueData& d, Complex z) {
    const size_t j = glue_chart_index(d, z.real());
    const Complex zeta = glue_zeta(d.charts[j], z);
    const Complex zd = glue_zeta_deriv(d.charts[j], z);
    return d.tau * zd + glue_g_deriv(d, j, zeta, zd) - 1.0;
}

ChartGlueData build_chart_glue(const CircleMap& f, const PeriodicOrbitSet& orbits, double h0,
                               int M, double wrap_offset) {
    struct Fp {
        double x;
        double lam;
    };
    std::vector<Fp> fps;
    for (const PeriodicOrbit& o : orbits.orbits) {
        if (o.period != 1)
            throw PreconditionError("chart gluing is implemented for rot = 0 curves only");
        fps.push_back({o.point - std::floor(o.point), o.multiplier});
    }
    std::sort(fps.begin(), fps.end(), [](const Fp& a, const Fp& b) { return a.x < b.x; });
    const int n = static_cast<int>(fps.size());
    if (n < 2 || n % 2 != 0)
        throw PreconditionError("chart gluing needs an even number of fixed points");

    ChartGlueData d;
    d.h0 = h0;
    d.M = M;
    d.wrap_offset = wrap_offset;

    const int nc = std::max(48, 4 * M);  // gluing samples per gap
    d.nc = nc;
    const int nb = 17;                   // bridge samples over each fixed point
    const double mf = 0.1;               // gap margin kept clear of the points

    // Collocation windows and abscissae of gap j = (point j, point j+1).
    std::vector<double> ga(n), gb(n);
    std::vector<std::vector<double>> gx(n);
    for (int j = 0; j < n; ++j) {
        const double L = fps[j].x;
        const double R = (j + 1 < n) ? fps[j + 1].x : fps[0].x + 1.0;
        ga[j] = L + mf * (R - L);
        gb[j] = R - mf * (R - L);
        for (int i = 0; i < nc; ++i) gx[j].push_back(ga[j] + (gb[j] - ga[j]) * (i + 0.5) / nc);
    }

    // Charts with their unwrapped log kappa chains. A chain runs across the
    // chart's basin: left gap samples, a bridge over the fixed point, right
    // gap samples; the left-gap collocation values sit at indices [0, nc),
    // the right-gap ones at [nc + nb, nc + nb + nc).
    for (int j = 0; j < n; ++j) {
        ChartGlueData::Chart c;
        c.koenigs = koenigs_chart(f, fps[j].x, fps[j].lam);
        c.point = fps[j].x;
        c.lnlam = std::log(fps[j].lam);
        const int jl = (j + n - 1) % n;
        const double shift = (j == 0) ? -1.0 : 0.0;
        for (double x : gx[jl]) c.xs.push_back(x + shift);
        const double bl = gb[jl] + shift;
        const double br = ga[j];
        for (int i = 1; i <= nb; ++i) c.xs.push_back(bl + (br - bl) * i / (nb + 1));
        for (double x : gx[j]) c.xs.push_back(x);
        for (double x : c.xs) {
            Complex lk = std::log(c.koenigs.to_linear(Complex(x, h0)));
            if (!c.logk.empty())
                lk += Complex(0, kTwoPi) * std::round((c.logk.back().imag() - lk.imag()) / kTwoPi);
            c.logk.push_back(lk);
        }
        // The chain runs above the fixed point, but the gluing region passes
        // under attractors (where the curve dips); continuing log kappa under
        // the point instead differs by one full monodromy turn. Shift the
        // right-gap branch accordingly.
        if (c.lnlam < 0)
            for (size_t i = nc + nb; i < c.logk.size(); ++i) c.logk[i] += Complex(0, kTwoPi);
        c.smax = -std::numeric_limits<double>::infinity();
        c.smin = std::numeric_limits<double>::infinity();
        auto visit = [&](size_t i) {
            const double s = -kTwoPi * (c.logk[i] / c.lnlam).imag();
            c.smax = std::max(c.smax, s);
            c.smin = std::min(c.smin, s);
        };
        for (int i = 0; i < nc; ++i) visit(i);
        for (int i = 0; i < nc; ++i) visit(nc + nb + i);
        d.charts.push_back(std::move(c));
    }

    // Least squares for tau and the Laurent tails: on gap j the charts j and
    // j + 1 overlap and tau (zeta_j - zeta_{j+1}) + g_j - g_{j+1} must be the
    // gap's gluing constant. The global additive constant is a null direction
    // (all a_0 shift together); the truncated SVD picks the minimum-norm
    // representative.
    const int block = 2 * M + 1;
    const int ncols = 1 + n * block;
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n * nc, ncols);
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(n * nc);
    auto zeta_at = [&](int chart, size_t chain_index) {
        return d.charts[chart].logk[chain_index] / d.charts[chart].lnlam;
    };
    for (int g = 0; g < n; ++g) {
        const int cl = g;                // left chart: gap g is its right gap
        const int cr = (g + 1) % n;      // right chart: gap g is its left gap
        for (int i = 0; i < nc; ++i) {
            const int row = g * nc + i;
            const Complex zl = zeta_at(cl, nc + nb + i);
            const Complex zr = zeta_at(cr, i);
            A(row, 0) = zl - zr;
            for (int m = -M; m <= M; ++m) {
                A(row, 1 + cl * block + m + M) += glue_mode(d.charts[cl], m, zl);
                A(row, 1 + cr * block + m + M) -= glue_mode(d.charts[cr], m, zr);
            }
            if (g == n - 1) b(row) = wrap_offset;
        }
    }
    // Equilibrate, then damp high Laurent modes geometrically: the true
    // coefficients decay fast, while bare equilibration inflates the barely
    // sampled high-mode columns and the minimum-norm solution rings between
    // collocation points.
    Eigen::VectorXd colnorm(ncols);
    for (int c = 0; c < ncols; ++c) {
        colnorm(c) = A.col(c).norm();
        if (colnorm(c) < 1e-300) colnorm(c) = 1.0;
        if (c > 0) {
            const int m = (c - 1) % block - M;
            colnorm(c) *= std::pow(2.0, std::abs(m));
        }
        A.col(c) /= colnorm(c);
    }
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-12);
    Eigen::VectorXcd x = svd.solve(b);
    for (int c = 0; c < ncols; ++c) x(c) /= colnorm(c);

    d.tau = x(0);
    for (int j = 0; j < n; ++j) d.coeffs.push_back(x.segment(1 + j * block, block));
    return d;
}

// Sup norm of the gluing defect at points offset from the collocation grid.
double glue_residual(const ChartGlueData& d) {
    const int n = static_cast<int>(d.charts.size());
    double sup = 0.0;
    for (int g = 0; g < n; ++g) {
        const int cl = g;
        const int cr = (g + 1) % n;
        const std::vector<double>& xs = d.charts[cl].xs;  // gap g = its last nc entries
        const double b0 = xs[xs.size() - d.nc];
        const double a = xs.back();
        for (int i = 0; i < d.nc - 1; ++i) {
            const double x = b0 + (a - b0) * (i + 0.5) / (d.nc - 1);
            const Complex z(x, d.h0);
            const Complex zl = glue_zeta(d.charts[cl], z);
            const Complex zr = glue_zeta(d.charts[cr], z);
            const double offset = (g == n - 1) ? d.wrap_offset : 0.0;
            const Complex defect =
                d.tau * (zl - zr) + glue_g(d, cl, zl) - glue_g(d, cr, zr) - offset;
            sup = std::max(sup, std::abs(defect));
        }
    }
    return sup;
}

}  // namespace

Complex ConjugacySolution::phi(Complex z) const {
    return glue ? glue_phi(*glue, z) : eval_phi(*this, z);
}
Complex ConjugacySolution::phi_deriv(Complex z) const {
    return glue ? glue_phi_deriv(*glue, z) : eval_phi_deriv(*this, z);
}

ConjugacySolution tau_interior(const CircleMap& f, Complex omega, int K, double tol,
                               const Contour* collocation) {
    if (!(omega.imag() > 0) && collocation == nullptr)
        throw PreconditionError("tau_interior needs Im omega > 0");
    if (kTwoPi * K * std::abs(omega.imag()) > 600.0)
        throw PreconditionError("K * Im omega too large: Laurent columns overflow");
    const Contour gamma = collocation ? *collocation : base_circle(2 * (2 * K + 2));
    ConjugacySolution s = solve_conjugacy(f, omega, gamma, K, {}, {}, {});
    enforce_tolerance(s, tol);
    check_regularity(s);
    if (collocation == nullptr && !(s.tau.imag() > 0))
        throw ConsistencyError("computed tau has nonpositive imaginary part");
    return s;
}

BoundaryLimit tau_boundary_limit(const CircleMap& f, double omega, std::vector<double> schedule,
                                 int K, double tol, const AscendingCurve* curve) {
    if (schedule.empty())
        for (int j = 0; j <= 4; ++j) schedule.push_back(0.02 * std::pow(2.0, -j));
    if (!std::is_sorted(schedule.rbegin(), schedule.rend()))
        throw PreconditionError("schedule must be strictly decreasing");

    // The base circle works for every delta in the schedule once the ghost
    // log basis absorbs the branch points approaching the axis; a
    // caller-supplied ascending curve is used instead when given.
    const CircleMap shifted = f.shifted(Complex(omega, 0));
    const Contour gamma = curve != nullptr ? curve->contour : base_circle(2 * (2 * K + 2));

    BoundaryLimit out;
    out.schedule = schedule;
    for (double d : schedule) {
        std::vector<Complex> log_points;
        std::vector<int> log_sides;
        std::vector<int> log_orders;
        ghost_log_basis(shifted, Complex(0, d), log_points, log_sides, log_orders);
        ConjugacySolution s =
            solve_conjugacy(f, Complex(omega, d), gamma, K, log_points, log_sides, log_orders);
        out.values.push_back(s.tau);
        out.residuals.push_back(s.residual);
    }

    // The approach rate to the boundary is not known a priori: analytic in
    // delta at hyperbolic parameters, sqrt-like at parabolic ones. Try both
    // exponents and keep the one whose tableau settles better.
    struct Cand {
        Complex tau;
        double err;
        double order;
    };
    std::vector<Cand> cands;
    for (double order : {1.0, 0.5}) {
        std::vector<std::pair<double, Complex>> nodes;
        for (size_t i = 0; i < schedule.size(); ++i) nodes.emplace_back(schedule[i], out.values[i]);
        const RichardsonResult r = richardson_extrapolate(nodes, order);
        cands.push_back({r.value, r.error_estimate, order});
    }
    const Cand& best = *std::min_element(
        cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.err < b.err; });
    out.tau = best.tau;
    out.error_estimate = best.err;
    out.order = best.order;

    if (!(out.error_estimate < tol)) {
        std::ostringstream os;
        os << "boundary extrapolants not Cauchy (gap " << out.error_estimate << " > tol " << tol
           << "); tau sequence:";
        for (const Complex& v : out.values) os << " (" << v.real() << "," << v.imag() << ")";
        throw ConvergenceError(os.str());
    }
    return out;
}

ConjugacySolution tau_boundary_hyperbolic(const CircleMap& f, const AscendingCurve& gamma, int K,
                                          double tol) {
    if (K < 4) throw PreconditionError("truncation order K must be at least 4");
    check_curve(f, gamma.contour);
    const int M = std::max(12, K / 4);

    // Koenigs orbits can leave the analyticity band when started too high;
    // lower the collocation line until they stay inside.
    double h0 = gamma.amplitude;
    std::shared_ptr<ChartGlueData> glue;
    for (int attempt = 0;; ++attempt) {
        try {
            glue = std::make_shared<ChartGlueData>(
                build_chart_glue(f, gamma.orbits, h0, M, /*wrap_offset=*/1.0));
            break;
        } catch (const DomainError&) {
            if (attempt >= 4) throw;
            h0 *= 0.5;
        }
    }

    ConjugacySolution s;
    s.tau = glue->tau;
    s.omega = Complex(0, 0);
    s.K = K;
    s.residual = glue_residual(*glue);
    s.contour = Contour::cylinder_graph([h0](double) { return h0; }, [](double) { return 0.0; },
                                        2 * (2 * K + 2));
    s.coeffs = Eigen::VectorXcd::Zero(2 * K + 1);
    s.glue = std::move(glue);

    enforce_tolerance(s, tol);
    check_regularity(s);
    if (!(s.tau.imag() > 0))
        throw ConsistencyError("boundary tau has nonpositive imaginary part");
    return s;
}

}  // namespace bubbleforge
