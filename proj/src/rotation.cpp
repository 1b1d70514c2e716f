#include "bubbleforge/rotation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "bubbleforge/errors.hpp"

namespace bubbleforge {

namespace {

constexpr long kMaxPeriod = 64;

// G(x) = F^q(x) - x - p and its x-derivative.
struct IterateGap {
    const CircleMap* f;
    long p, q;

    double value(double x) const {
        double y = x;
        for (long i = 0; i < q; ++i) y = f->lift(y);
        return y - x - static_cast<double>(p);
    }
    double deriv(double x) const {
        double y = x;
        double d = 1.0;
        for (long i = 0; i < q; ++i) {
            d *= f->lift_deriv(y);
            y = f->lift(y);
        }
        return d - 1.0;
    }
    // multiplier (F^q)'(x)
    double multiplier(double x) const { return deriv(x) + 1.0; }
};

struct RangeCertificate {
    double min, max;        // over all grid nodes and interior critical points
    double min_arg, max_arg;
    double max_abs_grid;    // for identity detection
};

// Certified-range scan: grid values plus critical points located by sign
// changes of G' (bisection). Assumes the grid resolves the oscillation of G',
// which holds for the supported map kinds at n >= 256 q.
RangeCertificate certified_range(const IterateGap& g, int n) {
    RangeCertificate rc{1e300, -1e300, 0.0, 0.0, 0.0};
    std::vector<double> val(n + 1), dv(n + 1);
    for (int j = 0; j <= n; ++j) {
        const double x = static_cast<double>(j) / n;
        val[j] = g.value(x);
        dv[j] = g.deriv(x);
        rc.max_abs_grid = std::max(rc.max_abs_grid, std::abs(val[j]));
        if (val[j] < rc.min) { rc.min = val[j]; rc.min_arg = x; }
        if (val[j] > rc.max) { rc.max = val[j]; rc.max_arg = x; }
    }
    for (int j = 0; j < n; ++j) {
        if (dv[j] == 0.0 || (dv[j] > 0) == (dv[j + 1] > 0)) continue;
        double lo = static_cast<double>(j) / n, hi = static_cast<double>(j + 1) / n;
        double dlo = dv[j];
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double dm = g.deriv(mid);
            if ((dm > 0) == (dlo > 0)) { lo = mid; dlo = dm; } else { hi = mid; }
        }
        const double x = 0.5 * (lo + hi);
        const double v = g.value(x);
        if (v < rc.min) { rc.min = v; rc.min_arg = x; }
        if (v > rc.max) { rc.max = v; rc.max_arg = x; }
    }
    return rc;
}

int grid_for_period(long q) { return static_cast<int>(std::max<long>(2048, 256 * q)); }

}  // namespace

RationalRotation RationalRotation::make(long p, long q) {
    if (q <= 0) throw PreconditionError("RationalRotation: q must be positive");
    p %= q;
    if (p < 0) p += q;
    const long g = std::gcd(p, q);
    return {p / g, q / g};
}

RationalCompare compare_to_rational(const CircleMap& f, RationalRotation r) {
    if (r.q > kMaxPeriod)
        throw PreconditionError("compare_to_rational: period exceeds configured bound");
    const IterateGap g{&f, r.p, r.q};
    const RangeCertificate rc = certified_range(g, grid_for_period(r.q));
    const double tolz = 1e-12 * (1.0 + static_cast<double>(r.q));
    if (rc.max_abs_grid <= tolz) return RationalCompare::Equal;  // exact rational rotation
    if (rc.min > tolz) return RationalCompare::Greater;
    if (rc.max < -tolz) return RationalCompare::Less;
    if (rc.min < -tolz && rc.max > tolz) return RationalCompare::Equal;
    std::ostringstream os;
    os << "compare_to_rational: cannot certify trichotomy for " << r.p << "/" << r.q
       << " (range [" << rc.min << ", " << rc.max << "])";
    throw UndecidedError(os.str());
}

double rotation_number(const CircleMap& f, double tol) {
    if (tol <= 0) throw PreconditionError("rotation_number: tol must be positive");
    // Farey (Stern-Brocot) bisection over rationals with bounded period.
    {
        auto cmp = [&f](long p, long q) {
            return compare_to_rational(f, RationalRotation::make(p, q));
        };
        try {
            if (cmp(0, 1) == RationalCompare::Equal) return 0.0;
            long p1 = 0, q1 = 1, p2 = 1, q2 = 1;
            while (q1 + q2 <= kMaxPeriod) {
                const long pm = p1 + p2, qm = q1 + q2;
                const RationalCompare c = cmp(pm, qm);
                if (c == RationalCompare::Equal)
                    return static_cast<double>(pm) / static_cast<double>(qm);
                if (c == RationalCompare::Less) { p2 = pm; q2 = qm; }
                else { p1 = pm; q1 = qm; }
                if (1.0 / (static_cast<double>(q1) * q2) <= tol)
                    return static_cast<double>(p1 + p2) / static_cast<double>(q1 + q2);
            }
        } catch (const UndecidedError&) {
            // tangential zero: rot equals the rational being tested
        }
    }
    // Orbit-average bracketing: rot is within 1/n of (F^n(x) - x) / n.
    const long budget = 1L << 22;
    const long n = std::min<long>(budget, static_cast<long>(std::ceil(2.5 / tol)));
    double y = 0.0;
    for (long i = 0; i < n; ++i) y = f.lift(y);
    const double lo = (y - 1.0) / n, hi = (y + 1.0) / n;
    if (hi - lo > tol) {
        std::ostringstream os;
        os << "rotation_number: budget exhausted; best bracket [" << lo << ", " << hi << "]";
        throw ConvergenceError(os.str());
    }
    double rot = 0.5 * (lo + hi);
    rot -= std::floor(rot);
    return rot;
}

double RotationInterval::length() const {
    double len = right - left;
    len -= std::floor(len);
    return len;
}

RotationInterval rational_interval(const CircleMap& f, RationalRotation r, double tol) {
    if (tol <= 0) throw PreconditionError("rational_interval: tol must be positive");
    const int n = grid_for_period(r.q);
    // m(omega) = min_x G, M(omega) = max_x G are strictly increasing in omega.
    // The interval is [zero of M, zero of m].
    auto range_at = [&](double omega) {
        const CircleMap fo = f.shifted(Complex(omega, 0));
        const IterateGap g{&fo, r.p, r.q};
        return certified_range(g, n);
    };
    auto bisect_zero = [&](auto&& pick) -> double {
        double lo = -2.0, hi = 2.0;
        if (pick(range_at(lo)) > 0 || pick(range_at(hi)) < 0)
            throw NotFoundError("rational_interval: rotation number never attained in scan");
        while (hi - lo > tol * 0.5) {
            const double mid = 0.5 * (lo + hi);
            (pick(range_at(mid)) < 0 ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };
    const double left = bisect_zero([](const RangeCertificate& rc) { return rc.max; });
    const double right = bisect_zero([](const RangeCertificate& rc) { return rc.min; });
    RotationInterval out;
    out.rational = r;
    out.degenerate = (right - left) < tol;
    out.left = left - std::floor(left);
    out.right = right - std::floor(right);
    return out;
}

bool PeriodicOrbitSet::all_hyperbolic() const {
    return std::all_of(orbits.begin(), orbits.end(),
                       [](const PeriodicOrbit& o) { return o.hyperbolic; });
}

PeriodicOrbitSet periodic_orbits(const CircleMap& f, RationalRotation r) {
    if (compare_to_rational(f, r) != RationalCompare::Equal)
        throw PreconditionError("periodic_orbits: rotation number is not p/q");
    const IterateGap g{&f, r.p, r.q};
    const int n = grid_for_period(r.q);
    std::vector<double> val(n + 1), dv(n + 1);
    int tiny = 0;
    for (int j = 0; j <= n; ++j) {
        const double x = static_cast<double>(j) / n;
        val[j] = g.value(x);
        dv[j] = g.deriv(x);
        if (std::abs(val[j]) < 1e-12) ++tiny;
    }
    if (tiny > n / 2)
        throw ConsistencyError("periodic_orbits: map is identity-like on this period");
    std::vector<double> roots;
    auto push_root = [&roots](double x) {
        x -= std::floor(x);
        for (double r0 : roots)
            if (std::abs(r0 - x) < 1e-9 || std::abs(std::abs(r0 - x) - 1.0) < 1e-9) return;
        roots.push_back(x);
    };
    for (int j = 0; j < n; ++j) {
        if (val[j] == 0.0) { push_root(static_cast<double>(j) / n); continue; }
        if ((val[j] > 0) == (val[j + 1] > 0)) continue;
        double lo = static_cast<double>(j) / n, hi = static_cast<double>(j + 1) / n;
        double vlo = val[j];
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double vm = g.value(mid);
            if ((vm > 0) == (vlo > 0)) { lo = mid; vlo = vm; } else { hi = mid; }
        }
        push_root(0.5 * (lo + hi));
    }
    // tangential (parabolic) roots at critical points of G
    for (int j = 0; j < n; ++j) {
        if (dv[j] == 0.0 || (dv[j] > 0) == (dv[j + 1] > 0)) continue;
        double lo = static_cast<double>(j) / n, hi = static_cast<double>(j + 1) / n;
        double dlo = dv[j];
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double dm = g.deriv(mid);
            if ((dm > 0) == (dlo > 0)) { lo = mid; dlo = dm; } else { hi = mid; }
        }
        const double x = 0.5 * (lo + hi);
        if (std::abs(g.value(x)) < 1e-9) push_root(x);
    }
    std::sort(roots.begin(), roots.end());
    PeriodicOrbitSet out;
    for (double x : roots) {
        PeriodicOrbit o;
        o.point = x;
        o.period = r.q;
        o.multiplier = g.multiplier(x);
        // headroom above 1e-8: parabolic parameters are typically irrational,
        // and rounding them to double already perturbs the multiplier by ~1e-8
        o.hyperbolic = std::abs(o.multiplier - 1.0) > 1e-7;
        out.orbits.push_back(o);
    }
    if (out.all_hyperbolic() && out.orbits.size() % 2 != 0)
        throw ConsistencyError("periodic_orbits: odd number of hyperbolic periodic points");
    return out;
}

double distortion(const CircleMap& f) {
    auto integrand = [&f](double x) {
        const Complex z(x, 0);
        return std::abs(f.deriv2(z) / f.deriv(z));
    };
    int n = 256;
    double prev = 0.0;
    for (int pass = 0;; ++pass) {
        double sum = 0.0;
        for (int j = 0; j < n; ++j) sum += integrand(static_cast<double>(j) / n);
        const double cur = sum / n;
        if (pass > 0 && std::abs(cur - prev) < 5e-9) return cur;
        prev = cur;
        n *= 2;
        if (n > (1 << 22))
            throw ConvergenceError("distortion: quadrature did not stabilize");
    }
}

}  // namespace bubbleforge
