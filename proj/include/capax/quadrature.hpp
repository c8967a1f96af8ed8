#pragma once

// Adaptive Gauss-Kronrod 15(7) quadrature over finite and semi-infinite
// intervals. Infinite endpoints are mapped to a finite parameter interval by
// rational substitution before subdivision; the error contract is
// |value - exact| <= max(abs_tol, rel_tol * |value|) on integrands that are
// smooth between subdivision scales.

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "capax/errors.hpp"

namespace capax {

struct QuadratureSpec {
    double abs_tol = 1e-10;
    double rel_tol = 1e-9;
    int max_subdivisions = 2000;
    double tail_tol = 1e-12;  // tail mass threshold for domain truncation

    void validate() const {
        if (!(abs_tol > 0) || !(rel_tol > 0) || !(tail_tol > 0))
            throw InvalidParameter("QuadratureSpec: tolerances must be positive");
        if (max_subdivisions < 1)
            throw InvalidParameter("QuadratureSpec: max_subdivisions must be >= 1");
    }
};

// Real interval; lo/hi may be -+infinity.
struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();

    static Interval whole_line() { return {}; }
    static Interval from(double a) { return {a, std::numeric_limits<double>::infinity()}; }
    static Interval upto(double b) { return {-std::numeric_limits<double>::infinity(), b}; }

    bool finite() const { return std::isfinite(lo) && std::isfinite(hi); }

    void validate() const {
        if (!(lo < hi)) throw InvalidParameter("Interval: requires lo < hi");
    }
};

struct IntegralEstimate {
    double value = 0.0;
    double err_estimate = 0.0;
};

namespace quad_detail {

// 15-point Kronrod abscissae (positive half) and weights, with the embedded
// 7-point Gauss weights, as tabulated in QUADPACK's dqk15.
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b;
    double value;
    double err;
    bool operator<(const Panel& other) const { return err < other.err; }
};

template <class F>
Panel gk15(F&& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);

    auto eval = [&](double t) {
        double v = f(t);
        if (!std::isfinite(v))
            throw NonFiniteEvaluation("integrand returned non-finite value at t=" +
                                      std::to_string(t));
        return v;
    };

    double fv[15];
    const double fc = eval(c);
    fv[7] = fc;
    for (int j = 0; j < 7; ++j) {
        fv[j] = eval(c - h * kXgk[j]);
        fv[14 - j] = eval(c + h * kXgk[j]);
    }

    double resg = kWg[3] * fc;
    double resk = kWgk[7] * fc;
    double resabs = kWgk[7] * std::fabs(fc);
    for (int j = 0; j < 7; ++j) {
        const double sum = fv[j] + fv[14 - j];
        resk += kWgk[j] * sum;
        resabs += kWgk[j] * (std::fabs(fv[j]) + std::fabs(fv[14 - j]));
        if (j % 2 == 1) resg += kWg[j / 2] * sum;
    }

    const double reskh = resk * 0.5;
    double resasc = kWgk[7] * std::fabs(fc - reskh);
    for (int j = 0; j < 7; ++j)
        resasc += kWgk[j] * (std::fabs(fv[j] - reskh) + std::fabs(fv[14 - j] - reskh));

    resabs *= std::fabs(h);
    resasc *= std::fabs(h);

    double err = std::fabs((resk - resg) * h);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    const double eps = std::numeric_limits<double>::epsilon();
    const double tiny = std::numeric_limits<double>::min();
    if (resabs > tiny / (50.0 * eps)) err = std::max(err, 50.0 * eps * resabs);

    return Panel{a, b, resk * h, err};
}

// Adaptive refinement on a finite interval, seeded with an initial uniform
// partition so multi-scale integrands are sampled before the heap takes over.
// Panels too narrow to bisect keep their error on the books; if those alone
// exceed the target the integral is declared non-convergent rather than
// silently accepted.
template <class F>
IntegralEstimate adapt(F&& f, double a, double b, const QuadratureSpec& spec,
                       int initial_panels) {
    std::priority_queue<Panel> heap;
    double total = 0.0, total_err = 0.0, inert_err = 0.0;
    const int n0 = std::max(1, initial_panels);
    for (int k = 0; k < n0; ++k) {
        const double pa = a + (b - a) * k / n0;
        const double pb = a + (b - a) * (k + 1) / n0;
        Panel p = gk15(f, pa, pb);
        total += p.value;
        total_err += p.err;
        heap.push(p);
    }

    int panels = n0;
    auto target = [&]() { return std::max(spec.abs_tol, spec.rel_tol * std::fabs(total)); };
    while (total_err + inert_err > target()) {
        if (panels >= spec.max_subdivisions || heap.empty() || heap.top().err <= 0.0)
            throw NonConvergence("integrate: error " + std::to_string(total_err + inert_err) +
                                 " above target after " + std::to_string(panels) +
                                 " subdivisions");
        Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(worst.a < mid && mid < worst.b)) {
            inert_err += worst.err;
            total_err -= worst.err;
            continue;
        }
        Panel left = gk15(f, worst.a, mid);
        Panel right = gk15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.err + right.err - worst.err;
        heap.push(left);
        heap.push(right);
        ++panels;
    }
    return {total, total_err + inert_err};
}

}  // namespace quad_detail

template <class F>
IntegralEstimate integrate(F&& f, Interval domain, const QuadratureSpec& spec = {}) {
    domain.validate();
    spec.validate();

    const bool lo_inf = !std::isfinite(domain.lo);
    const bool hi_inf = !std::isfinite(domain.hi);

    if (!lo_inf && !hi_inf)
        return quad_detail::adapt(f, domain.lo, domain.hi, spec, 4);

    // In the rational substitutions below, nodes that round onto the mapped
    // endpoint (y infinite) contribute a zero-measure point; the integrand is
    // defined as 0 there rather than 0*inf.
    if (lo_inf && hi_inf) {
        // y = t/(1-t^2), t in (-1,1). Odd panel count keeps t=0 (y=0) on a
        // panel center so a peak near the origin is seen by the first sweep.
        auto g = [&](double t) {
            const double om = 1.0 - t * t;
            if (om <= 0.0) return 0.0;
            const double y = t / om;
            if (!std::isfinite(y)) return 0.0;
            return f(y) * (1.0 + t * t) / (om * om);
        };
        return quad_detail::adapt(g, -1.0, 1.0, spec, 9);
    }

    if (!lo_inf) {
        // y = lo + s*t/(1-t), t in [0,1), with s anchored to the endpoint
        // magnitude so tails probed far from the origin keep their natural
        // scale inside the unit parameter interval.
        const double a = domain.lo;
        const double s = std::max(1.0, std::fabs(a));
        auto g = [&](double t) {
            const double om = 1.0 - t;
            if (om <= 0.0) return 0.0;
            const double y = a + s * t / om;
            if (!std::isfinite(y)) return 0.0;
            return f(y) * s / (om * om);
        };
        return quad_detail::adapt(g, 0.0, 1.0, spec, 8);
    }

    // (-inf, hi]: reflect onto [0, inf).
    const double b = domain.hi;
    const double s = std::max(1.0, std::fabs(b));
    auto g = [&](double t) {
        const double om = 1.0 - t;
        if (om <= 0.0) return 0.0;
        const double y = b - s * t / om;
        if (!std::isfinite(y)) return 0.0;
        return f(y) * s / (om * om);
    };
    return quad_detail::adapt(g, 0.0, 1.0, spec, 8);
}

// Integrate over an ordered chain of breakpoints (each piece adapted
// independently). Used where the integrand has known structural knots.
template <class F>
IntegralEstimate integrate_piecewise(F&& f, const std::vector<double>& breaks,
                                     const QuadratureSpec& spec = {}) {
    IntegralEstimate acc;
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
        if (!(breaks[k] < breaks[k + 1])) continue;
        auto piece = integrate(f, Interval{breaks[k], breaks[k + 1]}, spec);
        acc.value += piece.value;
        acc.err_estimate += piece.err_estimate;
    }
    return acc;
}

// Shrink a (possibly semi-infinite) domain to a finite interval [a,b] such
// that the integral of `envelope` outside [a,b] stays below tail_tol. The
// envelope must be nonnegative and integrable on the domain.
template <class E>
Interval truncate_domain(E&& envelope, Interval domain, double tail_tol) {
    domain.validate();
    if (!(tail_tol > 0)) throw InvalidParameter("truncate_domain: tail_tol must be positive");
    if (domain.finite()) return domain;

    QuadratureSpec tail_spec;
    tail_spec.abs_tol = std::max(tail_tol * 1e-3, 1e-14);
    tail_spec.rel_tol = 1e-6;

    auto tail_above = [&](double cut) {
        return integrate(envelope, Interval{cut, std::numeric_limits<double>::infinity()},
                         tail_spec)
            .value;
    };
    auto tail_below = [&](double cut) {
        return integrate(envelope,
                         Interval{-std::numeric_limits<double>::infinity(), cut}, tail_spec)
            .value;
    };

    // Doubling search for a bracket, then bisection to a tight cut. Each
    // probe integrates the envelope tail, so a non-integrable envelope
    // surfaces as NonConvergence inside integrate().
    auto find_cut = [&](double start, bool upper) {
        double step = 1.0;
        double cut = start;
        for (int it = 0;; ++it) {
            if (it > 80)
                throw NonConvergence("truncate_domain: tail mass not below tolerance "
                                     "within iteration budget");
            const double probe = upper ? cut + step : cut - step;
            const double mass = upper ? tail_above(probe) : tail_below(probe);
            if (mass < tail_tol) {
                // Bracket [cut, probe]; bisect toward the smallest valid cut.
                double lo = cut, hi = probe;
                for (int b = 0; b < 60 && std::fabs(hi - lo) >
                                             1e-4 * (1.0 + std::fabs(hi));
                     ++b) {
                    const double mid = 0.5 * (lo + hi);
                    const double m = upper ? tail_above(mid) : tail_below(mid);
                    if (m < tail_tol)
                        hi = mid;
                    else
                        lo = mid;
                }
                return hi;
            }
            cut = probe;
            step *= 2.0;
        }
    };

    double lo = domain.lo, hi = domain.hi;
    if (!std::isfinite(hi)) hi = find_cut(std::isfinite(lo) ? lo : 0.0, true);
    if (!std::isfinite(lo)) lo = find_cut(hi, false);
    return Interval{lo, hi};
}

}  // namespace capax
