#pragma once

// Numeric verification of the structural hypotheses a channel model must
// satisfy: the envelope sandwich 0 <= q(y) <= p(y|x) <= Q(y) <= K, the
// integrability of Q*log2(q) over a tail-truncated domain, decay of the
// log-weighted integral tails uniformly over the input range, non-constant
// KL divergence across inputs, and d(x) constancy for additive models.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "capax/channel.hpp"
#include "capax/discrete_input.hpp"
#include "capax/envelopes.hpp"
#include "capax/errors.hpp"
#include "capax/infodens.hpp"
#include "capax/quadrature.hpp"

namespace capax {

struct CheckResult {
    std::string name;
    bool passed = false;
    // Worst-case location: (x, y) for grid checks, the (x1, x2) pair for the
    // KL check. Margin is the worst slack (negative when violated).
    double witness_x = 0.0;
    double witness_y = 0.0;
    double margin = 0.0;
};

struct EnvelopeReport {
    std::vector<CheckResult> checks;
    bool overall = false;

    void finalize() {
        overall = !checks.empty();
        for (const auto& c : checks) overall = overall && c.passed;
    }
};

namespace conditions_detail {

inline std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
    return v;
}

// y-grid over the truncated output domain. When the truncation bound is far
// beyond the envelope branch points (power-law tails), the head is sampled
// uniformly and the tail geometrically so both envelope branches are hit.
inline std::vector<double> output_grid(const ChannelModel& ch, int n,
                                       const QuadratureSpec& spec) {
    Interval dom = truncate_domain(ch.envelope_Q, ch.output_domain, spec.tail_tol);
    double head_hi = dom.hi;
    double scale = std::max(1.0, std::fabs(dom.lo));
    for (double k : ch.envelope_knots) scale = std::max(scale, std::fabs(k));
    if (dom.hi > 50.0 * scale && dom.lo >= 0.0) {
        head_hi = 4.0 * scale;
        const int n_head = (n * 4) / 5;
        std::vector<double> grid = linspace(dom.lo, head_hi, n_head);
        const int n_tail = n - n_head;
        const double ratio = std::pow(dom.hi / head_hi, 1.0 / n_tail);
        double y = head_hi;
        for (int i = 0; i < n_tail; ++i) {
            y *= ratio;
            grid.push_back(std::min(y, dom.hi));
        }
        return grid;
    }
    return linspace(dom.lo, dom.hi, n);
}

}  // namespace conditions_detail

// Pointwise check of the four sandwich inequalities on an x-by-y grid.
// Comparisons are exact: the envelopes are required to hold with zero
// tolerance wherever they are evaluated.
inline EnvelopeReport verify_envelope(const ChannelModel& ch, int x_grid_size,
                                      int y_grid_size, const QuadratureSpec& spec = {}) {
    if (x_grid_size < 100 || y_grid_size < 100)
        throw InvalidParameter("verify_envelope: grids must have at least 100 points");

    const auto xs = conditions_detail::linspace(-ch.peak, ch.peak, x_grid_size);
    const auto ys = conditions_detail::output_grid(ch, y_grid_size, spec);

    CheckResult q_nonneg{"q_nonnegative", true, 0, 0, std::numeric_limits<double>::infinity()};
    CheckResult q_below{"q_below_density", true, 0, 0, std::numeric_limits<double>::infinity()};
    CheckResult below_Q{"density_below_Q", true, 0, 0, std::numeric_limits<double>::infinity()};
    CheckResult Q_below_K{"Q_below_K", true, 0, 0, std::numeric_limits<double>::infinity()};

    auto track = [](CheckResult& c, double margin, double x, double y) {
        if (margin < c.margin) {
            c.margin = margin;
            c.witness_x = x;
            c.witness_y = y;
        }
    };

    for (double y : ys) {
        const double q = ch.envelope_q(y);
        const double bigq = ch.envelope_Q(y);
        track(q_nonneg, q, 0.0, y);
        track(Q_below_K, ch.envelope_K - bigq, 0.0, y);
        for (double x : xs) {
            const double p = ch.eval(y, x);
            track(q_below, p - q, x, y);
            track(below_Q, bigq - p, x, y);
        }
    }

    for (CheckResult* c : {&q_nonneg, &q_below, &below_Q, &Q_below_K})
        c->passed = c->margin >= 0.0;

    EnvelopeReport report;
    report.checks = {q_nonneg, q_below, below_Q, Q_below_K};
    report.finalize();
    return report;
}

struct IntegrabilityResult {
    double value = 0.0;
    bool passed = false;
};

// Integral of |Q(y) * log2 q(y)| over the domain truncated where the
// integrable envelope Q drops below the tail threshold. A divergent Q makes
// the truncation itself fail, which is reported as not passed.
inline IntegrabilityResult verify_q_log_q_integrable(const ChannelModel& ch,
                                                     const QuadratureSpec& spec = {}) {
    IntegrabilityResult out;
    Interval dom;
    try {
        dom = truncate_domain(ch.envelope_Q, ch.output_domain, spec.tail_tol);
    } catch (const NonConvergence&) {
        out.passed = false;
        return out;
    }

    auto integrand = [&](double y) {
        const double bigq = ch.envelope_Q(y);
        if (bigq <= 0.0) return 0.0;
        return std::fabs(bigq * ch.envelope_log2_q(y));
    };

    // Piecewise ladder: envelope knots first, then decades out to the
    // truncation bound so the power-law tail is resolved.
    std::vector<double> breaks{dom.lo};
    for (double k : ch.envelope_knots)
        if (k > dom.lo && k < dom.hi) breaks.push_back(k);
    double step = std::max(1.0, breaks.back() - dom.lo);
    double y = breaks.back();
    while (y < dom.hi) {
        y = std::min(y + step, dom.hi);
        breaks.push_back(y);
        step *= 4.0;
    }
    std::sort(breaks.begin(), breaks.end());

    QuadratureSpec piece_spec = spec;
    piece_spec.abs_tol = std::max(spec.abs_tol, 1e-9);
    piece_spec.rel_tol = std::max(spec.rel_tol, 1e-8);
    try {
        out.value = integrate_piecewise(integrand, breaks, piece_spec).value;
        out.passed = std::isfinite(out.value);
    } catch (const NonConvergence&) {
        out.passed = false;
    }
    return out;
}

struct TailDecayResult {
    double cutoff = 0.0;   // smallest cutoff at which all tails are below tol
    double worst_tail = 0.0;
    bool passed = false;
};

// Surrogate for uniform convergence of the two log-weighted integrals: the
// tail mass of |p(y|x) log2 p(y|x)| and |p(y|x) log2 q(y)| beyond a growing
// cutoff must fall below tolerance uniformly over an x-grid.
inline TailDecayResult verify_log_tail_decay(const ChannelModel& ch, int x_grid_size = 9,
                                             double tol = 1e-8,
                                             const QuadratureSpec& spec = {}) {
    TailDecayResult out;
    const auto xs = conditions_detail::linspace(-ch.peak, ch.peak, std::max(3, x_grid_size));
    Interval dom = truncate_domain(ch.envelope_Q, ch.output_domain, spec.tail_tol);

    QuadratureSpec tail_spec = spec;
    tail_spec.abs_tol = std::max(spec.abs_tol, tol * 1e-3);

    double scale = 1.0;
    for (double k : ch.envelope_knots) scale = std::max(scale, std::fabs(k));

    for (int k = 0; k < 40; ++k) {
        const double cut = scale * std::pow(2.0, k);
        if (cut >= dom.hi && (!std::isfinite(ch.output_domain.lo) ? -cut <= dom.lo : true)) {
            // Tail already outside the integrable-envelope truncation.
            out.cutoff = cut;
            out.worst_tail = 0.0;
            out.passed = true;
            return out;
        }
        double worst = 0.0;
        for (double x : xs) {
            auto integrand = [&](double y) {
                const double w = ch.eval(y, x);
                if (w < 1e-300) return 0.0;
                return std::fabs(w * std::log2(w)) +
                       std::fabs(w * ch.envelope_log2_q(y));
            };
            double tail = 0.0;
            if (cut < dom.hi)
                tail += integrate(integrand, Interval{cut, dom.hi}, tail_spec).value;
            if (!std::isfinite(ch.output_domain.lo) && -cut > dom.lo)
                tail += integrate(integrand, Interval{dom.lo, -cut}, tail_spec).value;
            worst = std::max(worst, tail);
        }
        if (worst < tol) {
            out.cutoff = cut;
            out.worst_tail = worst;
            out.passed = true;
            return out;
        }
        out.worst_tail = worst;
    }
    out.passed = false;
    return out;
}

struct SpreadResult {
    double spread = 0.0;
    bool passed = false;
};

// d(x) must be constant in x for additive models.
inline SpreadResult verify_additive_d_constant(const ChannelModel& ch, int x_grid_size,
                                               const QuadratureSpec& spec = {}) {
    const auto xs = conditions_detail::linspace(-ch.peak, ch.peak, std::max(3, x_grid_size));
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double x : xs) {
        const double d = conditional_entropy_density(x, ch, spec);
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    SpreadResult out;
    out.spread = hi - lo;
    out.passed = out.spread < 1e-6;
    return out;
}

struct NonconstantKlResult {
    bool passed = false;
    double witness_x1 = 0.0;
    double witness_x2 = 0.0;
    double difference = 0.0;  // bits
};

// Existence of two inputs whose conditional densities sit at different KL
// divergence from the output mixture.
inline NonconstantKlResult verify_nonconstant_kl(const ChannelModel& ch,
                                                 const DiscreteInput& f,
                                                 int x_grid_size = 33,
                                                 const QuadratureSpec& spec = {}) {
    const auto xs = conditions_detail::linspace(-ch.peak, ch.peak, std::max(3, x_grid_size));
    double lo = std::numeric_limits<double>::infinity(), lo_x = 0.0;
    double hi = -std::numeric_limits<double>::infinity(), hi_x = 0.0;
    for (double x : xs) {
        const double kl = kl_divergence(x, f, ch, spec);
        if (kl < lo) {
            lo = kl;
            lo_x = x;
        }
        if (kl > hi) {
            hi = kl;
            hi_x = x;
        }
    }
    NonconstantKlResult out;
    out.difference = hi - lo;
    out.witness_x1 = lo_x;
    out.witness_x2 = hi_x;
    out.passed = out.difference > 1e-6;
    return out;
}

// Aggregate condition report for a channel: declared analyticity, the
// envelope sandwich, Q*log2(q) integrability, tail decay, non-constant KL
// (probed with a uniform three-point input) and, for additive models, the
// d(x) constancy check.
inline EnvelopeReport check_conditions(const ChannelModel& ch, int x_grid_size = 100,
                                       int y_grid_size = 10000,
                                       const QuadratureSpec& spec = {}) {
    EnvelopeReport report = verify_envelope(ch, x_grid_size, y_grid_size, spec);

    report.checks.insert(report.checks.begin(),
                         CheckResult{"analytic_extension_declared", ch.analytic_extension,
                                     0.0, 0.0, ch.analytic_extension ? 1.0 : -1.0});

    const auto integ = verify_q_log_q_integrable(ch, spec);
    report.checks.push_back(
        CheckResult{"Q_log_q_integrable", integ.passed, 0.0, 0.0, integ.value});

    const auto tails = verify_log_tail_decay(ch, 9, 1e-8, spec);
    report.checks.push_back(
        CheckResult{"log_tail_decay", tails.passed, 0.0, tails.cutoff, tails.worst_tail});

    const double a = ch.peak;
    DiscreteInput probe({{-a, 1.0 / 3}, {0.0, 1.0 / 3}, {a, 1.0 / 3}}, a);
    const auto kl = verify_nonconstant_kl(ch, probe, 33, spec);
    report.checks.push_back(CheckResult{"kl_nonconstant", kl.passed, kl.witness_x1,
                                        kl.witness_x2, kl.difference});

    if (ch.additive) {
        const auto d = verify_additive_d_constant(ch, 101, spec);
        report.checks.push_back(
            CheckResult{"additive_d_constant", d.passed, 0.0, 0.0, d.spread});
    }

    report.finalize();
    return report;
}

}  // namespace capax
