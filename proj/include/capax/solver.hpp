#pragma once

// Capacity solver: block-coordinate ascent (probabilities on the simplex,
// locations in [-A, A]) for a fixed support size, a grid-based Kuhn-Tucker
// certificate, and an outer loop that grows the support until the
// certificate passes.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "capax/channel.hpp"
#include "capax/discrete_input.hpp"
#include "capax/errors.hpp"
#include "capax/infodens.hpp"
#include "capax/quadrature.hpp"

namespace capax {

struct SolveOptions {
    double kt_tol = 1e-5;     // bits; inequality slack and support residual
    int grid_size = 2001;     // certificate grid over [-A, A]
    int n_max = 16;           // largest support size tried
    double merge_eps = 0.0;   // point-merge distance; 0 = auto (1e-6 * A)
    int inner_iters = 600;
    double inner_tol = 1e-10;  // bits
    std::uint64_t seed = 1;
    int restarts = 4;          // random restarts per support size (N >= 2)
    QuadratureSpec quad{};

    void validate() const {
        if (!(kt_tol > 0) || !(inner_tol > 0))
            throw InvalidParameter("SolveOptions: tolerances must be positive");
        if (grid_size < 3) throw InvalidParameter("SolveOptions: grid_size must be >= 3");
        if (n_max < 1 || inner_iters < 1 || restarts < 0)
            throw InvalidParameter("SolveOptions: iteration counts must be positive");
        if (merge_eps < 0) throw InvalidParameter("SolveOptions: merge_eps must be >= 0");
    }

    double effective_merge_eps(double peak) const {
        return merge_eps > 0 ? merge_eps : 1e-6 * peak;
    }
};

struct KTCertificate {
    std::vector<double> grid;
    std::vector<double> residuals;          // i(x;F) - I(F) on the grid, bits
    std::vector<double> support_residuals;  // at the mass points, bits
    double max_violation = 0.0;
    bool passed = false;
    double kt_tol = 0.0;
    double info_bits = 0.0;  // I(F) at evaluation time
};

struct TraceEntry {
    int n = 0;
    double best_info = 0.0;
    double max_violation = 0.0;
};

struct SolveResult {
    double capacity_bits = 0.0;
    DiscreteInput input;
    KTCertificate certificate;
    std::vector<TraceEntry> trace;
    bool certified = false;
};

namespace solver_detail {

inline std::vector<double> project_simplex(std::vector<double> v) {
    std::vector<double> u = v;
    std::sort(u.begin(), u.end(), std::greater<double>());
    double css = 0.0, tau = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        css += u[i];
        const double t = (css - 1.0) / static_cast<double>(i + 1);
        if (u[i] - t > 0.0) tau = t;
    }
    for (auto& x : v) x = std::max(x - tau, 0.0);
    return v;
}

inline DiscreteInput make_input(const std::vector<double>& xs, const std::vector<double>& ps,
                                double peak) {
    std::vector<MassPoint> pts(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) pts[i] = {xs[i], ps[i]};
    return DiscreteInput::consolidated(std::move(pts), peak, 1e-14 * peak, 1e-6);
}

// Strict lexicographic order on (locations, probabilities).
inline bool support_less(const DiscreteInput& a, const DiscreteInput& b) {
    const auto& pa = a.points();
    const auto& pb = b.points();
    for (std::size_t i = 0; i < std::min(pa.size(), pb.size()); ++i) {
        if (pa[i].x != pb[i].x) return pa[i].x < pb[i].x;
        if (pa[i].p != pb[i].p) return pa[i].p < pb[i].p;
    }
    return pa.size() < pb.size();
}

inline DiscreteInput equispaced_input(double peak, int n) {
    std::vector<MassPoint> pts;
    if (n == 1) {
        pts.push_back({0.0, 1.0});
    } else {
        for (int k = 0; k < n; ++k) {
            const double x = -peak + 2.0 * peak * k / (n - 1);
            pts.push_back({x, 0.0});
        }
        for (auto& pt : pts) pt.p = 1.0 / n;
    }
    return DiscreteInput::consolidated(std::move(pts), peak, 1e-14 * peak);
}

}  // namespace solver_detail

// Ascent on I for a fixed number of mass points. Alternates a projected
// gradient step on the probabilities (the gradient of I in p is the vector
// of marginal information densities, up to a constant that the simplex
// projection removes) with a clipped gradient step on the locations. Steps
// are only accepted when they increase I, so iterates are monotone.
inline DiscreteInput optimize_fixed_n(const ChannelModel& ch, int n, const DiscreteInput& init,
                                      const SolveOptions& opts) {
    opts.validate();
    if (static_cast<int>(init.size()) > n)
        throw InvalidParameter("optimize_fixed_n: init has more than n points");

    const double peak = ch.peak;
    std::vector<double> xs, ps;
    for (const auto& pt : init.points()) {
        xs.push_back(pt.x);
        ps.push_back(pt.p);
    }

    auto eval_info = [&](const std::vector<double>& x, const std::vector<double>& p) {
        return mutual_information(solver_detail::make_input(x, p, peak), ch, opts.quad)
            .mutual_info;
    };

    double info_cur = eval_info(xs, ps);
    double step_p = 0.25;
    double step_x = 0.05 * peak;
    const double fd_delta = std::max(1e-5 * peak, 1e-9);
    int stall = 0;

    for (int iter = 0; iter < opts.inner_iters; ++iter) {
        double improvement = 0.0;

        // Probability update.
        {
            DiscreteInput f = solver_detail::make_input(xs, ps, peak);
            std::vector<double> grad(xs.size());
            double mean = 0.0;
            for (std::size_t j = 0; j < xs.size(); ++j) {
                grad[j] = marginal_info_density(xs[j], f, ch, opts.quad);
                mean += grad[j];
            }
            mean /= grad.size();
            for (auto& g : grad) g -= mean;

            for (int attempt = 0; attempt < 8; ++attempt) {
                std::vector<double> trial = ps;
                for (std::size_t j = 0; j < trial.size(); ++j)
                    trial[j] += step_p * grad[j];
                trial = solver_detail::project_simplex(std::move(trial));
                const double info_new = eval_info(xs, trial);
                if (info_new > info_cur) {
                    improvement += info_new - info_cur;
                    info_cur = info_new;
                    ps = std::move(trial);
                    step_p = std::min(step_p * 1.8, 64.0);
                    break;
                }
                step_p *= 0.35;
                if (step_p < 1e-14) break;
            }
        }

        // Location update.
        {
            DiscreteInput f = solver_detail::make_input(xs, ps, peak);
            std::vector<double> grad(xs.size());
            for (std::size_t j = 0; j < xs.size(); ++j) {
                const double up = std::min(xs[j] + fd_delta, peak);
                const double dn = std::max(xs[j] - fd_delta, -peak);
                const double di = up > dn
                                      ? (marginal_info_density(up, f, ch, opts.quad) -
                                         marginal_info_density(dn, f, ch, opts.quad)) /
                                            (up - dn)
                                      : 0.0;
                grad[j] = ps[j] * di;
            }

            for (int attempt = 0; attempt < 8; ++attempt) {
                std::vector<double> trial = xs;
                for (std::size_t j = 0; j < trial.size(); ++j)
                    trial[j] = std::clamp(trial[j] + step_x * grad[j], -peak, peak);
                const double info_new = eval_info(trial, ps);
                if (info_new > info_cur) {
                    improvement += info_new - info_cur;
                    info_cur = info_new;
                    xs = std::move(trial);
                    step_x = std::min(step_x * 1.8, 8.0 * peak);
                    break;
                }
                step_x *= 0.35;
                if (step_x < 1e-15 * peak) break;
            }
        }

        if (improvement < opts.inner_tol) {
            if (++stall >= 2) break;
        } else {
            stall = 0;
        }
    }

    std::vector<MassPoint> pts(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) pts[i] = {xs[i], ps[i]};
    return DiscreteInput::consolidated(std::move(pts), peak,
                                       opts.effective_merge_eps(peak), 1e-6);
}

// Kuhn-Tucker certificate: i(x;F) - I(F) <= kt_tol on a uniform grid over
// [-A, A], with |i(x_i;F) - I(F)| <= kt_tol at every mass point.
inline KTCertificate kt_check(const ChannelModel& ch, const DiscreteInput& f,
                              const SolveOptions& opts) {
    opts.validate();
    KTCertificate cert;
    cert.kt_tol = opts.kt_tol;
    cert.info_bits = mutual_information(f, ch, opts.quad).mutual_info;

    cert.grid.resize(opts.grid_size);
    cert.residuals.resize(opts.grid_size);
    double worst_grid = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < opts.grid_size; ++k) {
        const double x = -ch.peak + 2.0 * ch.peak * k / (opts.grid_size - 1);
        cert.grid[k] = x;
        cert.residuals[k] = marginal_info_density(x, f, ch, opts.quad) - cert.info_bits;
        worst_grid = std::max(worst_grid, cert.residuals[k]);
    }

    double worst_support = 0.0;
    for (const auto& pt : f.points()) {
        const double r = marginal_info_density(pt.x, f, ch, opts.quad) - cert.info_bits;
        cert.support_residuals.push_back(r);
        worst_support = std::max(worst_support, std::fabs(r));
    }

    cert.max_violation = std::max(worst_grid, worst_support);
    cert.passed = worst_grid <= opts.kt_tol && worst_support <= opts.kt_tol;
    return cert;
}

// Outer loop over the support size: deterministic equispaced start, the
// previous winner augmented with a point at its worst residual, and seeded
// random restarts. The first support size whose certificate passes wins; on
// exhaustion the best uncertified result is returned flagged as such.
inline SolveResult solve_capacity(const ChannelModel& ch, const SolveOptions& opts) {
    opts.validate();
    const double peak = ch.peak;

    std::optional<DiscreteInput> prev;
    double prev_worst_x = 0.0;

    std::optional<SolveResult> best;
    std::vector<TraceEntry> trace;

    for (int n = 1; n <= opts.n_max; ++n) {
        std::vector<DiscreteInput> inits;
        inits.push_back(solver_detail::equispaced_input(peak, n));

        if (prev && n >= 2) {
            std::vector<MassPoint> pts = prev->points();
            for (auto& pt : pts) pt.p *= 1.0 - 1.0 / n;
            pts.push_back({prev_worst_x, 1.0 / n});
            try {
                inits.push_back(DiscreteInput::consolidated(
                    std::move(pts), peak, 0.5 * opts.effective_merge_eps(peak)));
            } catch (const InvalidParameter&) {
                // Augmented start degenerate; skip it.
            }
        }

        if (n >= 2) {
            for (int r = 0; r < opts.restarts; ++r) {
                std::mt19937_64 rng(opts.seed * 0x9e3779b97f4a7c15ull + 1000003ull * n + r);
                inits.push_back(random_input(rng, peak, n));
            }
        }

        std::optional<DiscreteInput> winner;
        double winner_info = -std::numeric_limits<double>::infinity();
        for (const auto& start : inits) {
            DiscreteInput cand = optimize_fixed_n(ch, n, start, opts);
            const double info = mutual_information(cand, ch, opts.quad).mutual_info;
            const bool better =
                !winner || info > winner_info + opts.inner_tol ||
                (std::fabs(info - winner_info) <= opts.inner_tol &&
                 solver_detail::support_less(cand, *winner));
            if (better) {
                winner = std::move(cand);
                winner_info = info;
            }
        }

        KTCertificate cert = kt_check(ch, *winner, opts);
        trace.push_back({n, winner_info, cert.max_violation});

        if (cert.passed) return SolveResult{winner_info, *winner, cert, trace, true};

        if (!best || winner_info > best->capacity_bits)
            best = SolveResult{winner_info, *winner, cert, trace, false};

        prev = *winner;
        // Seed the next support size at the strongest certificate violation.
        double worst = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < cert.grid.size(); ++k) {
            if (cert.residuals[k] > worst) {
                worst = cert.residuals[k];
                prev_worst_x = cert.grid[k];
            }
        }
    }

    best->trace = trace;
    best->certified = false;
    return *best;
}

// Mutual-optimality probe for two certified inputs: each one's marginal
// information density must sit at the capacity value on the other's support.
inline bool cross_optimum_check(const ChannelModel& ch, const DiscreteInput& fa,
                                const DiscreteInput& fb, double kt_tol = 1e-5,
                                const QuadratureSpec& quad = {}) {
    const double ia = mutual_information(fa, ch, quad).mutual_info;
    const double ib = mutual_information(fb, ch, quad).mutual_info;
    for (const auto& pt : fb.points())
        if (std::fabs(marginal_info_density(pt.x, fa, ch, quad) - ia) > kt_tol) return false;
    for (const auto& pt : fa.points())
        if (std::fabs(marginal_info_density(pt.x, fb, ch, quad) - ib) > kt_tol) return false;
    return true;
}

}  // namespace capax
