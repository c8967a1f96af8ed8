#pragma once

// Finitely discrete input distributions on [-A, A]: ordered mass points with
// strictly positive probabilities summing to one.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "capax/errors.hpp"

namespace capax {

struct MassPoint {
    double x = 0.0;
    double p = 0.0;
};

class DiscreteInput {
  public:
    DiscreteInput(std::vector<MassPoint> points, double peak)
        : points_(std::move(points)), peak_(peak) {
        validate();
    }

    // Sorts, merges points closer than gap_eps (probability-weighted
    // location), drops vanishing masses and renormalizes small drift.
    static DiscreteInput consolidated(std::vector<MassPoint> raw, double peak,
                                      double gap_eps, double sum_tol = 1e-9) {
        if (raw.empty()) throw InvalidParameter("DiscreteInput: no mass points");
        std::sort(raw.begin(), raw.end(),
                  [](const MassPoint& a, const MassPoint& b) { return a.x < b.x; });
        std::vector<MassPoint> merged;
        for (const auto& pt : raw) {
            if (pt.p <= 1e-12) continue;
            double x = std::clamp(pt.x, -peak, peak);
            if (!merged.empty() && x - merged.back().x <= gap_eps) {
                MassPoint& last = merged.back();
                const double w = last.p + pt.p;
                last.x = (last.x * last.p + x * pt.p) / w;
                last.p = w;
            } else {
                merged.push_back({x, pt.p});
            }
        }
        if (merged.empty()) throw InvalidParameter("DiscreteInput: all mass points vanish");
        double sum = 0.0;
        for (const auto& pt : merged) sum += pt.p;
        if (std::fabs(sum - 1.0) > sum_tol)
            throw InvalidParameter("DiscreteInput: probabilities sum to " +
                                   std::to_string(sum));
        for (auto& pt : merged) pt.p /= sum;
        return DiscreteInput(std::move(merged), peak);
    }

    const std::vector<MassPoint>& points() const { return points_; }
    double peak() const { return peak_; }
    std::size_t size() const { return points_.size(); }

  private:
    void validate() const {
        if (!(peak_ > 0)) throw InvalidParameter("DiscreteInput: peak must be positive");
        if (points_.empty()) throw InvalidParameter("DiscreteInput: no mass points");
        double sum = 0.0;
        double prev_x = -std::numeric_limits<double>::infinity();
        for (const auto& pt : points_) {
            if (!(pt.p > 0)) throw InvalidParameter("DiscreteInput: probabilities must be positive");
            if (std::fabs(pt.x) > peak_ * (1.0 + 1e-12) + 1e-15)
                throw InvalidParameter("DiscreteInput: location " + std::to_string(pt.x) +
                                       " outside [-A, A]");
            if (!(pt.x > prev_x))
                throw InvalidParameter("DiscreteInput: locations must be strictly increasing");
            prev_x = pt.x;
            sum += pt.p;
        }
        if (std::fabs(sum - 1.0) > 1e-12)
            throw InvalidParameter("DiscreteInput: probabilities sum to " +
                                   std::to_string(sum) + ", expected 1");
    }

    std::vector<MassPoint> points_;
    double peak_;
};

// Mixture (1-theta)*a + theta*b; coincident points are merged.
inline DiscreteInput mix(const DiscreteInput& a, const DiscreteInput& b, double theta) {
    if (!(theta >= 0.0 && theta <= 1.0))
        throw InvalidParameter("mix: theta must lie in [0,1]");
    if (a.peak() != b.peak()) throw InvalidParameter("mix: peak mismatch");
    if (theta == 0.0) return a;
    if (theta == 1.0) return b;
    std::vector<MassPoint> pts;
    pts.reserve(a.size() + b.size());
    for (const auto& pt : a.points()) pts.push_back({pt.x, (1.0 - theta) * pt.p});
    for (const auto& pt : b.points()) pts.push_back({pt.x, theta * pt.p});
    return DiscreteInput::consolidated(std::move(pts), a.peak(), 1e-13 * a.peak());
}

inline DiscreteInput mirrored(const DiscreteInput& f) {
    std::vector<MassPoint> pts;
    pts.reserve(f.size());
    for (auto it = f.points().rbegin(); it != f.points().rend(); ++it)
        pts.push_back({-it->x, it->p});
    return DiscreteInput(std::move(pts), f.peak());
}

// Seeded generator for property tests and solver restarts.
inline DiscreteInput random_input(std::mt19937_64& rng, double peak, int n_points,
                                  double min_gap = 0.0) {
    if (n_points < 1) throw InvalidParameter("random_input: need at least one point");
    if (min_gap <= 0.0) min_gap = 1e-3 * peak;
    std::uniform_real_distribution<double> ux(-peak, peak);
    std::exponential_distribution<double> ep(1.0);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        std::vector<double> xs(n_points);
        for (auto& x : xs) x = ux(rng);
        std::sort(xs.begin(), xs.end());
        bool ok = true;
        for (int i = 1; i < n_points; ++i)
            if (xs[i] - xs[i - 1] < min_gap) ok = false;
        if (!ok) continue;
        std::vector<MassPoint> pts(n_points);
        double sum = 0.0;
        for (int i = 0; i < n_points; ++i) {
            pts[i].x = xs[i];
            pts[i].p = ep(rng) + 1e-3;
            sum += pts[i].p;
        }
        for (auto& pt : pts) pt.p /= sum;
        return DiscreteInput::consolidated(std::move(pts), peak, min_gap * 0.5);
    }
    throw NonConvergence("random_input: could not place points with requested gap");
}

}  // namespace capax
