#pragma once

// Conditional output density models p(y|x) for peak-constrained scalar
// channels, together with the bounding envelopes q(y) <= p(y|x) <= Q(y) <= K
// that every density in the family respects uniformly over x in [-A, A].

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "capax/envelopes.hpp"
#include "capax/errors.hpp"
#include "capax/quadrature.hpp"

namespace capax {

inline constexpr double kLog2E = std::numbers::log2e;

struct ChannelModel {
    std::string name;
    double peak = 0.0;
    Interval output_domain;
    std::function<double(double, double)> eval;  // (y, x) -> density
    std::function<double(double)> envelope_q;
    std::function<double(double)> envelope_Q;
    double envelope_K = 0.0;
    // Exact log2 of the lower envelope, computable where q underflows.
    std::function<double(double)> envelope_log2_q;
    std::optional<std::function<double(double)>> closed_form_d;  // bits
    // Branch points of the envelopes / density support; used to seed grids.
    std::vector<double> envelope_knots;
    bool additive = false;
    bool analytic_extension = false;
};

struct GaussianAdditiveSpec {
    double sigma = 1.0;
};

struct GenericAdditiveSpec {
    std::function<double(double)> noise_density;
    Interval noise_domain;
    std::function<double(double)> envelope_q;
    std::function<double(double)> envelope_Q;
    double envelope_K = 0.0;
    std::optional<std::function<double(double)>> closed_form_d;  // bits
    bool analytic_extension = false;
    double normalization_tol = 1e-6;
};

struct RayleighSpec {
    double peak = 1.0;
    double c = 3.0;
    double gamma = 0.0;  // <= 0 selects 0.9 * gamma_bound(peak, c)

    static RayleighSpec defaulted(double peak) {
        RayleighSpec spec;
        spec.peak = peak;
        spec.gamma = 0.9 * gamma_bound(peak, spec.c);
        return spec;
    }

    double resolved_gamma() const {
        return gamma > 0.0 ? gamma : 0.9 * gamma_bound(peak, c);
    }
};

namespace channel_detail {

inline double normal_pdf(double u, double sigma) {
    const double z = u / sigma;
    return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

}  // namespace channel_detail

// Additive Gaussian noise channel Y = X + N, N ~ N(0, sigma^2). Envelopes are
// the pointwise extrema of the shifted density over x in [-A, A].
inline ChannelModel gaussian_channel(const GaussianAdditiveSpec& spec, double peak) {
    if (!(spec.sigma > 0)) throw InvalidParameter("gaussian_channel: sigma must be positive");
    if (!(peak > 0)) throw InvalidParameter("gaussian_channel: peak must be positive");

    const double sigma = spec.sigma;
    const double peak_value = channel_detail::normal_pdf(0.0, sigma);
    const double d_bits = 0.5 * std::log2(2.0 * std::numbers::pi * std::numbers::e *
                                          sigma * sigma);

    ChannelModel ch;
    ch.name = "gaussian";
    ch.peak = peak;
    ch.output_domain = Interval::whole_line();
    ch.eval = [sigma](double y, double x) { return channel_detail::normal_pdf(y - x, sigma); };
    ch.envelope_q = [sigma, peak](double y) {
        return channel_detail::normal_pdf(std::fabs(y) + peak, sigma);
    };
    ch.envelope_Q = [sigma, peak, peak_value](double y) {
        const double ay = std::fabs(y);
        return ay <= peak ? peak_value : channel_detail::normal_pdf(ay - peak, sigma);
    };
    ch.envelope_K = peak_value;
    ch.envelope_log2_q = [sigma, peak](double y) {
        const double u = (std::fabs(y) + peak) / sigma;
        return -0.5 * u * u * kLog2E -
               std::log2(sigma * std::sqrt(2.0 * std::numbers::pi));
    };
    ch.closed_form_d = [d_bits](double) { return d_bits; };
    ch.envelope_knots = {-peak, peak};
    ch.additive = true;
    ch.analytic_extension = true;
    return ch;
}

// Generic additive channel Y = X + N with a caller-supplied noise density and
// envelopes (already valid for the shifted family over x in [-A, A]).
inline ChannelModel additive_channel(const GenericAdditiveSpec& spec, double peak) {
    if (!(peak > 0)) throw InvalidParameter("additive_channel: peak must be positive");
    if (!spec.noise_density) throw InvalidParameter("additive_channel: missing noise density");
    if (!spec.envelope_q || !spec.envelope_Q || !(spec.envelope_K > 0))
        throw InvalidParameter("additive_channel: envelopes q, Q, K are required");
    spec.noise_domain.validate();

    const double mass = integrate(spec.noise_density, spec.noise_domain).value;
    if (std::fabs(mass - 1.0) > spec.normalization_tol)
        throw NormalizationFailure("additive_channel: noise density integrates to " +
                                   std::to_string(mass));

    const auto noise = spec.noise_density;

    ChannelModel ch;
    ch.name = "additive";
    ch.peak = peak;
    const double lo = std::isfinite(spec.noise_domain.lo) ? spec.noise_domain.lo - peak
                                                          : spec.noise_domain.lo;
    const double hi = std::isfinite(spec.noise_domain.hi) ? spec.noise_domain.hi + peak
                                                          : spec.noise_domain.hi;
    ch.output_domain = Interval{lo, hi};
    ch.eval = [noise](double y, double x) { return noise(y - x); };
    ch.envelope_q = spec.envelope_q;
    ch.envelope_Q = spec.envelope_Q;
    ch.envelope_K = spec.envelope_K;
    const auto q = spec.envelope_q;
    ch.envelope_log2_q = [q](double y) {
        const double v = q(y);
        return v >= 1e-300 ? std::log2(v) : -996.0;
    };
    ch.closed_form_d = spec.closed_form_d;
    if (std::isfinite(lo)) ch.envelope_knots.push_back(lo);
    if (std::isfinite(hi)) ch.envelope_knots.push_back(hi);
    ch.additive = true;
    ch.analytic_extension = spec.analytic_extension;
    return ch;
}

// Rayleigh fading channel: p(y|x) = s*exp(-y*s), s = 1/(1+x^2), y >= 0.
inline ChannelModel rayleigh_channel(const RayleighSpec& spec) {
    if (!(spec.peak > 0)) throw InvalidParameter("rayleigh_channel: peak must be positive");
    const double gamma = spec.resolved_gamma();
    RayleighEnvelopes env = rayleigh_envelopes(spec.peak, spec.c, gamma);

    ChannelModel ch;
    ch.name = "rayleigh";
    ch.peak = spec.peak;
    ch.output_domain = Interval::from(0.0);
    ch.eval = [](double y, double x) {
        if (y < 0.0) return 0.0;
        const double s = 1.0 / (1.0 + x * x);
        return s * std::exp(-y * s);
    };
    ch.envelope_q = env.q;
    ch.envelope_Q = env.Q;
    ch.envelope_K = 1.0;
    ch.envelope_log2_q = env.log2_q;
    ch.closed_form_d = [](double x) { return std::log2(1.0 + x * x) + kLog2E; };
    ch.envelope_knots = {env.y2, env.y1};
    ch.additive = false;
    ch.analytic_extension = true;
    return ch;
}

}  // namespace capax
