#pragma once

// Channel fixtures shared across test suites.

#include <cmath>

#include "capax/channel.hpp"

namespace test_support {

// Uniform noise on [-1/2, 1/2]. The lower envelope is identically zero once
// the peak exceeds the noise half-width, so only the additive structure and
// the upper envelope are exercised.
inline capax::ChannelModel uniform_additive(double peak) {
    capax::GenericAdditiveSpec spec;
    spec.noise_density = [](double u) { return (u >= -0.5 && u <= 0.5) ? 1.0 : 0.0; };
    spec.noise_domain = capax::Interval{-0.5, 0.5};
    spec.envelope_q = [peak](double y) {
        return (std::fabs(y) <= 0.5 - peak) ? 1.0 : 0.0;
    };
    spec.envelope_Q = [peak](double y) {
        return (std::fabs(y) <= 0.5 + peak) ? 1.0 : 0.0;
    };
    spec.envelope_K = 1.0;
    return capax::additive_channel(spec, peak);
}

// Laplace noise, density exp(-|u|)/2.
inline capax::ChannelModel laplace_additive(double peak) {
    capax::GenericAdditiveSpec spec;
    spec.noise_density = [](double u) { return 0.5 * std::exp(-std::fabs(u)); };
    spec.noise_domain = capax::Interval::whole_line();
    spec.envelope_q = [peak](double y) {
        return 0.5 * std::exp(-(std::fabs(y) + peak));
    };
    spec.envelope_Q = [peak](double y) {
        const double ay = std::fabs(y);
        return ay <= peak ? 0.5 : 0.5 * std::exp(-(ay - peak));
    };
    spec.envelope_K = 0.5;
    return capax::additive_channel(spec, peak);
}

// Zero-capacity control: the output density does not depend on the input.
inline capax::ChannelModel degenerate_exponential(double peak) {
    capax::ChannelModel ch;
    ch.name = "degenerate";
    ch.peak = peak;
    ch.output_domain = capax::Interval::from(0.0);
    ch.eval = [](double y, double) { return y >= 0.0 ? std::exp(-y) : 0.0; };
    ch.envelope_q = [](double y) { return y >= 0.0 ? std::exp(-y) : 0.0; };
    ch.envelope_Q = [](double y) { return y >= 0.0 ? std::exp(-y) : 0.0; };
    ch.envelope_K = 1.0;
    ch.envelope_log2_q = [](double y) { return -(y >= 0.0 ? y : 0.0) * capax::kLog2E; };
    ch.envelope_knots = {1.0};
    ch.additive = false;
    ch.analytic_extension = true;
    return ch;
}

}  // namespace test_support
