#pragma once

// Bounding-envelope construction for the Rayleigh fading conditional density
// s*exp(-y*s), s = 1/(1+x^2), |x| <= A. The upper envelope is flat up to
// y1 = c*(1+A^2) and a power law y^-(1+gamma) beyond; the lower envelope
// follows the density conditioned on the peak input up to the crossing
// y2 = (1+A^2)*ln(1+A^2)/A^2 and exp(-y) afterwards.

#include <cmath>
#include <functional>
#include <string>

#include "capax/errors.hpp"

namespace capax {

// Exclusive upper bound for the admissible power-law exponent:
// min{1, (c - ln c) / ln[c*(1+A^2)]}.
inline double gamma_bound(double peak, double c) {
    if (!(peak > 0)) throw InvalidParameter("gamma_bound: peak must be positive");
    if (!(c > 2)) throw InvalidParameter("gamma_bound: requires c > 2");
    const double ratio = (c - std::log(c)) / std::log(c * (1.0 + peak * peak));
    return std::min(1.0, ratio);
}

struct RayleighEnvelopes {
    std::function<double(double)> q;       // lower envelope
    std::function<double(double)> Q;       // upper envelope
    std::function<double(double)> log2_q;  // exact log2 of q (no underflow)
    double y1 = 0.0;                       // upper-envelope branch point c*(1+A^2)
    double y2 = 0.0;                       // lower-envelope crossing
    double c = 0.0;
    double gamma = 0.0;
};

inline RayleighEnvelopes rayleigh_envelopes(double peak, double c, double gamma) {
    if (!(peak > 0)) throw InvalidParameter("rayleigh_envelopes: peak must be positive");
    if (!(c > 2)) throw InvalidParameter("rayleigh_envelopes: requires c > 2");
    const double bound = gamma_bound(peak, c);
    if (!(gamma > 0 && gamma < bound))
        throw InvalidParameter("rayleigh_envelopes: gamma " + std::to_string(gamma) +
                               " outside (0, " + std::to_string(bound) + ")");

    const double a2 = peak * peak;
    const double s_min = 1.0 / (1.0 + a2);
    const double y1 = c * (1.0 + a2);
    const double y2 = (1.0 + a2) * std::log(1.0 + a2) / a2;
    const double log2e = 1.4426950408889634;

    RayleighEnvelopes env;
    env.y1 = y1;
    env.y2 = y2;
    env.c = c;
    env.gamma = gamma;
    env.Q = [y1, gamma](double y) {
        if (y < 0.0) return 0.0;
        return y <= y1 ? 1.0 : std::pow(y, -(1.0 + gamma));
    };
    env.q = [y2, s_min](double y) {
        if (y < 0.0) return 0.0;
        return y <= y2 ? s_min * std::exp(-y * s_min) : std::exp(-y);
    };
    env.log2_q = [y2, s_min, log2e](double y) {
        if (y < 0.0) y = 0.0;
        return y <= y2 ? std::log2(s_min) - y * s_min * log2e : -y * log2e;
    };
    return env;
}

}  // namespace capax
