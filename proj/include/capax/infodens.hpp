#pragma once

// Densities and functionals for discrete inputs on a conditional density
// model: output density, marginal entropy/information densities, mutual
// information (computed through two independent routes and cross-checked),
// KL divergence and the weak derivative along mixture paths. All entropic
// quantities are in bits.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "capax/channel.hpp"
#include "capax/discrete_input.hpp"
#include "capax/errors.hpp"
#include "capax/quadrature.hpp"

namespace capax {

namespace infodens_detail {

// Densities below this are treated as underflowed; the log of the output
// density is then replaced by the exact log of the lower envelope, which
// dominates the true value and keeps log-weighted integrands finite.
inline constexpr double kDensityFloor = 1e-300;

inline double log2_output(double py, double y, const ChannelModel& ch) {
    return py >= kDensityFloor ? std::log2(py) : ch.envelope_log2_q(y);
}

// Integrate over the output domain split at structural locations (the
// conditioning input and the mass points). For additive channels these are
// where the integrand inherits kinks or modes from the noise density; panel
// boundaries aligned there keep the per-panel error estimate honest.
template <class F>
double integrate_output(F&& integrand, const ChannelModel& ch,
                        std::vector<double> knots, const QuadratureSpec& spec) {
    std::sort(knots.begin(), knots.end());
    std::vector<double> breaks{ch.output_domain.lo};
    for (double k : knots)
        if (k > ch.output_domain.lo && k < ch.output_domain.hi && k != breaks.back())
            breaks.push_back(k);
    breaks.push_back(ch.output_domain.hi);

    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
        acc += integrate(integrand, Interval{breaks[i], breaks[i + 1]}, spec).value;
    return acc;
}

inline std::vector<double> support_knots(const DiscreteInput& f) {
    std::vector<double> knots;
    knots.reserve(f.size());
    for (const auto& pt : f.points()) knots.push_back(pt.x);
    return knots;
}

}  // namespace infodens_detail

struct FunctionalValues {
    double mutual_info = 0.0;         // I(F), bits
    double output_entropy = 0.0;      // H(F), bits
    double conditional_entropy = 0.0; // D(F), bits
    double cross_check = 0.0;         // |I - (H - D)|, bits
};

inline double output_density(double y, const DiscreteInput& f, const ChannelModel& ch) {
    double acc = 0.0;
    for (const auto& pt : f.points()) acc += pt.p * ch.eval(y, pt.x);
    return acc;
}

// d(x) = -Int p(y|x) log2 p(y|x) dy; closed form preferred when available.
inline double conditional_entropy_density(double x, const ChannelModel& ch,
                                          const QuadratureSpec& spec = {}) {
    if (ch.closed_form_d) return (*ch.closed_form_d)(x);
    auto integrand = [&](double y) {
        const double w = ch.eval(y, x);
        if (w < infodens_detail::kDensityFloor) return 0.0;
        return -w * std::log2(w);
    };
    return infodens_detail::integrate_output(integrand, ch, {x}, spec);
}

// h(x;F) = -Int p(y|x) log2 p_Y(y;F) dy.
inline double marginal_entropy_density(double x, const DiscreteInput& f,
                                       const ChannelModel& ch,
                                       const QuadratureSpec& spec = {}) {
    auto integrand = [&](double y) {
        const double w = ch.eval(y, x);
        if (w <= 0.0) return 0.0;
        const double py = output_density(y, f, ch);
        return -w * infodens_detail::log2_output(py, y, ch);
    };
    auto knots = infodens_detail::support_knots(f);
    knots.push_back(x);
    return infodens_detail::integrate_output(integrand, ch, std::move(knots), spec);
}

// i(x;F) = h(x;F) - d(x).
inline double marginal_info_density(double x, const DiscreteInput& f,
                                    const ChannelModel& ch,
                                    const QuadratureSpec& spec = {}) {
    return marginal_entropy_density(x, f, ch, spec) -
           conditional_entropy_density(x, ch, spec);
}

// D_KL(p(.|x) || p_Y(.;F)), evaluated as a single integral; agrees with
// i(x;F) up to quadrature error and serves as its second route in tests.
inline double kl_divergence(double x, const DiscreteInput& f, const ChannelModel& ch,
                            const QuadratureSpec& spec = {}) {
    auto integrand = [&](double y) {
        const double w = ch.eval(y, x);
        if (w < infodens_detail::kDensityFloor) return 0.0;
        const double py = output_density(y, f, ch);
        return w * (std::log2(w) - infodens_detail::log2_output(py, y, ch));
    };
    auto knots = infodens_detail::support_knots(f);
    knots.push_back(x);
    return infodens_detail::integrate_output(integrand, ch, std::move(knots), spec);
}

// Mutual information through two routes: (a) sum_i p_i i(x_i;F), the
// canonical value, and (b) H(F) - D(F) with H integrated directly. The two
// must agree to 1e-7 bits or the evaluation is rejected.
inline FunctionalValues mutual_information(const DiscreteInput& f, const ChannelModel& ch,
                                           const QuadratureSpec& spec = {}) {
    FunctionalValues out;
    double sum_h = 0.0;
    double sum_d = 0.0;
    double sum_i = 0.0;
    for (const auto& pt : f.points()) {
        const double h = marginal_entropy_density(pt.x, f, ch, spec);
        const double d = conditional_entropy_density(pt.x, ch, spec);
        sum_h += pt.p * h;
        sum_d += pt.p * d;
        sum_i += pt.p * (h - d);
    }

    auto entropy_integrand = [&](double y) {
        const double py = output_density(y, f, ch);
        if (py < infodens_detail::kDensityFloor) return 0.0;
        return -py * std::log2(py);
    };
    const double big_h = infodens_detail::integrate_output(
        entropy_integrand, ch, infodens_detail::support_knots(f), spec);

    out.mutual_info = sum_i;
    out.output_entropy = big_h;
    out.conditional_entropy = sum_d;
    out.cross_check = std::fabs(sum_i - (big_h - sum_d));
    if (out.cross_check > 1e-7)
        throw CrossCheckFailure("mutual_information: routes disagree by " +
                                std::to_string(out.cross_check) + " bits");
    return out;
}

// Directional derivative of I at F1 toward F2 along the mixture path:
// sum_j p2_j i(x2_j; F1) - I(F1).
inline double weak_derivative(const DiscreteInput& f1, const DiscreteInput& f2,
                              const ChannelModel& ch, const QuadratureSpec& spec = {}) {
    if (f1.peak() != f2.peak()) throw InvalidParameter("weak_derivative: peak mismatch");
    double acc = 0.0;
    for (const auto& pt : f2.points())
        acc += pt.p * marginal_info_density(pt.x, f1, ch, spec);
    return acc - mutual_information(f1, ch, spec).mutual_info;
}

}  // namespace capax
