#include <catch2/catch.hpp>

#include <cmath>
#include <random>

#include "capax/channel.hpp"
#include "capax/infodens.hpp"
#include "oracle.hpp"
#include "support.hpp"

using namespace capax;

namespace {

double quadrature_entropy(const ChannelModel& ch, double x) {
    auto integrand = [&](double y) {
        const double w = ch.eval(y, x);
        if (w < 1e-300) return 0.0;
        return -w * std::log2(w);
    };
    return integrate(integrand, ch.output_domain).value;
}

}  // namespace

TEST_CASE("gaussian channel closed forms") {
    auto ch = gaussian_channel({1.0}, 1.0);

    CHECK(ch.eval(0.0, 0.0) == Approx(1.0 / std::sqrt(2.0 * M_PI)).epsilon(1e-12));
    CHECK((*ch.closed_form_d)(0.3) == Approx(2.0470955851806409).epsilon(1e-12));
    CHECK(ch.envelope_q(0.0) == Approx(std::exp(-0.5) / std::sqrt(2.0 * M_PI)).epsilon(1e-12));
    CHECK(ch.envelope_Q(0.5) == ch.envelope_K);
    CHECK(ch.envelope_Q(3.0) == Approx(oracle::normal_pdf(3.0, 1.0, 1.0)).epsilon(1e-12));

    CHECK_THROWS_AS(gaussian_channel({0.0}, 1.0), InvalidParameter);
    CHECK_THROWS_AS(gaussian_channel({1.0}, -1.0), InvalidParameter);
}

TEST_CASE("rayleigh channel closed forms") {
    auto ch = rayleigh_channel(RayleighSpec::defaulted(1.0));

    CHECK(ch.eval(0.0, 0.0) == 1.0);
    CHECK((*ch.closed_form_d)(0.0) == Approx(kLog2E).epsilon(1e-12));
    CHECK((*ch.closed_form_d)(1.0) == Approx(1.0 + kLog2E).epsilon(1e-12));

    RayleighSpec bad;
    bad.peak = 1.0;
    bad.c = 1.5;  // needs c > 2
    CHECK_THROWS_AS(rayleigh_channel(bad), InvalidParameter);
    RayleighSpec bad_gamma;
    bad_gamma.peak = 10.0;
    bad_gamma.gamma = 0.99;  // above gamma_bound(10, 3) ~ 0.333
    CHECK_THROWS_AS(rayleigh_channel(bad_gamma), InvalidParameter);
}

TEST_CASE("additive channel construction and validation") {
    auto uniform = test_support::uniform_additive(1.0);
    CHECK(uniform.eval(0.2, 0.0) == 1.0);
    CHECK(uniform.eval(0.7, 0.5) == 1.0);
    CHECK(uniform.eval(0.7, 0.0) == 0.0);

    GenericAdditiveSpec bad;
    bad.noise_density = [](double) { return 2.0; };  // integrates to 2 over [0,1]
    bad.noise_domain = Interval{0.0, 1.0};
    bad.envelope_q = [](double) { return 0.0; };
    bad.envelope_Q = [](double) { return 2.0; };
    bad.envelope_K = 2.0;
    CHECK_THROWS_AS(additive_channel(bad, 1.0), NormalizationFailure);
}

TEST_CASE("laplace additive entropy matches the closed form") {
    auto ch = test_support::laplace_additive(1.0);
    const double expected = std::log2(2.0 * std::exp(1.0));  // 2.442695...
    for (double x : {-1.0, -0.25, 0.0, 0.8}) {
        CHECK(conditional_entropy_density(x, ch) == Approx(expected).margin(1e-9));
    }
}

TEST_CASE("conditional densities integrate to one") {
    std::mt19937_64 rng(7);
    for (auto& ch : {gaussian_channel({0.7}, 1.5), rayleigh_channel(RayleighSpec::defaulted(1.0)),
                     test_support::laplace_additive(1.0)}) {
        std::uniform_real_distribution<double> ux(-ch.peak, ch.peak);
        for (int k = 0; k < 20; ++k) {
            const double x = ux(rng);
            const double mass =
                integrate([&](double y) { return ch.eval(y, x); }, ch.output_domain).value;
            CHECK(mass == Approx(1.0).margin(1e-9));
        }
    }
}

TEST_CASE("envelope sandwich holds exactly on a sampled grid") {
    for (auto& ch : {gaussian_channel({1.0}, 1.0), rayleigh_channel(RayleighSpec::defaulted(1.0))}) {
        for (int iy = 0; iy <= 400; ++iy) {
            const double y = ch.name == "rayleigh" ? 0.075 * iy : -10.0 + 0.05 * iy;
            const double q = ch.envelope_q(y);
            const double bigq = ch.envelope_Q(y);
            REQUIRE(q >= 0.0);
            REQUIRE(bigq <= ch.envelope_K);
            for (int ix = 0; ix <= 40; ++ix) {
                const double x = -ch.peak + 2.0 * ch.peak * ix / 40.0;
                const double p = ch.eval(y, x);
                REQUIRE(q <= p);
                REQUIRE(p <= bigq);
            }
        }
    }
}

TEST_CASE("additive channels shift exactly") {
    auto ch = test_support::uniform_additive(1.0);
    for (double y : {-1.2, -0.3, 0.0, 0.4, 1.1})
        for (double x : {-1.0, -0.5, 0.25, 1.0})
            CHECK(ch.eval(y, x) == ch.eval(y - x, 0.0));
}

TEST_CASE("closed-form conditional entropies agree with quadrature") {
    auto gauss = gaussian_channel({1.0}, 1.0);
    auto ray = rayleigh_channel(RayleighSpec::defaulted(1.0));
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ux(-1.0, 1.0);
    for (int k = 0; k < 20; ++k) {
        const double x = ux(rng);
        CHECK((*gauss.closed_form_d)(x) == Approx(quadrature_entropy(gauss, x)).margin(1e-6));
        CHECK((*ray.closed_form_d)(x) == Approx(quadrature_entropy(ray, x)).margin(1e-6));
    }
}
