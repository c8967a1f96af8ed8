#include <catch2/catch.hpp>

#include <cmath>
#include <vector>

#include "capax/quadrature.hpp"
#include "oracle.hpp"

using namespace capax;

TEST_CASE("integrate matches closed forms on finite and infinite domains") {
    QuadratureSpec spec;

    auto exp_tail = integrate([](double y) { return std::exp(-y); }, Interval::from(0.0), spec);
    CHECK(std::fabs(exp_tail.value - 1.0) <= spec.abs_tol);
    CHECK(exp_tail.err_estimate >= 0.0);

    auto unit = integrate([](double) { return 1.0; }, Interval{0.0, 1.0}, spec);
    CHECK(std::fabs(unit.value - 1.0) <= 1e-14);

    auto normal = integrate([](double y) { return oracle::normal_pdf(y, 0.0, 1.0); },
                            Interval::whole_line(), spec);
    CHECK(std::fabs(normal.value - 1.0) <= spec.abs_tol);
}

TEST_CASE("integrate is linear on test functions") {
    QuadratureSpec spec;
    auto f = [](double y) { return std::exp(-y); };
    auto g = [](double y) { return y * std::exp(-2.0 * y); };
    const double alpha = 2.5, beta = -0.75;
    const Interval dom = Interval::from(0.0);

    const double lhs =
        integrate([&](double y) { return alpha * f(y) + beta * g(y); }, dom, spec).value;
    const double rhs =
        alpha * integrate(f, dom, spec).value + beta * integrate(g, dom, spec).value;
    CHECK(std::fabs(lhs - rhs) <= 2.0 * (1.0 + std::fabs(alpha) + std::fabs(beta)) * spec.abs_tol);
}

TEST_CASE("refinement never worsens the error against a closed form") {
    // Endpoint-singular integrand keeps the adaptive refinement active across
    // the whole tolerance ladder: int_0^1 y^(-1/2) dy = 2.
    auto f = [](double y) { return 1.0 / std::sqrt(y); };
    const double reference = 2.0;

    double prev_err = std::numeric_limits<double>::infinity();
    for (double tol : {1e-4, 5e-5, 2.5e-5, 1.25e-5, 6.25e-6}) {
        QuadratureSpec spec;
        spec.abs_tol = tol;
        spec.rel_tol = tol;
        spec.max_subdivisions = 100000;
        const double v = integrate(f, Interval{0.0, 1.0}, spec).value;
        const double err = std::fabs(v - reference);
        CHECK(err <= prev_err + 1e-14);  // slack for rounding noise
        CHECK(err <= tol);
        prev_err = err;
    }
}

TEST_CASE("truncate_domain finds tight tail cuts") {
    SECTION("exponential envelope") {
        auto dom = truncate_domain([](double y) { return std::exp(-y); },
                                   Interval::from(0.0), 1e-12);
        CHECK(dom.lo == 0.0);
        CHECK(dom.hi == Approx(12.0 * std::log(10.0)).margin(0.05));
    }
    SECTION("finite domain is returned unchanged") {
        auto dom = truncate_domain([](double) { return 1.0; }, Interval{0.0, 5.0}, 1e-3);
        CHECK(dom.lo == 0.0);
        CHECK(dom.hi == 5.0);
    }
    SECTION("power-law envelope") {
        const double gamma = 0.9;
        auto dom = truncate_domain([gamma](double y) { return std::pow(y, -(1.0 + gamma)); },
                                   Interval::from(10.0), 1e-6);
        const double expected = std::pow(1.0 / (gamma * 1e-6), 1.0 / gamma);
        CHECK(dom.hi == Approx(expected).epsilon(0.01));
    }
}

TEST_CASE("truncation then integration stays within the tail budget") {
    const double tail_tol = 1e-9;
    QuadratureSpec spec;
    auto f = [](double y) { return std::exp(-y); };
    auto dom = truncate_domain(f, Interval::from(0.0), tail_tol);
    const double truncated = integrate(f, dom, spec).value;
    CHECK(std::fabs(truncated - 1.0) <= tail_tol + spec.abs_tol);
}

TEST_CASE("non-integrable envelopes are rejected") {
    CHECK_THROWS_AS(truncate_domain([](double y) { return 1.0 / (1.0 + y); },
                                    Interval::from(0.0), 1e-9),
                    NonConvergence);
}

TEST_CASE("unreachable tail thresholds exhaust the search budget") {
    // Integrable tail, but the cut satisfying 1/b < 1e-30 sits beyond the
    // doubling-search budget.
    CHECK_THROWS_AS(truncate_domain([](double y) { return 1.0 / (y * y); },
                                    Interval::from(1.0), 1e-30),
                    NonConvergence);
}

TEST_CASE("non-finite integrand values are reported") {
    CHECK_THROWS_AS(integrate([](double y) { return std::log(y); }, Interval{-1.0, 1.0}),
                    NonFiniteEvaluation);
}

TEST_CASE("invalid domains and specs are rejected") {
    CHECK_THROWS_AS(integrate([](double) { return 1.0; }, Interval{2.0, 1.0}),
                    InvalidParameter);
    QuadratureSpec bad;
    bad.abs_tol = 0.0;
    CHECK_THROWS_AS(integrate([](double) { return 1.0; }, Interval{0.0, 1.0}, bad),
                    InvalidParameter);
}

TEST_CASE("subdivision budget exhaustion raises NonConvergence") {
    QuadratureSpec spec;
    spec.abs_tol = 1e-13;
    spec.rel_tol = 1e-13;
    spec.max_subdivisions = 6;
    CHECK_THROWS_AS(integrate([](double y) { return std::sqrt(std::fabs(std::sin(40.0 * y))); },
                              Interval{0.0, 3.0}, spec),
                    NonConvergence);
}
