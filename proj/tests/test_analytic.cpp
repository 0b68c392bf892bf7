#include <catch2/catch.hpp>

#include <cmath>
#include <complex>
#include <numbers>

#include "kerr/analytic.hpp"
#include "kerr/fock.hpp"

using kerr::complex;
using namespace std::numbers;

TEST_CASE("exact expectation at special times", "[analytic]") {
    const complex one{1.0, 0.0};
    REQUIRE(std::abs(kerr::mean_a_exact(one, 1.0, 0.0) - one) < 1e-15);

    // t = pi/mu: e^{-i pi} exp(0) = -1
    const complex half = kerr::mean_a_exact(one, 1.0, pi);
    REQUIRE(half.real() == Approx(-1.0).margin(1e-12));
    REQUIRE(half.imag() == Approx(0.0).margin(1e-12));

    // t = pi/(2 mu): -i e^{-2}
    const complex quarter = kerr::mean_a_exact(one, 1.0, pi / 2.0);
    REQUIRE(quarter.real() == Approx(0.0).margin(1e-12));
    REQUIRE(quarter.imag() == Approx(-std::exp(-2.0)).margin(1e-12));

    // |<a(t)>| <= |alpha0| everywhere
    const complex a0{1.2, -0.8};
    for (int k = 0; k < 200; ++k)
        REQUIRE(std::abs(kerr::mean_a_exact(a0, 1.0, 0.05 * k)) <= std::abs(a0) + 1e-14);
}

TEST_CASE("re-summed fixed-beta average matches its defining series", "[analytic]") {
    // term of order |beta|^{2n} is (-1)^n |beta|^{2n} e^{i mu t} (e^{2 i mu t}-1)^n / n!,
    // multiplied by the overall beta e^{2 i mu t} prefactor of the expansion
    auto series = [](const complex& beta, double mu, double t, int n_terms) {
        const complex w = std::exp(complex{0.0, 2.0 * mu * t}) - 1.0;
        complex sum{}, term{1.0, 0.0};
        for (int n = 0; n < n_terms; ++n) {
            sum += term;
            term *= -std::norm(beta) * w / static_cast<double>(n + 1);
        }
        return beta * std::exp(complex{0.0, 2.0 * mu * t}) * std::exp(complex{0.0, mu * t}) * sum;
    };
    for (double ab : {0.3, 1.0}) {
        const complex beta{ab / sqrt2, -ab / sqrt2};
        for (double t : {0.0, 0.4, 1.3, 2.2, 3.1}) {
            const complex closed = kerr::stochastic_average_resummed(beta, 1.0, t);
            REQUIRE(std::abs(closed - series(beta, 1.0, t, 40)) < 1e-10);
        }
    }
    REQUIRE(std::abs(kerr::stochastic_average_resummed({0.2, 0.1}, 1.0, 0.0) -
                     complex{0.2, 0.1}) < 1e-15);
}

TEST_CASE("fixed-beta average and the ordered average genuinely differ", "[analytic]") {
    const complex a0{1.0, 0.0};
    const double diff =
        std::abs(kerr::stochastic_average_resummed(a0, 1.0, 0.3) - kerr::mean_a_exact(a0, 1.0, 0.3));
    REQUIRE(diff > 1e-3);
}

TEST_CASE("positive-P average equals the exact expectation at beta = alpha0", "[analytic]") {
    const complex beta{1.0, 0.5};
    REQUIRE(std::abs(kerr::positive_p_stochastic_average(beta, 1.0, 0.7) -
                     kerr::mean_a_exact(beta, 1.0, 0.7)) < 1e-15);
    REQUIRE(std::abs(kerr::positive_p_stochastic_average(beta, 1.0, 0.0) - beta) < 1e-15);
    for (int k = 0; k < 100; ++k)
        REQUIRE(std::abs(kerr::positive_p_stochastic_average(beta, 1.0, 0.07 * k)) <=
                std::abs(beta) + 1e-14);
}

TEST_CASE("ordered double average reproduces the exact expectation", "[analytic]") {
    REQUIRE(kerr::ordered_double_average({0.0, 0.0}, 1.0, 1.3).value == complex{});

    const auto at_quarter = kerr::ordered_double_average({1.0, 0.0}, 1.0, pi / 2.0);
    REQUIRE(at_quarter.converged);
    REQUIRE(std::abs(at_quarter.value - kerr::mean_a_exact({1.0, 0.0}, 1.0, pi / 2.0)) < 1e-10);

    for (double t : {0.17, 0.9, 2.3, 4.4, 6.0}) {
        const auto r = kerr::ordered_double_average({2.0, 0.0}, 1.0, t);
        REQUIRE(r.converged);
        const complex fock = kerr::mean_a_fock(kerr::fock_evolve({2.0, 0.0}, 1.0, t));
        REQUIRE(std::abs(r.value - fock) < 1e-9);
    }

    const auto capped = kerr::ordered_double_average({2.0, 0.0}, 1.0, 1.1, 1e-12, 3);
    REQUIRE_FALSE(capped.converged);
    REQUIRE(capped.divergent_reason.has_value());

    REQUIRE_THROWS_AS(kerr::ordered_double_average({1.0, 0.0}, 1.0, 1.0, -1.0),
                      std::invalid_argument);
}

TEST_CASE("integrability of the Q0 average of the re-summed form", "[analytic]") {
    const complex a0{1.0, 0.0};

    // boundary time pi/4: cos(pi/2) = 0 counts as unbounded
    REQUIRE(kerr::resummed_q0_integrability(a0, 1.0, pi / 4.0).unbounded);
    // cat times
    REQUIRE(kerr::resummed_q0_integrability(a0, 1.0, pi / 2.0).unbounded);
    REQUIRE(kerr::resummed_q0_integrability(a0, 1.0, 3.0 * pi / 2.0).unbounded);

    const auto ok = kerr::resummed_q0_integrability(a0, 1.0, 0.1);
    REQUIRE_FALSE(ok.unbounded);
    REQUIRE(ok.quadrature_value.has_value());
    REQUIRE(ok.deviation_from_exact.has_value());
    REQUIRE(std::isfinite(*ok.deviation_from_exact));

    // predicate matches the sign of cos(2 mu t) on a dense scan
    for (int k = 0; k < 1000; ++k) {
        const double t = 6.4 * k / 1000.0;
        const bool unbounded = kerr::resummed_q0_integrability(a0, 1.0, t).unbounded;
        const double c = std::cos(2.0 * t);
        if (std::abs(c) > 1e-9) REQUIRE(unbounded == (c < 0.0));
    }
}

TEST_CASE("truncated quadrature converges as the cutoff radius grows", "[analytic]") {
    const complex a0{1.0, 0.0};
    for (double t : {0.05, 0.1, 0.3}) {
        const complex i4 = kerr::resummed_q0_quadrature(a0, 1.0, t, 4.0);
        const complex i6 = kerr::resummed_q0_quadrature(a0, 1.0, t, 6.0);
        const complex i8 = kerr::resummed_q0_quadrature(a0, 1.0, t, 8.0);
        const double d46 = std::abs(i6 - i4);
        const double d68 = std::abs(i8 - i6);
        REQUIRE(d68 < 1e-6);
        REQUIRE(d68 <= d46 + 1e-15);
    }
}
