#include <catch2/catch.hpp>

#include <cmath>
#include <complex>
#include <numbers>

#include "kerr/analytic.hpp"
#include "kerr/fock.hpp"

using kerr::complex;
using kerr::FockVector;

TEST_CASE("coherent state is normalized with a 1e-12 truncation tail", "[fock]") {
    for (double a0 : {0.5, 2.0, 4.0}) {
        const FockVector psi = kerr::coherent_state({a0, 0.3});
        REQUIRE(psi.norm2() == Approx(1.0).margin(1e-12));
    }
    REQUIRE_THROWS_AS(kerr::coherent_state({80.0, 0.0}, 2000), std::invalid_argument);
}

TEST_CASE("t = 0 evolution is the identity and <a> = alpha0", "[fock]") {
    const complex a0{1.3, -0.4};
    const FockVector psi = kerr::fock_evolve(a0, 1.0, 0.0);
    REQUIRE(std::abs(kerr::mean_a_fock(psi) - a0) < 1e-12);
}

TEST_CASE("half period maps |alpha0> to |-alpha0>", "[fock]") {
    const complex a0{1.0, 0.5};
    const double mu = 2.0;
    const FockVector psi = kerr::fock_evolve(a0, mu, std::numbers::pi / mu);
    const FockVector target = kerr::coherent_state(-a0);
    REQUIRE(kerr::fidelity(psi, target) == Approx(1.0).margin(1e-10));
}

TEST_CASE("quarter periods give the two cat superpositions", "[fock]") {
    const complex a0{2.0, 0.0};
    const double mu = 1.0;
    const complex ca{0.5, -0.5}, cb{0.5, 0.5};  // (1-i)/2 and (1+i)/2

    const FockVector quarter = kerr::fock_evolve(a0, mu, std::numbers::pi / (2.0 * mu));
    const FockVector cat_q = kerr::coherent_superposition(a0, ca, cb);
    REQUIRE(cat_q.norm2() == Approx(1.0).margin(1e-12));
    REQUIRE(kerr::fidelity(quarter, cat_q) == Approx(1.0).margin(1e-10));

    const FockVector three_quarter =
        kerr::fock_evolve(a0, mu, 3.0 * std::numbers::pi / (2.0 * mu));
    const FockVector cat_3q = kerr::coherent_superposition(a0, cb, ca);
    REQUIRE(kerr::fidelity(three_quarter, cat_3q) == Approx(1.0).margin(1e-10));
}

TEST_CASE("evolution is periodic with period 2 pi / mu", "[fock]") {
    const complex a0{1.1, 0.2};
    const double mu = 1.5, t = 0.7;
    const FockVector a = kerr::fock_evolve(a0, mu, t);
    const FockVector b = kerr::fock_evolve(a0, mu, t + 2.0 * std::numbers::pi / mu);
    for (std::size_t n = 0; n < a.amplitudes.size(); ++n)
        REQUIRE(std::abs(a.amplitudes[n] - b.amplitudes[n]) < 1e-10);
}

TEST_CASE("number-basis <a> equals the closed form along the evolution", "[fock]") {
    REQUIRE(kerr::mean_a_fock(kerr::coherent_state({0.0, 0.0})) == complex{});
    REQUIRE(std::abs(kerr::mean_a_fock(kerr::coherent_state({2.0, 0.0})) - 2.0) < 1e-12);

    for (double a0 : {0.5, 1.0, 2.0}) {
        for (int k = 0; k < 20; ++k) {
            const double t = 0.3 + k * 0.31;
            const complex fock = kerr::mean_a_fock(kerr::fock_evolve({a0, 0.0}, 1.0, t));
            const complex exact = kerr::mean_a_exact({a0, 0.0}, 1.0, t);
            REQUIRE(std::abs(fock - exact) < 1e-10);
        }
    }
}

TEST_CASE("conjugation symmetry of the exact expectation", "[fock]") {
    const complex a0{0.8, 0.6};
    for (double t : {0.2, 1.0, 2.7}) {
        const complex lhs = kerr::mean_a_exact(a0, 1.0, -t);
        const complex rhs = std::conj(kerr::mean_a_exact(std::conj(a0), 1.0, t));
        REQUIRE(std::abs(lhs - rhs) < 1e-12);
    }
}

TEST_CASE("antinormal moment <a a^dagger> is the conserved |alpha0|^2 + 1", "[fock]") {
    REQUIRE(std::abs(kerr::antinormal_moment(kerr::coherent_state({0.0, 0.0}), 1, 0)) < 1e-15);

    const complex a0{1.5, -0.5};
    const double expected = std::norm(a0) + 1.0;
    for (double t : {0.0, 0.4, 1.1, 2.9, 5.0}) {
        const FockVector psi = kerr::fock_evolve(a0, 1.0, t);
        const complex m = kerr::antinormal_moment(psi, 1, 1);
        REQUIRE(m.real() == Approx(expected).margin(1e-10));
        REQUIRE(std::abs(m.imag()) < 1e-12);
    }

    // cross-check a higher moment against coherent-state algebra:
    // <a^2 a^dagger^2> = |a0|^4 + 4|a0|^2 + 2 at t = 0
    const complex m22 = kerr::antinormal_moment(kerr::coherent_state(a0), 2, 2);
    const double n2 = std::norm(a0);
    REQUIRE(m22.real() == Approx(n2 * n2 + 4.0 * n2 + 2.0).margin(1e-9));
}
