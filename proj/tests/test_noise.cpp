#include <catch2/catch.hpp>

#include <cmath>
#include <complex>

#include "kerr/noise.hpp"

using kerr::complex;
using kerr::NoiseConfig;
using kerr::NoisePath;

TEST_CASE("per-step amplitude uses the principal square root", "[noise]") {
    NoiseConfig cfg{2.0, 0.5, +1, 0, 0};  // mu*dt = 1
    REQUIRE(cfg.eta_root().real() == Approx(1.0));
    REQUIRE(cfg.eta_root().imag() == Approx(1.0));
    REQUIRE(cfg.eta_plus_root().imag() == Approx(-1.0));

    cfg.representation_sign = -1;
    REQUIRE(cfg.eta_root().imag() == Approx(-1.0));
    REQUIRE(cfg.eta_plus_root().imag() == Approx(1.0));
}

TEST_CASE("invalid configs are rejected before generation", "[noise]") {
    REQUIRE_THROWS_AS(kerr::sample_noise_path({-1.0, 0.01, +1, 0, 0}, 10),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(kerr::sample_noise_path({1.0, 0.0, +1, 0, 0}, 10), std::invalid_argument);
    REQUIRE_THROWS_AS(kerr::sample_noise_path({1.0, 0.01, 2, 0, 0}, 10), std::invalid_argument);
    REQUIRE_THROWS_AS(kerr::sample_noise_path({1.0, 0.01, +1, 0, 0}, 0), std::invalid_argument);
}

TEST_CASE("same seed and trajectory index give bit-identical paths", "[noise]") {
    const NoiseConfig cfg{1.0, 0.01, +1, 1234, 17};
    const NoisePath a = kerr::sample_noise_path(cfg, 4096);
    const NoisePath b = kerr::sample_noise_path(cfg, 4096);
    REQUIRE(a.increments == b.increments);
    REQUIRE(a.cum_xi == b.cum_xi);
    REQUIRE(a.cum_sum_both == b.cum_sum_both);

    NoiseConfig other = cfg;
    other.trajectory_index = 18;
    const NoisePath c = kerr::sample_noise_path(other, 4096);
    REQUIRE(c.increments != a.increments);
}

TEST_CASE("cumulative sums follow generation order exactly", "[noise]") {
    const NoisePath p = kerr::sample_noise_path({1.0, 0.01, +1, 99, 3}, 2000);
    complex run{}, run_both{};
    for (std::size_t l = 0; l < p.n_steps(); ++l) {
        run += p.increments[l].first;
        run_both += p.increments[l].first + p.increments[l].second;
        REQUIRE(p.cum_xi[l] == run);
        REQUIRE(p.cum_sum_both[l] == run_both);
    }
}

TEST_CASE("noise increments have the defining moments", "[noise]") {
    const NoiseConfig cfg{1.0, 0.01, +1, 2024, 0};
    const std::size_t n = 100000;
    const NoisePath p = kerr::sample_noise_path(cfg, n);

    complex mean{}, mean_sq{}, mean_cross{}, mean_abs2{};
    for (const auto& [eta, eta_plus] : p.increments) {
        mean += eta;
        mean_sq += eta * eta;
        mean_cross += eta * eta_plus;
        mean_abs2 += std::norm(eta);
    }
    mean /= static_cast<double>(n);
    mean_sq /= static_cast<double>(n);
    mean_cross /= static_cast<double>(n);
    mean_abs2 /= static_cast<double>(n);

    const double amp = std::abs(complex{0.0, 2.0 * cfg.mu * cfg.dt});  // |2 i mu dt| = 0.02
    const double bound = 4.0 * std::sqrt(amp / static_cast<double>(n));
    REQUIRE(std::abs(mean) < bound);

    // <eta^2> = 2 i mu dt: the real part vanishes identically for this
    // construction, the imaginary part is 0.02 with stderr ~ amp*sqrt(2/n).
    REQUIRE(mean_sq.real() == Approx(0.0).margin(1e-12));
    REQUIRE(mean_sq.imag() == Approx(0.02).margin(4.0 * amp * std::sqrt(2.0 / n)));

    // independent streams: <eta eta+> = 0
    REQUIRE(std::abs(mean_cross) < 4.0 * amp / std::sqrt(static_cast<double>(n)));

    // |eta|^2 = 2 mu dt g^2 has mean 2 mu dt
    REQUIRE(mean_abs2.real() ==
            Approx(0.02).margin(4.0 * 0.02 * std::sqrt(2.0 / static_cast<double>(n))));
}

TEST_CASE("noise_statistics validates the law at 4 sigma", "[noise]") {
    NoiseConfig cfg{1.0, 0.001, +1, 7, 0};
    std::vector<NoisePath> paths;
    for (std::uint64_t i = 0; i < 10; ++i) {
        cfg.trajectory_index = i;
        paths.push_back(kerr::sample_noise_path(cfg, 100000));
    }
    const auto rep = kerr::noise_statistics(paths);
    REQUIRE(rep.n_samples == 1000000);
    REQUIRE(rep.eta_sq.target == complex{0.0, 0.002});
    REQUIRE(rep.max_abs_z() < 4.0);
}

TEST_CASE("positive-P mode flips the sign of <eta^2>", "[noise]") {
    NoiseConfig cfg{1.0, 0.001, -1, 7, 0};
    std::vector<NoisePath> paths{kerr::sample_noise_path(cfg, 200000)};
    const auto rep = kerr::noise_statistics(paths);
    REQUIRE(rep.eta_sq.target == complex{0.0, -0.002});
    REQUIRE(rep.eta_plus_sq.target == complex{0.0, 0.002});
    REQUIRE(rep.max_abs_z() < 4.0);
}

TEST_CASE("noise_statistics rejects empty or tiny collections", "[noise]") {
    std::vector<NoisePath> none;
    REQUIRE_THROWS_AS(kerr::noise_statistics(none), std::invalid_argument);
    std::vector<NoisePath> tiny{kerr::sample_noise_path({1.0, 0.01, +1, 0, 0}, 100)};
    REQUIRE_THROWS_AS(kerr::noise_statistics(tiny), std::invalid_argument);
}

TEST_CASE("eta and eta+ streams are independent, not conjugates", "[noise]") {
    const NoiseConfig cfg{1.0, 0.01, +1, 31337, 0};
    const std::size_t n = 200000;
    const NoisePath p = kerr::sample_noise_path(cfg, n);

    // cross-covariances between the two streams' real components
    double c_rr = 0.0, c_ri = 0.0, c_ir = 0.0, c_ii = 0.0;
    complex conj_cross{};
    for (const auto& [eta, eta_plus] : p.increments) {
        c_rr += eta.real() * eta_plus.real();
        c_ri += eta.real() * eta_plus.imag();
        c_ir += eta.imag() * eta_plus.real();
        c_ii += eta.imag() * eta_plus.imag();
        conj_cross += eta * std::conj(eta_plus);
    }
    const double var_comp = cfg.mu * cfg.dt;  // each real component ~ N(0, mu dt)
    const double bound = 4.0 * var_comp / std::sqrt(static_cast<double>(n));
    for (double c : {c_rr, c_ri, c_ir, c_ii})
        REQUIRE(std::abs(c / static_cast<double>(n)) < bound);

    // conjugate noise would give <eta conj(eta+)> = 2 i mu dt; independence gives 0
    REQUIRE(std::abs(conj_cross / static_cast<double>(n)) <
            4.0 * 2.0 * var_comp / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("coarsening sums increments in groups over the same path", "[noise]") {
    const NoisePath fine = kerr::sample_noise_path({1.0, 1e-3, +1, 5, 0}, 1000);
    const NoisePath coarse = kerr::coarsen(fine, 10);
    REQUIRE(coarse.n_steps() == 100);
    REQUIRE(coarse.cfg.dt == Approx(1e-2));
    for (std::size_t k = 0; k < coarse.n_steps(); ++k) {
        const std::size_t last_fine = (k + 1) * 10 - 1;
        REQUIRE(std::abs(coarse.cum_xi[k] - fine.cum_xi[last_fine]) < 1e-13);
        REQUIRE(std::abs(coarse.cum_sum_both[k] - fine.cum_sum_both[last_fine]) < 1e-13);
    }
    REQUIRE_THROWS_AS(kerr::coarsen(fine, 3), std::invalid_argument);
}

TEST_CASE("zero path has zero increments and sums", "[noise]") {
    const NoisePath z = kerr::zero_noise_path({1.0, 0.1, +1, 0, 0}, 25);
    for (std::size_t l = 0; l < z.n_steps(); ++l) {
        REQUIRE(z.increments[l].first == complex{});
        REQUIRE(z.cum_sum_both[l] == complex{});
    }
}
