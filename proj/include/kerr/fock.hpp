#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "kerr/util.hpp"

namespace kerr {

/// Truncated number-basis amplitudes of a pure state.
struct FockVector {
    std::vector<complex> amplitudes;  // c_n, n = 0..n_max

    int n_max() const { return static_cast<int>(amplitudes.size()) - 1; }

    double norm2() const {
        double s = 0.0;
        for (const auto& c : amplitudes) s += std::norm(c);
        return s;
    }

    /// <this|other>; the shorter vector is zero-padded.
    complex inner(const FockVector& other) const {
        const std::size_t n = std::min(amplitudes.size(), other.amplitudes.size());
        complex s{};
        for (std::size_t k = 0; k < n; ++k) s += std::conj(amplitudes[k]) * other.amplitudes[k];
        return s;
    }
};

inline double fidelity(const FockVector& a, const FockVector& b) {
    return std::norm(a.inner(b));
}

inline constexpr int default_fock_cap = 4096;

/// Truncation bound for a coherent state |alpha0>: Poisson tail below 1e-12
/// for |alpha0| <= 6 by construction.
inline int coherent_truncation(double abs_alpha0) {
    return static_cast<int>(std::ceil(abs_alpha0 * abs_alpha0 + 10.0 * abs_alpha0 + 20.0));
}

/// Coherent state |alpha0> in the truncated number basis,
/// c_n = e^{-|alpha0|^2/2} alpha0^n / sqrt(n!).
inline FockVector coherent_state(const complex& alpha0, int n_cap = default_fock_cap) {
    const int n_max = coherent_truncation(std::abs(alpha0));
    if (n_max > n_cap)
        throw std::invalid_argument("coherent_state: |alpha0| needs truncation " +
                                    std::to_string(n_max) + " > cap " + std::to_string(n_cap));
    FockVector psi;
    psi.amplitudes.resize(static_cast<std::size_t>(n_max) + 1);
    psi.amplitudes[0] = std::exp(-0.5 * std::norm(alpha0));
    for (int n = 1; n <= n_max; ++n)
        psi.amplitudes[n] = psi.amplitudes[n - 1] * alpha0 / std::sqrt(static_cast<double>(n));
    return psi;
}

/// a |alpha0> + b |-alpha0> on a common truncated basis (not renormalized;
/// the quarter-period coefficient pairs make this exactly unit norm).
inline FockVector coherent_superposition(const complex& alpha0, const complex& a, const complex& b,
                                         int n_cap = default_fock_cap) {
    FockVector psi = coherent_state(alpha0, n_cap);
    for (std::size_t n = 0; n < psi.amplitudes.size(); ++n) {
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        psi.amplitudes[n] *= a + b * sign;
    }
    return psi;
}

/// Evolve an initial coherent state for time t:
/// c_n(t) = e^{-|alpha0|^2/2} (alpha0^n/sqrt(n!)) e^{-i n^2 mu t}.
/// t is reduced modulo the period 2 pi / mu before the phases are formed.
inline FockVector fock_evolve(const complex& alpha0, double mu, double t,
                              int n_cap = default_fock_cap) {
    if (!(mu > 0.0)) throw std::invalid_argument("fock_evolve: mu must be > 0");
    FockVector psi = coherent_state(alpha0, n_cap);
    const double tr = reduce_period(t, mu);
    for (std::size_t n = 0; n < psi.amplitudes.size(); ++n) {
        const double phase = -mu * tr * static_cast<double>(n) * static_cast<double>(n);
        psi.amplitudes[n] *= std::polar(1.0, phase);
    }
    return psi;
}

/// <a> in the number basis: sum_n conj(c_n) c_{n+1} sqrt(n+1).
inline complex mean_a_fock(const FockVector& psi) {
    complex s{};
    for (std::size_t n = 0; n + 1 < psi.amplitudes.size(); ++n)
        s += std::conj(psi.amplitudes[n]) * psi.amplitudes[n + 1] *
             std::sqrt(static_cast<double>(n + 1));
    return s;
}

/// (a^dagger)^m |psi>, extending the basis by m.
inline FockVector apply_creation(const FockVector& psi, int m) {
    if (m < 0) throw std::invalid_argument("apply_creation: m must be >= 0");
    FockVector out = psi;
    for (int k = 0; k < m; ++k) {
        FockVector next;
        next.amplitudes.resize(out.amplitudes.size() + 1);
        for (std::size_t n = 0; n < out.amplitudes.size(); ++n)
            next.amplitudes[n + 1] = out.amplitudes[n] * std::sqrt(static_cast<double>(n + 1));
        out = std::move(next);
    }
    return out;
}

/// Antinormally ordered moment <a^n (a^dagger)^m> computed in the number basis
/// as the overlap of (a^dagger)^n |psi> and (a^dagger)^m |psi>.
inline complex antinormal_moment(const FockVector& psi, int n, int m) {
    if (n < 0 || m < 0) throw std::invalid_argument("antinormal_moment: orders must be >= 0");
    const FockVector left = apply_creation(psi, n);
    const FockVector right = apply_creation(psi, m);
    return left.inner(right);
}

} // namespace kerr
