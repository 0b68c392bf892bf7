#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kerr/util.hpp"

namespace kerr {

/// <a(t)> for an initial coherent state |alpha0> in the rotating frame:
/// e^{-i mu t} alpha0 exp(|alpha0|^2 (e^{-2i mu t} - 1)).
inline complex mean_a_exact(const complex& alpha0, double mu, double t) {
    if (!(mu > 0.0)) throw std::invalid_argument("mean_a_exact: mu must be > 0");
    const double tr = reduce_period(t, mu);
    return std::exp(complex{0.0, -mu * tr}) * alpha0 *
           std::exp(std::norm(alpha0) * (std::exp(complex{0.0, -2.0 * mu * tr}) - 1.0));
}

/// Fixed-beta stochastic average of alpha(t) in the Q representation, obtained
/// by re-summing the noise-average series: beta e^{3i mu t} exp(|beta|^2 (1 - e^{2i mu t})).
inline complex stochastic_average_resummed(const complex& beta, double mu, double t) {
    if (!(mu > 0.0)) throw std::invalid_argument("stochastic_average_resummed: mu must be > 0");
    const double tr = reduce_period(t, mu);
    return beta * std::exp(complex{0.0, 3.0 * mu * tr}) *
           std::exp(std::norm(beta) * (1.0 - std::exp(complex{0.0, 2.0 * mu * tr})));
}

/// Fixed-beta stochastic average in positive-P mode,
/// beta e^{-i mu t} exp(|beta|^2 (e^{-2i mu t} - 1)). With beta = alpha0 (the
/// delta-function positive-P initial distribution) this equals mean_a_exact;
/// the expression is evaluated independently of mean_a_exact on purpose.
inline complex positive_p_stochastic_average(const complex& beta, double mu, double t) {
    if (!(mu > 0.0))
        throw std::invalid_argument("positive_p_stochastic_average: mu must be > 0");
    const double phase = -mu * reduce_period(t, mu);
    const complex rot = std::polar(1.0, phase);
    return beta * rot * std::exp(std::norm(beta) * (std::polar(1.0, 2.0 * phase) - 1.0));
}

struct MomentFormulaResult {
    complex value{};
    int series_terms_used = 0;
    bool converged = false;
    std::optional<std::string> divergent_reason;
};

/// Initial-distribution-average-first evaluation of <a(t)>: the l-series whose
/// term is |alpha0|^{2l}/(l+1)! times the analytically re-summed inner n-sum,
///   sum_{n>=l} x^n (n+1)!/((n-l)! l!) = (l+1) x^l / (1-x)^{l+2},  x = 1 - e^{2i mu t}.
/// Summation stops when the relative term drops below `tolerance`.
inline MomentFormulaResult ordered_double_average(const complex& alpha0, double mu, double t,
                                                  double tolerance = 1e-12, int max_terms = 500) {
    if (!(mu > 0.0)) throw std::invalid_argument("ordered_double_average: mu must be > 0");
    if (!(tolerance > 0.0))
        throw std::invalid_argument("ordered_double_average: tolerance must be > 0");
    const double tr = reduce_period(t, mu);
    const complex one_minus_x = std::exp(complex{0.0, 2.0 * mu * tr});
    const complex x = 1.0 - one_minus_x;
    const complex y = std::norm(alpha0) * x / one_minus_x;
    const complex prefactor =
        alpha0 * std::exp(complex{0.0, 3.0 * mu * tr}) / (one_minus_x * one_minus_x);

    MomentFormulaResult res;
    complex term = prefactor;  // l = 0
    complex sum{};
    for (int l = 0; l < max_terms; ++l) {
        sum += term;
        res.series_terms_used = l + 1;
        if (std::abs(term) <= tolerance * std::max(1e-300, std::abs(sum))) {
            res.converged = true;
            break;
        }
        term *= y / static_cast<double>(l + 1);
    }
    res.value = sum;
    if (!res.converged)
        res.divergent_reason = "l-series did not reach relative tolerance " +
                               std::to_string(tolerance) + " within " +
                               std::to_string(max_terms) + " terms";
    return res;
}

namespace detail {

/// Gauss-Legendre nodes and weights on [-1, 1] (Newton iteration).
inline void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.resize(n);
    weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
}

} // namespace detail

/// Truncated Q0 average of the re-summed fixed-beta stochastic average over
/// the disc |beta - alpha0| <= radius:
///   (1/pi) int d^2 beta e^{-|beta-alpha0|^2} beta e^{3i mu t} e^{|beta|^2 (1-e^{2i mu t})}.
/// Polar quadrature about alpha0: Gauss-Legendre radially, uniform in angle.
inline complex resummed_q0_quadrature(const complex& alpha0, double mu, double t, double radius,
                                      int n_radial = 200, int n_angular = 256) {
    if (!(mu > 0.0) || !(radius > 0.0))
        throw std::invalid_argument("resummed_q0_quadrature: mu and radius must be > 0");
    const double tr = reduce_period(t, mu);
    const complex growth = 1.0 - std::exp(complex{0.0, 2.0 * mu * tr});
    const complex phase = std::exp(complex{0.0, 3.0 * mu * tr});

    std::vector<double> gx, gw;
    detail::gauss_legendre(n_radial, gx, gw);

    complex total{};
    const double dphi = 2.0 * std::numbers::pi / n_angular;
    std::vector<complex> ring(n_angular);
    for (int j = 0; j < n_angular; ++j) ring[j] = std::polar(1.0, dphi * j);
    for (int i = 0; i < n_radial; ++i) {
        const double r = 0.5 * radius * (gx[i] + 1.0);
        const double wr = 0.5 * radius * gw[i] * r * std::exp(-r * r);
        complex angular{};
        for (int j = 0; j < n_angular; ++j) {
            const complex beta = alpha0 + r * ring[j];
            angular += beta * std::exp(std::norm(beta) * growth);
        }
        total += wr * angular;
    }
    return total * phase * dphi / std::numbers::pi;
}

struct IntegrabilityDiagnosis {
    bool unbounded = false;
    double cos_2mu_t = 0.0;
    /// Present when integrable: disc quadrature at the default radius and its
    /// deviation from mean_a_exact (reported, not asserted; the two agree only
    /// where the interchange of sum and integral is justified).
    std::optional<complex> quadrature_value;
    std::optional<double> deviation_from_exact;
};

/// The Q0 integral of the re-summed average has an unbounded integrand exactly
/// when cos(2 mu t) <= 0; boundary times (cos = 0 to rounding) count as
/// unbounded.
inline IntegrabilityDiagnosis resummed_q0_integrability(const complex& alpha0, double mu, double t,
                                                        double radius = 8.0) {
    if (!(mu > 0.0)) throw std::invalid_argument("resummed_q0_integrability: mu must be > 0");
    IntegrabilityDiagnosis diag;
    diag.cos_2mu_t = std::cos(2.0 * mu * reduce_period(t, mu));
    diag.unbounded = diag.cos_2mu_t <= 1e-12;
    if (!diag.unbounded) {
        const complex q = resummed_q0_quadrature(alpha0, mu, t, radius);
        diag.quadrature_value = q;
        diag.deviation_from_exact = std::abs(q - mean_a_exact(alpha0, mu, t));
    }
    return diag;
}

} // namespace kerr
