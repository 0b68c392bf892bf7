#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kerr/philox.hpp"
#include "kerr/util.hpp"

namespace kerr {

/// Configuration of the two independent complex white noises xi, xi+.
///
/// The representation sign s selects the noise law:
///   <eta eta>   =  s * 2i mu dt
///   <eta+ eta+> = -s * 2i mu dt
///   <eta+ eta>  =  0
/// with s = +1 for the Q representation and s = -1 for the positive-P mode.
struct NoiseConfig {
    double mu = 1.0;
    double dt = 1e-4;
    int representation_sign = +1;
    std::uint64_t stream_seed = 0;
    std::uint64_t trajectory_index = 0;

    void validate() const {
        if (!(mu > 0.0)) throw std::invalid_argument("NoiseConfig: mu must be > 0");
        if (!(dt > 0.0)) throw std::invalid_argument("NoiseConfig: dt must be > 0");
        if (representation_sign != 1 && representation_sign != -1)
            throw std::invalid_argument("NoiseConfig: representation_sign must be +1 or -1");
    }

    /// Principal-branch per-step amplitude sqrt(s*2i*mu*dt) = sqrt(mu*dt)*(1 + s*i).
    complex eta_root() const {
        const double r = std::sqrt(mu * dt);
        return {r, representation_sign > 0 ? r : -r};
    }
    /// sqrt(-s*2i*mu*dt); the complex conjugate of eta_root().
    complex eta_plus_root() const { return std::conj(eta_root()); }
};

/// Streaming source of discrete noise increments (eta_l, eta_l+).
/// Pure function of (stream_seed, trajectory_index): one Philox block per step
/// yields the independent standard normals g_l, g_l+ as a Box-Muller pair.
class NoiseStream {
public:
    explicit NoiseStream(const NoiseConfig& cfg)
        : root_(cfg.eta_root()), root_plus_(cfg.eta_plus_root()),
          gen_(cfg.stream_seed, cfg.trajectory_index, PhiloxStream::Domain::step_noise) {
        cfg.validate();
    }

    std::pair<complex, complex> next() {
        const auto [g, g_plus] = gen_.next_gaussian_pair();
        return {root_ * g, root_plus_ * g_plus};
    }

private:
    complex root_;
    complex root_plus_;
    PhiloxStream gen_;
};

/// A realized discrete noise path with the running sums needed by the
/// pathwise-exact solution: cum_xi[l] = sum_{k<=l} eta_k and
/// cum_sum_both[l] = sum_{k<=l} (eta_k + eta_k+), accumulated in generation
/// order. Index l = 0..n_steps-1 covers the step ending at t = (l+1)*dt.
struct NoisePath {
    NoiseConfig cfg;
    std::vector<std::pair<complex, complex>> increments;
    std::vector<complex> cum_xi;
    std::vector<complex> cum_xi_plus;
    std::vector<complex> cum_sum_both;

    std::size_t n_steps() const { return increments.size(); }
    double duration() const { return cfg.dt * static_cast<double>(n_steps()); }

    void push(const std::pair<complex, complex>& inc) {
        const auto& [eta, eta_plus] = inc;
        increments.push_back(inc);
        cum_xi.push_back((cum_xi.empty() ? complex{} : cum_xi.back()) + eta);
        cum_xi_plus.push_back((cum_xi_plus.empty() ? complex{} : cum_xi_plus.back()) + eta_plus);
        cum_sum_both.push_back((cum_sum_both.empty() ? complex{} : cum_sum_both.back()) +
                               (eta + eta_plus));
    }
};

/// Generate a reproducible noise path: same (seed, trajectory_index, cfg,
/// n_steps) gives bit-identical output.
inline NoisePath sample_noise_path(const NoiseConfig& cfg, std::size_t n_steps) {
    cfg.validate();
    if (n_steps < 1) throw std::invalid_argument("sample_noise_path: n_steps must be >= 1");
    NoiseStream stream(cfg);
    NoisePath path;
    path.cfg = cfg;
    path.increments.reserve(n_steps);
    path.cum_xi.reserve(n_steps);
    path.cum_xi_plus.reserve(n_steps);
    path.cum_sum_both.reserve(n_steps);
    for (std::size_t l = 0; l < n_steps; ++l) path.push(stream.next());
    return path;
}

/// All-zero increments; the deterministic (drift-only) limit.
inline NoisePath zero_noise_path(const NoiseConfig& cfg, std::size_t n_steps) {
    cfg.validate();
    NoisePath path;
    path.cfg = cfg;
    for (std::size_t l = 0; l < n_steps; ++l) path.push({complex{}, complex{}});
    return path;
}

/// Sum increments in groups of `factor`: the same Brownian path seen on a grid
/// coarser by that factor. Requires n_steps divisible by factor.
inline NoisePath coarsen(const NoisePath& fine, std::size_t factor) {
    if (factor < 1 || fine.n_steps() % factor != 0)
        throw std::invalid_argument("coarsen: n_steps must be divisible by factor");
    NoisePath out;
    out.cfg = fine.cfg;
    out.cfg.dt = fine.cfg.dt * static_cast<double>(factor);
    for (std::size_t l = 0; l < fine.n_steps(); l += factor) {
        complex eta{}, eta_plus{};
        for (std::size_t k = 0; k < factor; ++k) {
            eta += fine.increments[l + k].first;
            eta_plus += fine.increments[l + k].second;
        }
        out.push({eta, eta_plus});
    }
    return out;
}

/// One empirical moment with its target and per-component z-scores.
struct MomentCheck {
    complex empirical;
    complex target;
    double z_re = 0.0;
    double z_im = 0.0;

    double max_abs_z() const { return std::max(std::abs(z_re), std::abs(z_im)); }
};

/// Empirical first and second moments of a collection of noise paths checked
/// against the defining correlations of the noise law.
struct NoiseStatsReport {
    std::size_t n_samples = 0;
    MomentCheck mean_eta;
    MomentCheck mean_eta_plus;
    MomentCheck eta_sq;        // <eta^2>      target  s*2i mu dt
    MomentCheck eta_plus_sq;   // <eta+^2>     target -s*2i mu dt
    MomentCheck eta_cross;     // <eta eta+>   target  0
    MomentCheck eta_conj_cross; // <eta conj(eta+)> target 0 (conjugate noise would not vanish)

    double max_abs_z() const {
        double z = 0.0;
        for (const auto* m : {&mean_eta, &mean_eta_plus, &eta_sq, &eta_plus_sq, &eta_cross,
                              &eta_conj_cross})
            z = std::max(z, m->max_abs_z());
        return z;
    }
};

namespace detail {

class MomentAccumulator {
public:
    void add(const complex& x) {
        ++n_;
        sum_ += x;
        sum_re2_ += x.real() * x.real();
        sum_im2_ += x.imag() * x.imag();
    }
    MomentCheck finish(const complex& target) const {
        const double n = static_cast<double>(n_);
        MomentCheck out;
        out.empirical = sum_ / n;
        out.target = target;
        auto z = [&](double mean, double sumsq, double tgt) {
            const double var = std::max(0.0, (sumsq - n * mean * mean) / (n - 1.0));
            const double se = std::sqrt(var / n);
            const double dev = mean - tgt;
            if (se == 0.0) return dev == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
            return dev / se;
        };
        out.z_re = z(out.empirical.real(), sum_re2_, target.real());
        out.z_im = z(out.empirical.imag(), sum_im2_, target.imag());
        return out;
    }

private:
    std::size_t n_ = 0;
    complex sum_{};
    double sum_re2_ = 0.0;
    double sum_im2_ = 0.0;
};

} // namespace detail

/// Validate the empirical noise law over >= 1000 increments drawn from one or
/// more paths generated with a common config.
inline NoiseStatsReport noise_statistics(std::span<const NoisePath> paths) {
    if (paths.empty()) throw std::invalid_argument("noise_statistics: empty path collection");
    std::size_t total = 0;
    for (const auto& p : paths) total += p.n_steps();
    if (total < 1000)
        throw std::invalid_argument("noise_statistics: need at least 1000 increments, got " +
                                    std::to_string(total));
    const NoiseConfig& cfg = paths.front().cfg;
    const complex var_eta =
        complex{0.0, 2.0 * cfg.mu * cfg.dt * static_cast<double>(cfg.representation_sign)};

    detail::MomentAccumulator mean_eta, mean_eta_plus, eta_sq, eta_plus_sq, eta_cross, conj_cross;
    for (const auto& p : paths) {
        for (const auto& [eta, eta_plus] : p.increments) {
            mean_eta.add(eta);
            mean_eta_plus.add(eta_plus);
            eta_sq.add(eta * eta);
            eta_plus_sq.add(eta_plus * eta_plus);
            eta_cross.add(eta * eta_plus);
            conj_cross.add(eta * std::conj(eta_plus));
        }
    }

    NoiseStatsReport rep;
    rep.n_samples = total;
    rep.mean_eta = mean_eta.finish(complex{});
    rep.mean_eta_plus = mean_eta_plus.finish(complex{});
    rep.eta_sq = eta_sq.finish(var_eta);
    rep.eta_plus_sq = eta_plus_sq.finish(-var_eta);
    rep.eta_cross = eta_cross.finish(complex{});
    rep.eta_conj_cross = conj_cross.finish(complex{});
    return rep;
}

inline NoiseStatsReport noise_statistics(const std::vector<NoisePath>& paths) {
    return noise_statistics(std::span<const NoisePath>(paths));
}

} // namespace kerr
