#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "kerr/analytic.hpp"
#include "kerr/noise.hpp"
#include "kerr/philox.hpp"
#include "kerr/sde.hpp"
#include "kerr/stats.hpp"
#include "kerr/util.hpp"

namespace kerr {

enum class InitialKind { fixed_beta, sample_q0, delta_positive_p };

struct InitialMode {
    InitialKind kind = InitialKind::fixed_beta;
    complex value{};  // beta for fixed_beta, alpha0 otherwise

    static InitialMode fixed(const complex& beta) { return {InitialKind::fixed_beta, beta}; }
    static InitialMode q0(const complex& alpha0) { return {InitialKind::sample_q0, alpha0}; }
    static InitialMode delta_pp(const complex& alpha0) {
        return {InitialKind::delta_positive_p, alpha0};
    }
};

/// Draw an initial phase point. Always alpha_plus(0) = conj(alpha(0)).
/// sample_q0 adds a unit-width complex Gaussian (variance 1/2 per component),
/// the Q function of the coherent state |alpha0>.
inline PhasePoint sample_initial(const InitialMode& mode, PhiloxStream& rng) {
    switch (mode.kind) {
        case InitialKind::fixed_beta:
        case InitialKind::delta_positive_p:
            return physical_initial(mode.value);
        case InitialKind::sample_q0: {
            const auto [g1, g2] = rng.next_gaussian_pair();
            const complex beta = mode.value + complex{g1, g2} / std::numbers::sqrt2;
            return physical_initial(beta);
        }
    }
    throw std::logic_error("sample_initial: bad mode");
}

enum class IntegratorKind { heun, pathwise_exact };

struct EnsembleConfig {
    long n_trajectories = 50000;
    InitialMode initial = InitialMode::fixed(complex{0.001, 0.1});
    double t_final = 1.0;
    double dt = 1e-4;
    long record_stride = 100;
    double divergence_threshold = default_divergence_threshold;
    std::uint64_t master_seed = 0;
    IntegratorKind integrator = IntegratorKind::heun;
    int n_threads = 0;        // 0 = hardware concurrency
    bool zero_noise = false;  // test hook: drift-only dynamics

    void validate() const {
        if (n_trajectories < 1)
            throw std::invalid_argument("EnsembleConfig: n_trajectories must be >= 1");
        if (!(t_final > 0.0)) throw std::invalid_argument("EnsembleConfig: t_final must be > 0");
        if (!(dt > 0.0)) throw std::invalid_argument("EnsembleConfig: dt must be > 0");
        if (record_stride < 1)
            throw std::invalid_argument("EnsembleConfig: record_stride must be >= 1");
        if (!(divergence_threshold > 0.0))
            throw std::invalid_argument("EnsembleConfig: divergence_threshold must be > 0");
    }

    long n_steps() const { return std::max<long>(1, std::llround(t_final / dt)); }
};

/// Per-time ensemble statistics over surviving (non-divergent) trajectories.
struct MomentSeries {
    std::vector<double> times;
    std::vector<complex> mean_alpha;
    std::vector<double> stderr_re;
    std::vector<double> stderr_im;
    std::vector<complex> mean_prod;  // <alpha+ alpha>
    std::vector<double> var_prod;    // <|z|^2> - |<z>|^2 over survivors
    std::vector<long> n_alive;
    std::vector<double> divergence_times;  // sorted ascending
    long n_trajectories = 0;
    bool survivor_bias_flag = false;        // n_alive < n_trajectories somewhere
    std::optional<double> truncated_at;     // all trajectories divergent from this time on

    std::size_t n_times() const { return times.size(); }
};

namespace detail {

struct BlockAccumulator {
    std::vector<double> sum_re, sum_im, sum_re2, sum_im2;
    std::vector<double> prod_re, prod_im, prod_abs2;
    std::vector<long> alive;
    std::vector<double> div_times;

    explicit BlockAccumulator(std::size_t n_rec)
        : sum_re(n_rec), sum_im(n_rec), sum_re2(n_rec), sum_im2(n_rec), prod_re(n_rec),
          prod_im(n_rec), prod_abs2(n_rec), alive(n_rec) {}

    void record(std::size_t r, const PhasePoint& p) {
        sum_re[r] += p.alpha.real();
        sum_im[r] += p.alpha.imag();
        sum_re2[r] += p.alpha.real() * p.alpha.real();
        sum_im2[r] += p.alpha.imag() * p.alpha.imag();
        const complex prod = p.alpha_plus * p.alpha;
        prod_re[r] += prod.real();
        prod_im[r] += prod.imag();
        prod_abs2[r] += std::norm(prod);
        ++alive[r];
    }
};

// Fixed block size keeps the reduction layout (and hence the output bytes)
// independent of thread count and scheduling.
inline constexpr long ensemble_block_size = 256;

} // namespace detail

/// Run an ensemble of independent trajectories and reduce to per-time moments.
/// Deterministic for fixed (master_seed, config): trajectory i always uses
/// stream i, and partial sums are combined in fixed index order.
inline MomentSeries run_ensemble(const KerrModel& model, const EnsembleConfig& cfg) {
    model.validate();
    cfg.validate();

    const long n_steps = cfg.n_steps();
    std::vector<long> rec_steps;
    for (long s = 0; s <= n_steps; s += cfg.record_stride) rec_steps.push_back(s);
    if (rec_steps.back() != n_steps) rec_steps.push_back(n_steps);
    const std::size_t n_rec = rec_steps.size();

    const long n_blocks =
        (cfg.n_trajectories + detail::ensemble_block_size - 1) / detail::ensemble_block_size;
    std::vector<detail::BlockAccumulator> blocks(static_cast<std::size_t>(n_blocks),
                                                 detail::BlockAccumulator(n_rec));

    auto run_block = [&](long b) {
        auto& acc = blocks[static_cast<std::size_t>(b)];
        const long lo = b * detail::ensemble_block_size;
        const long hi = std::min(cfg.n_trajectories, lo + detail::ensemble_block_size);
        for (long i = lo; i < hi; ++i) {
            PhiloxStream ic_rng(cfg.master_seed, static_cast<std::uint64_t>(i),
                                PhiloxStream::Domain::initial_condition);
            const PhasePoint p0 = sample_initial(cfg.initial, ic_rng);
            NoiseStream noise(model.noise_config(cfg.dt, cfg.master_seed,
                                                 static_cast<std::uint64_t>(i)));
            std::size_t next_rec = 0;
            acc.record(next_rec++, p0);

            const bool exact = cfg.integrator == IntegratorKind::pathwise_exact;
            PathwiseExactEvaluator ev(model, p0.alpha, cfg.dt);
            PhasePoint p = p0;
            for (long s = 1; s <= n_steps; ++s) {
                std::pair<complex, complex> eta{};
                if (!cfg.zero_noise) eta = noise.next();
                p = exact ? ev.step(eta) : heun_step(model, p, eta, cfg.dt);
                if (diverged(p, cfg.divergence_threshold)) {
                    acc.div_times.push_back(cfg.dt * static_cast<double>(s));
                    break;
                }
                if (next_rec < n_rec && rec_steps[next_rec] == s) acc.record(next_rec++, p);
            }
        }
    };

    unsigned n_threads = cfg.n_threads > 0 ? static_cast<unsigned>(cfg.n_threads)
                                           : std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(n_blocks));
    if (n_threads <= 1) {
        for (long b = 0; b < n_blocks; ++b) run_block(b);
    } else {
        std::atomic<long> next{0};
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (unsigned w = 0; w < n_threads; ++w)
            pool.emplace_back([&] {
                for (long b = next.fetch_add(1); b < n_blocks; b = next.fetch_add(1)) run_block(b);
            });
        for (auto& th : pool) th.join();
    }

    MomentSeries out;
    out.n_trajectories = cfg.n_trajectories;
    out.times.resize(n_rec);
    out.mean_alpha.resize(n_rec);
    out.stderr_re.resize(n_rec);
    out.stderr_im.resize(n_rec);
    out.mean_prod.resize(n_rec);
    out.var_prod.resize(n_rec);
    out.n_alive.resize(n_rec);
    for (std::size_t r = 0; r < n_rec; ++r) {
        out.times[r] = cfg.dt * static_cast<double>(rec_steps[r]);
        double sum_re = 0.0, sum_im = 0.0, sum_re2 = 0.0, sum_im2 = 0.0;
        double prod_re = 0.0, prod_im = 0.0, prod_abs2 = 0.0;
        long alive = 0;
        for (const auto& b : blocks) {
            sum_re += b.sum_re[r];
            sum_im += b.sum_im[r];
            sum_re2 += b.sum_re2[r];
            sum_im2 += b.sum_im2[r];
            prod_re += b.prod_re[r];
            prod_im += b.prod_im[r];
            prod_abs2 += b.prod_abs2[r];
            alive += b.alive[r];
        }
        out.n_alive[r] = alive;
        if (alive == 0) {
            const double nan = std::numeric_limits<double>::quiet_NaN();
            out.mean_alpha[r] = {nan, nan};
            out.mean_prod[r] = {nan, nan};
            out.stderr_re[r] = out.stderr_im[r] = out.var_prod[r] = nan;
            if (!out.truncated_at) out.truncated_at = out.times[r];
            continue;
        }
        const double n = static_cast<double>(alive);
        out.mean_alpha[r] = {sum_re / n, sum_im / n};
        out.mean_prod[r] = {prod_re / n, prod_im / n};
        auto se = [&](double sum2, double mean) {
            if (alive < 2) return 0.0;
            const double var = std::max(0.0, (sum2 - n * mean * mean) / (n - 1.0));
            return std::sqrt(var / n);
        };
        out.stderr_re[r] = se(sum_re2, out.mean_alpha[r].real());
        out.stderr_im[r] = se(sum_im2, out.mean_alpha[r].imag());
        out.var_prod[r] = std::max(0.0, prod_abs2 / n - std::norm(out.mean_prod[r]));
        if (alive < cfg.n_trajectories) out.survivor_bias_flag = true;
    }
    for (const auto& b : blocks)
        out.divergence_times.insert(out.divergence_times.end(), b.div_times.begin(),
                                    b.div_times.end());
    std::sort(out.divergence_times.begin(), out.divergence_times.end());
    return out;
}

/// Per-time mean and variance of the product alpha+ alpha. The mean is
/// statistically constant at beta* beta while the variance grows with time.
struct ProductMomentSeries {
    std::vector<double> times;
    std::vector<complex> mean;
    std::vector<double> variance;
    std::vector<long> n_alive;
    bool survivor_bias_flag = false;

    /// Mann-Kendall z of the variance series (positive = increasing trend).
    double variance_trend_z() const { return mann_kendall_z(variance); }
};

inline ProductMomentSeries product_moment_series(const KerrModel& model,
                                                 const EnsembleConfig& cfg) {
    const MomentSeries ms = run_ensemble(model, cfg);
    ProductMomentSeries out;
    out.times = ms.times;
    out.mean = ms.mean_prod;
    out.variance = ms.var_prod;
    out.n_alive = ms.n_alive;
    out.survivor_bias_flag = ms.survivor_bias_flag;
    return out;
}

struct DivergenceRow {
    complex beta;
    double fraction_diverged = 0.0;
    std::optional<double> median_divergence_time;  // absent when < half diverged
};

/// Divergence statistics across initial conditions. The median is the
/// censored 0.5-quantile over all trajectories (survivors counted as +inf),
/// so it exists only when at least half diverged by t_final.
inline std::vector<DivergenceRow> divergence_statistics(const KerrModel& model,
                                                        const std::vector<complex>& betas,
                                                        EnsembleConfig cfg) {
    if (cfg.n_trajectories < 100)
        throw std::invalid_argument("divergence_statistics: need >= 100 trajectories per beta");
    std::vector<DivergenceRow> rows;
    for (const complex& beta : betas) {
        cfg.initial = InitialMode::fixed(beta);
        const MomentSeries ms = run_ensemble(model, cfg);
        DivergenceRow row;
        row.beta = beta;
        const auto& dt = ms.divergence_times;  // sorted
        const std::size_t n = static_cast<std::size_t>(cfg.n_trajectories);
        row.fraction_diverged = static_cast<double>(dt.size()) / static_cast<double>(n);
        const std::size_t hi = n / 2;  // 0-based upper median index
        if (n % 2 == 1) {
            if (dt.size() > hi) row.median_divergence_time = dt[hi];
        } else if (dt.size() > hi) {
            row.median_divergence_time = 0.5 * (dt[hi - 1] + dt[hi]);
        }
        rows.push_back(row);
    }
    return rows;
}

/// Outcome of the averaging-order experiment: the stochastic-average-first
/// branch (fixed beta, compared against the re-summed closed form), the
/// initial-distribution-first branch (Q0-sampled, compared against the exact
/// expectation), and the ordered analytic series as ground truth.
struct AveragingOrderReport {
    // branch (a): fixed beta = alpha0
    MomentSeries fixed_beta;
    std::vector<complex> resummed_curve;
    std::vector<double> fixed_beta_z;  // max component z vs resummed, per time

    // branch (b): beta sampled from Q0(alpha0)
    MomentSeries q0_sampled;
    std::vector<complex> exact_curve;
    double q0_divergence_fraction = 0.0;
    std::optional<double> q0_blow_up_time;  // first t with >10 sigma deviation or divergences

    // branch (c)
    std::vector<complex> ordered_curve;
    double ordered_vs_exact_max = 0.0;
};

inline AveragingOrderReport averaging_order_experiment(const complex& alpha0, double mu,
                                                       const EnsembleConfig& base_cfg) {
    const KerrModel model{mu, +1};
    AveragingOrderReport rep;

    EnsembleConfig cfg = base_cfg;
    cfg.initial = InitialMode::fixed(alpha0);
    rep.fixed_beta = run_ensemble(model, cfg);
    for (std::size_t r = 0; r < rep.fixed_beta.n_times(); ++r) {
        const double t = rep.fixed_beta.times[r];
        const complex ref = stochastic_average_resummed(alpha0, mu, t);
        rep.resummed_curve.push_back(ref);
        const complex dev = rep.fixed_beta.mean_alpha[r] - ref;
        auto z = [](double d, double se) {
            if (se == 0.0) return d == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
            return std::abs(d) / se;
        };
        rep.fixed_beta_z.push_back(std::max(z(dev.real(), rep.fixed_beta.stderr_re[r]),
                                            z(dev.imag(), rep.fixed_beta.stderr_im[r])));
    }

    cfg = base_cfg;
    cfg.initial = InitialMode::q0(alpha0);
    rep.q0_sampled = run_ensemble(model, cfg);
    rep.q0_divergence_fraction = static_cast<double>(rep.q0_sampled.divergence_times.size()) /
                                 static_cast<double>(cfg.n_trajectories);
    for (std::size_t r = 0; r < rep.q0_sampled.n_times(); ++r) {
        const double t = rep.q0_sampled.times[r];
        const complex exact = mean_a_exact(alpha0, mu, t);
        rep.exact_curve.push_back(exact);
        const auto ordered = ordered_double_average(alpha0, mu, t);
        rep.ordered_curve.push_back(ordered.value);
        rep.ordered_vs_exact_max = std::max(rep.ordered_vs_exact_max,
                                            std::abs(ordered.value - exact));
        if (!rep.q0_blow_up_time) {
            if (rep.q0_sampled.n_alive[r] < cfg.n_trajectories) {
                rep.q0_blow_up_time = t;
            } else if (r > 0) {
                const complex dev = rep.q0_sampled.mean_alpha[r] - exact;
                const double se_re = rep.q0_sampled.stderr_re[r];
                const double se_im = rep.q0_sampled.stderr_im[r];
                if ((se_re > 0.0 && std::abs(dev.real()) > 10.0 * se_re) ||
                    (se_im > 0.0 && std::abs(dev.imag()) > 10.0 * se_im))
                    rep.q0_blow_up_time = t;
            }
        }
    }
    return rep;
}

} // namespace kerr
