#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "kerr/noise.hpp"
#include "kerr/util.hpp"

namespace kerr {

/// Point in the doubled phase space. alpha and alpha_plus are independent
/// complex amplitudes; no conjugacy is implied or maintained between them.
struct PhasePoint {
    complex alpha{};
    complex alpha_plus{};

    bool is_finite() const { return finite(alpha) && finite(alpha_plus); }
};

/// Initial condition drawn from a physical state: alpha_plus(0) = conj(alpha(0)).
inline PhasePoint physical_initial(const complex& beta) { return {beta, std::conj(beta)}; }

/// The anharmonic-oscillator stochastic model in the doubled phase space:
///
///   d(alpha)/dt  = -2i mu (alpha+ alpha - theta) alpha  + xi  alpha
///   d(alpha+)/dt = +2i mu (alpha+ alpha - theta) alpha+ + xi+ alpha+
///
/// with theta = 1 in the Q representation (sign +1). In positive-P mode
/// (sign -1) the noise correlations flip sign and theta = 0; this is the
/// autonomous form of the rotating-variable correspondence and reproduces the
/// closed-form positive-P stochastic average.
struct KerrModel {
    double mu = 1.0;
    int representation_sign = +1;

    void validate() const {
        if (!(mu > 0.0)) throw std::invalid_argument("KerrModel: mu must be > 0");
        if (representation_sign != 1 && representation_sign != -1)
            throw std::invalid_argument("KerrModel: representation_sign must be +1 or -1");
    }

    double theta() const { return representation_sign > 0 ? 1.0 : 0.0; }

    complex drift_alpha(const PhasePoint& p) const {
        return -iu * (2.0 * mu) * (p.alpha_plus * p.alpha - theta()) * p.alpha;
    }
    complex drift_alpha_plus(const PhasePoint& p) const {
        return iu * (2.0 * mu) * (p.alpha_plus * p.alpha - theta()) * p.alpha_plus;
    }

    /// Langevin noise coefficient C_aa = sqrt(s*2i*mu) * alpha (principal branch).
    complex noise_coeff_alpha(const complex& alpha) const {
        const double r = std::sqrt(mu);
        return complex{r, representation_sign > 0 ? r : -r} * alpha;
    }
    /// C_a+a+ = sqrt(-s*2i*mu) * alpha+; the cross coefficients vanish.
    complex noise_coeff_alpha_plus(const complex& alpha_plus) const {
        const double r = std::sqrt(mu);
        return complex{r, representation_sign > 0 ? -r : r} * alpha_plus;
    }

    NoiseConfig noise_config(double dt, std::uint64_t seed = 0,
                             std::uint64_t trajectory_index = 0) const {
        return NoiseConfig{mu, dt, representation_sign, seed, trajectory_index};
    }
};

/// One Stratonovich-consistent predictor-corrector (Heun) step. The increments
/// eta already carry the per-step noise amplitude sqrt(s*2i*mu*dt), so the
/// noise term of a point p is p.alpha * eta (and alpha+ * eta+).
/// Non-finite output signals divergence; no exception is thrown here.
inline PhasePoint heun_step(const KerrModel& model, const PhasePoint& p,
                            const std::pair<complex, complex>& eta, double dt) {
    const complex ba = model.drift_alpha(p);
    const complex bp = model.drift_alpha_plus(p);
    const PhasePoint pred{p.alpha + ba * dt + p.alpha * eta.first,
                          p.alpha_plus + bp * dt + p.alpha_plus * eta.second};
    return {p.alpha + 0.5 * (ba + model.drift_alpha(pred)) * dt +
                0.5 * (p.alpha + pred.alpha) * eta.first,
            p.alpha_plus + 0.5 * (bp + model.drift_alpha_plus(pred)) * dt +
                0.5 * (p.alpha_plus + pred.alpha_plus) * eta.second};
}

/// A sampled trajectory. points[l] is the state after l steps (points[0] is
/// the initial condition). If the trajectory diverged, points stops at the
/// last finite state and divergence_time marks the end of the offending step;
/// once flagged a trajectory is never unflagged.
struct Trajectory {
    std::vector<double> times;
    std::vector<PhasePoint> points;
    std::optional<double> divergence_time;
    bool divergence_flag = false;
};

inline bool diverged(const PhasePoint& p, double threshold) {
    const double t2 = threshold * threshold;
    return !p.is_finite() || std::norm(p.alpha) > t2 || std::norm(p.alpha_plus) > t2;
}

constexpr double default_divergence_threshold = 1e6;

/// Integrate the SDEs with the Heun scheme along a realized noise path.
inline Trajectory integrate_trajectory(const KerrModel& model, const PhasePoint& initial,
                                       const NoisePath& path,
                                       double divergence_threshold = default_divergence_threshold) {
    model.validate();
    if (!initial.is_finite())
        throw std::invalid_argument("integrate_trajectory: initial point must be finite");
    const double dt = path.cfg.dt;
    Trajectory traj;
    traj.times.reserve(path.n_steps() + 1);
    traj.points.reserve(path.n_steps() + 1);
    traj.times.push_back(0.0);
    traj.points.push_back(initial);
    PhasePoint p = initial;
    for (std::size_t l = 0; l < path.n_steps(); ++l) {
        p = heun_step(model, p, path.increments[l], dt);
        const double t = dt * static_cast<double>(l + 1);
        if (diverged(p, divergence_threshold)) {
            traj.divergence_flag = true;
            traj.divergence_time = t;
            break;
        }
        traj.times.push_back(t);
        traj.points.push_back(p);
    }
    return traj;
}

/// Streaming evaluator of the pathwise-exact solution
///
///   alpha(t)  = beta  exp{ int_0^t [-2i mu (|beta|^2 e^{S(t')} - theta)] dt' + X(t) }
///   alpha+(t) = beta* exp{ -(same integral) + X+(t) }
///
/// where S = cum_sum_both and X = cum_xi. The inner time integral is evaluated
/// by the trapezoid rule on the step grid, which keeps the product identity
/// alpha+ alpha = beta* beta e^{S} exact (the drift exponents cancel).
class PathwiseExactEvaluator {
public:
    PathwiseExactEvaluator(const KerrModel& model, const complex& beta, double dt)
        : beta_(beta), beta_conj_(std::conj(beta)), dt_(dt),
          two_i_mu_(iu * (2.0 * model.mu)), beta2_(std::norm(beta)), theta_(model.theta()),
          f_prev_(-two_i_mu_ * (beta2_ - theta_)) {
        model.validate();
    }

    PhasePoint current() const {
        return {beta_ * std::exp(drift_int_ + x_),
                beta_conj_ * std::exp(-drift_int_ + x_plus_)};
    }

    PhasePoint step(const std::pair<complex, complex>& eta) {
        s_ += eta.first + eta.second;
        x_ += eta.first;
        x_plus_ += eta.second;
        const complex f_cur = -two_i_mu_ * (beta2_ * std::exp(s_) - theta_);
        drift_int_ += 0.5 * dt_ * (f_prev_ + f_cur);
        f_prev_ = f_cur;
        return current();
    }

    const complex& cumulative_both() const { return s_; }

private:
    complex beta_, beta_conj_;
    double dt_;
    complex two_i_mu_;
    double beta2_, theta_;
    complex f_prev_;
    complex s_{}, x_{}, x_plus_{}, drift_int_{};
};

/// Evaluate the pathwise-exact solution at step index t_index (0 = initial
/// condition, n = after n steps) for the initial condition alpha(0) = beta,
/// alpha+(0) = beta*.
inline PhasePoint pathwise_exact_solution(const KerrModel& model, const complex& beta,
                                          const NoisePath& path, std::size_t t_index) {
    if (t_index > path.n_steps())
        throw std::invalid_argument("pathwise_exact_solution: t_index beyond path length");
    PathwiseExactEvaluator ev(model, beta, path.cfg.dt);
    for (std::size_t l = 0; l < t_index; ++l) ev.step(path.increments[l]);
    return ev.current();
}

/// Pathwise-exact solution sampled at every step, with divergence marking.
inline Trajectory pathwise_exact_trajectory(const KerrModel& model, const complex& beta,
                                            const NoisePath& path,
                                            double divergence_threshold = default_divergence_threshold) {
    PathwiseExactEvaluator ev(model, beta, path.cfg.dt);
    Trajectory traj;
    traj.times.push_back(0.0);
    traj.points.push_back(ev.current());
    for (std::size_t l = 0; l < path.n_steps(); ++l) {
        const PhasePoint p = ev.step(path.increments[l]);
        const double t = path.cfg.dt * static_cast<double>(l + 1);
        if (diverged(p, divergence_threshold)) {
            traj.divergence_flag = true;
            traj.divergence_time = t;
            break;
        }
        traj.times.push_back(t);
        traj.points.push_back(p);
    }
    return traj;
}

} // namespace kerr
