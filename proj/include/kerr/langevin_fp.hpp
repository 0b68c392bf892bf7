#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kerr/sde.hpp"
#include "kerr/util.hpp"

namespace kerr {

using PhaseFn = std::function<complex(const PhasePoint&)>;

/// One Langevin noise coefficient C_ij together with optional analytic partial
/// derivatives with respect to alpha and alpha+ (the two independent phase
/// variables). Missing partials fall back to central finite differences.
struct CoefficientFn {
    PhaseFn value;
    PhaseFn d_alpha;
    PhaseFn d_alpha_plus;

    bool empty() const { return !value; }
};

/// Langevin system  d(alpha)/dt  = B_a  + C_aa f_a  + C_aap f_ap
///                  d(alpha+)/dt = B_ap + C_apap f_ap + C_apa f_a
/// with unit-intensity independent white noises f_a, f_ap.
struct LangevinCoefficients {
    PhaseFn b_alpha;
    PhaseFn b_alpha_plus;
    CoefficientFn c_aa;    // C_{alpha alpha}
    CoefficientFn c_aap;   // C_{alpha alpha+}
    CoefficientFn c_apa;   // C_{alpha+ alpha}
    CoefficientFn c_apap;  // C_{alpha+ alpha+}
};

/// Drift and diffusion functions of the equivalent Fokker-Planck equation.
struct FPCoefficients {
    PhaseFn a_alpha;
    PhaseFn a_alpha_plus;
    PhaseFn d_aa;
    PhaseFn d_apap;
    PhaseFn d_aap;
};

namespace detail {

// The coefficient functions are polynomial (holomorphic) in each variable,
// so a real-direction central difference gives the complex derivative.
inline PhaseFn fd_partial(const PhaseFn& f, bool wrt_alpha_plus) {
    return [f, wrt_alpha_plus](const PhasePoint& p) -> complex {
        const complex& z = wrt_alpha_plus ? p.alpha_plus : p.alpha;
        const double h = 1e-6 * (1.0 + std::abs(z));
        PhasePoint hi = p, lo = p;
        if (wrt_alpha_plus) {
            hi.alpha_plus += h;
            lo.alpha_plus -= h;
        } else {
            hi.alpha += h;
            lo.alpha -= h;
        }
        return (f(hi) - f(lo)) / (2.0 * h);
    };
}

inline PhaseFn zero_fn() {
    return [](const PhasePoint&) { return complex{}; };
}

struct ResolvedCoefficient {
    PhaseFn value;
    PhaseFn d_alpha;
    PhaseFn d_alpha_plus;
};

inline ResolvedCoefficient resolve(const CoefficientFn& c) {
    if (c.empty()) return {zero_fn(), zero_fn(), zero_fn()};
    ResolvedCoefficient r;
    r.value = c.value;
    r.d_alpha = c.d_alpha ? c.d_alpha : fd_partial(c.value, false);
    r.d_alpha_plus = c.d_alpha_plus ? c.d_alpha_plus : fd_partial(c.value, true);
    return r;
}

} // namespace detail

/// Map Langevin coefficients to the unique Fokker-Planck drift and diffusion:
///   D_aa  = C_aa^2 + C_aap^2
///   D_apap = C_apap^2 + C_apa^2
///   D_aap = C_aa C_apa + C_apap C_aap
///   A_i   = B_i + (1/2) sum_{j,l} (d_l C_ij) C_lj   (Stratonovich correction)
inline FPCoefficients fp_from_langevin(const LangevinCoefficients& lg) {
    if (!lg.b_alpha || !lg.b_alpha_plus)
        throw std::invalid_argument("fp_from_langevin: drift functions must be evaluable");
    const auto caa = detail::resolve(lg.c_aa);
    const auto caap = detail::resolve(lg.c_aap);
    const auto capa = detail::resolve(lg.c_apa);
    const auto capap = detail::resolve(lg.c_apap);

    FPCoefficients fp;
    fp.d_aa = [caa, caap](const PhasePoint& p) {
        const complex a = caa.value(p), b = caap.value(p);
        return a * a + b * b;
    };
    fp.d_apap = [capap, capa](const PhasePoint& p) {
        const complex a = capap.value(p), b = capa.value(p);
        return a * a + b * b;
    };
    fp.d_aap = [caa, capa, capap, caap](const PhasePoint& p) {
        return caa.value(p) * capa.value(p) + capap.value(p) * caap.value(p);
    };
    fp.a_alpha = [b = lg.b_alpha, caa, caap, capa, capap](const PhasePoint& p) {
        return b(p) + 0.5 * (caa.d_alpha(p) * caa.value(p) + caa.d_alpha_plus(p) * capa.value(p) +
                             caap.d_alpha(p) * caap.value(p) +
                             caap.d_alpha_plus(p) * capap.value(p));
    };
    fp.a_alpha_plus = [b = lg.b_alpha_plus, caa, caap, capa, capap](const PhasePoint& p) {
        return b(p) + 0.5 * (capa.d_alpha(p) * caa.value(p) + capa.d_alpha_plus(p) * capa.value(p) +
                             capap.d_alpha(p) * caap.value(p) +
                             capap.d_alpha_plus(p) * capap.value(p));
    };
    return fp;
}

/// The model's own Langevin coefficients with analytic derivatives.
inline LangevinCoefficients kerr_langevin(const KerrModel& model) {
    model.validate();
    LangevinCoefficients lg;
    lg.b_alpha = [model](const PhasePoint& p) { return model.drift_alpha(p); };
    lg.b_alpha_plus = [model](const PhasePoint& p) { return model.drift_alpha_plus(p); };
    const double r = std::sqrt(model.mu);
    const complex root{r, model.representation_sign > 0 ? r : -r};         // sqrt(s*2i*mu)
    const complex root_conj = std::conj(root);                             // sqrt(-s*2i*mu)
    lg.c_aa.value = [root](const PhasePoint& p) { return root * p.alpha; };
    lg.c_aa.d_alpha = [root](const PhasePoint&) { return root; };
    lg.c_aa.d_alpha_plus = detail::zero_fn();
    lg.c_apap.value = [root_conj](const PhasePoint& p) { return root_conj * p.alpha_plus; };
    lg.c_apap.d_alpha = detail::zero_fn();
    lg.c_apap.d_alpha_plus = [root_conj](const PhasePoint&) { return root_conj; };
    return lg;
}

/// Closed-form Fokker-Planck coefficients of the model's evolution equation,
/// written directly (independent of fp_from_langevin) for round-trip checks.
/// Q representation: A_a = -i mu (2 a+ a - 3) a, D_aa = 2i mu a^2, D_aap = 0.
/// Positive-P mode:  A_a = -i mu (2 a+ a + 1) a, D_aa = -2i mu a^2, D_aap = 0.
inline FPCoefficients kerr_fp_reference(const KerrModel& model) {
    model.validate();
    const double mu = model.mu;
    const double c = model.representation_sign > 0 ? -3.0 : 1.0;
    const double s = static_cast<double>(model.representation_sign);
    FPCoefficients fp;
    fp.a_alpha = [mu, c](const PhasePoint& p) {
        return -iu * mu * (2.0 * p.alpha_plus * p.alpha + c) * p.alpha;
    };
    fp.a_alpha_plus = [mu, c](const PhasePoint& p) {
        return iu * mu * (2.0 * p.alpha_plus * p.alpha + c) * p.alpha_plus;
    };
    fp.d_aa = [mu, s](const PhasePoint& p) { return s * 2.0 * iu * mu * p.alpha * p.alpha; };
    fp.d_apap = [mu, s](const PhasePoint& p) {
        return -s * 2.0 * iu * mu * p.alpha_plus * p.alpha_plus;
    };
    fp.d_aap = detail::zero_fn();
    return fp;
}

/// Largest relative mismatch between two FP coefficient sets at one point.
/// Differences are scaled by max(1, |reference|) per coefficient.
inline double fp_roundtrip_residual(const FPCoefficients& got, const FPCoefficients& ref,
                                    const PhasePoint& p) {
    double worst = 0.0;
    auto cmp = [&](const PhaseFn& g, const PhaseFn& r) {
        const complex rv = r(p);
        const double scale = std::max(1.0, std::abs(rv));
        worst = std::max(worst, std::abs(g(p) - rv) / scale);
    };
    cmp(got.a_alpha, ref.a_alpha);
    cmp(got.a_alpha_plus, ref.a_alpha_plus);
    cmp(got.d_aa, ref.d_aa);
    cmp(got.d_apap, ref.d_apap);
    cmp(got.d_aap, ref.d_aap);
    return worst;
}

enum class DiffusionClass { negative, positive, boundary };

struct DiffusionSample {
    PhasePoint point;
    complex d_aap;
    double abs_d_aa;
    DiffusionClass cls;
};

struct NegativeDiffusionReport {
    bool negative_everywhere = true;  // true iff D_aap < |D_aa| strictly at every point
    std::vector<DiffusionSample> samples;
};

/// Classify D_aap < |D_aa| at each sample point. Points where the two sides
/// agree to rounding (e.g. the origin, where both vanish) are reported as
/// boundary and break the strict inequality.
inline NegativeDiffusionReport negative_diffusion_check(const FPCoefficients& fp,
                                                        const std::vector<PhasePoint>& points) {
    NegativeDiffusionReport rep;
    for (const auto& p : points) {
        DiffusionSample s;
        s.point = p;
        s.d_aap = fp.d_aap(p);
        s.abs_d_aa = std::abs(fp.d_aa(p));
        const double lhs = s.d_aap.real();
        const double tol = 1e-12 * std::max({1.0, std::abs(lhs), s.abs_d_aa});
        if (std::abs(lhs - s.abs_d_aa) <= tol)
            s.cls = DiffusionClass::boundary;
        else
            s.cls = lhs < s.abs_d_aa ? DiffusionClass::negative : DiffusionClass::positive;
        if (s.cls != DiffusionClass::negative) rep.negative_everywhere = false;
        rep.samples.push_back(s);
    }
    return rep;
}

} // namespace kerr
