#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace kerr {

struct MeanStderr {
    double mean = 0.0;
    double stderr_ = 0.0;
};

inline MeanStderr mean_stderr(std::span<const double> xs) {
    const double n = static_cast<double>(xs.size());
    if (xs.empty()) return {};
    double sum = 0.0, sum2 = 0.0;
    for (double x : xs) {
        sum += x;
        sum2 += x * x;
    }
    MeanStderr out;
    out.mean = sum / n;
    if (xs.size() > 1) {
        const double var = std::max(0.0, (sum2 - n * out.mean * out.mean) / (n - 1.0));
        out.stderr_ = std::sqrt(var / n);
    }
    return out;
}

/// Mann-Kendall trend statistic with normal approximation and continuity
/// correction. z > 1.645 rejects "no trend" in favor of an increasing trend at
/// 95% (one-sided).
inline double mann_kendall_z(std::span<const double> xs) {
    const int n = static_cast<int>(xs.size());
    if (n < 3) return 0.0;
    long s = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            if (xs[j] > xs[i]) ++s;
            else if (xs[j] < xs[i]) --s;
        }
    const double var = n * (n - 1.0) * (2.0 * n + 5.0) / 18.0;
    if (s == 0) return 0.0;
    const double corrected = s > 0 ? s - 1.0 : s + 1.0;
    return corrected / std::sqrt(var);
}

/// Least-squares slope of y against x.
inline double ls_slope(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = std::min(x.size(), y.size());
    if (n < 2) return 0.0;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += (x[i] - mx) * (y[i] - my);
        den += (x[i] - mx) * (x[i] - mx);
    }
    return den == 0.0 ? 0.0 : num / den;
}

} // namespace kerr
