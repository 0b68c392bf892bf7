#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace kerr {

using complex = std::complex<double>;

inline constexpr complex iu{0.0, 1.0};

/// Reduce t into [0, period). Used before evaluating periodic closed forms so
/// that large times do not enter oscillatory phases with big arguments.
inline double reduce_mod(double t, double period) {
    double r = std::fmod(t, period);
    if (r < 0.0) r += period;
    return r;
}

/// Reduce t modulo the Kerr period 2*pi/mu.
inline double reduce_period(double t, double mu) {
    return reduce_mod(t, 2.0 * std::numbers::pi / mu);
}

inline bool finite(const complex& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

/// Parse a complex literal of the form "a+bi" ("1", "-0.5i", "1e-3+0.1i", "2-1i", "i").
/// Whitespace is not allowed. Throws std::invalid_argument on malformed input.
inline complex parse_complex(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("empty complex literal");

    // Split at the last '+'/'-' that is not a leading sign and not part of an exponent.
    std::size_t split = std::string::npos;
    for (std::size_t i = s.size(); i-- > 1;) {
        char c = s[i];
        if ((c == '+' || c == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
            split = i;
            break;
        }
    }

    auto parse_real = [](const std::string& part) {
        if (part.empty()) throw std::invalid_argument("malformed complex literal");
        std::size_t pos = 0;
        double v = std::stod(part, &pos);
        if (pos != part.size()) throw std::invalid_argument("malformed complex literal: '" + part + "'");
        return v;
    };
    auto parse_imag_part = [&](std::string part) {
        if (part.empty() || part.back() != 'i')
            throw std::invalid_argument("malformed complex literal: missing 'i'");
        part.pop_back();
        if (part.empty() || part == "+") return 1.0;
        if (part == "-") return -1.0;
        return parse_real(part);
    };

    try {
        if (s.back() == 'i') {
            if (split == std::string::npos) return complex{0.0, parse_imag_part(s)};
            return complex{parse_real(s.substr(0, split)), parse_imag_part(s.substr(split))};
        }
        if (split != std::string::npos)
            throw std::invalid_argument("malformed complex literal: '" + s + "'");
        return complex{parse_real(s), 0.0};
    } catch (const std::out_of_range&) {
        throw std::invalid_argument("complex literal out of range: '" + s + "'");
    }
}

/// Format a complex number as "a+bi" so that parse_complex round-trips it.
inline std::string format_complex(const complex& z) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g%+.17gi", z.real(), z.imag());
    return buf;
}

/// Parse "start:step:stop" into a grid inclusive of both endpoints within
/// half-step tolerance.
inline std::vector<double> parse_time_grid(const std::string& s) {
    auto c1 = s.find(':');
    auto c2 = s.find(':', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw std::invalid_argument("time grid must be start:step:stop, got '" + s + "'");
    auto num = [&](std::string part) {
        std::size_t pos = 0;
        double v = std::stod(part, &pos);
        if (pos != part.size()) throw std::invalid_argument("bad number in time grid: '" + part + "'");
        return v;
    };
    double start = num(s.substr(0, c1));
    double step = num(s.substr(c1 + 1, c2 - c1 - 1));
    double stop = num(s.substr(c2 + 1));
    if (step <= 0.0) throw std::invalid_argument("time grid step must be positive");
    if (stop < start) throw std::invalid_argument("time grid stop must be >= start");
    std::vector<double> grid;
    for (long k = 0;; ++k) {
        double t = start + static_cast<double>(k) * step;
        if (t > stop + 0.5 * step) break;
        grid.push_back(t);
    }
    return grid;
}

} // namespace kerr
