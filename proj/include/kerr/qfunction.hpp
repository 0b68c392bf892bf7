#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "kerr/fock.hpp"
#include "kerr/util.hpp"

namespace kerr {

struct GridSpec {
    double x_min, x_max, y_min, y_max;
    int nx, ny;

    void validate() const {
        if (nx < 2 || ny < 2) throw std::invalid_argument("GridSpec: need at least 2x2 nodes");
        if (!(x_max > x_min) || !(y_max > y_min))
            throw std::invalid_argument("GridSpec: empty extent");
    }
    double dx() const { return (x_max - x_min) / (nx - 1); }
    double dy() const { return (y_max - y_min) / (ny - 1); }

    static GridSpec centered(double extent, int res) {
        return {-extent, extent, -extent, extent, res, res};
    }
};

/// Q(alpha) sampled on a rectangle; values[iy*nx+ix] at alpha = x(ix) + i y(iy).
struct QGrid {
    GridSpec spec;
    std::vector<double> values;

    double x(int ix) const { return spec.x_min + spec.dx() * ix; }
    double y(int iy) const { return spec.y_min + spec.dy() * iy; }
    double at(int ix, int iy) const { return values[static_cast<std::size_t>(iy) * spec.nx + ix]; }

    /// Trapezoid-weight quadrature over the full rectangle.
    double integral() const {
        double s = 0.0;
        for (int iy = 0; iy < spec.ny; ++iy) {
            const double wy = (iy == 0 || iy == spec.ny - 1) ? 0.5 : 1.0;
            for (int ix = 0; ix < spec.nx; ++ix) {
                const double wx = (ix == 0 || ix == spec.nx - 1) ? 0.5 : 1.0;
                s += wx * wy * at(ix, iy);
            }
        }
        return s * spec.dx() * spec.dy();
    }

    /// Quadrature restricted to the disc |alpha - c| <= radius.
    double integral_disc(const complex& c, double radius) const {
        const double r2 = radius * radius;
        double s = 0.0;
        for (int iy = 0; iy < spec.ny; ++iy)
            for (int ix = 0; ix < spec.nx; ++ix) {
                const double dxc = x(ix) - c.real(), dyc = y(iy) - c.imag();
                if (dxc * dxc + dyc * dyc <= r2) s += at(ix, iy);
            }
        return s * spec.dx() * spec.dy();
    }

    double max_value() const { return *std::max_element(values.begin(), values.end()); }
};

/// Husimi Q function of a pure state: Q(alpha) = |<alpha|psi>|^2 / pi with
/// <alpha|psi> = e^{-|alpha|^2/2} sum_n c_n (alpha*)^n / sqrt(n!).
inline QGrid q_function(const FockVector& psi, const GridSpec& spec) {
    spec.validate();
    QGrid grid{spec, {}};
    grid.values.resize(static_cast<std::size_t>(spec.nx) * spec.ny);
    const int n_amp = static_cast<int>(psi.amplitudes.size());
    std::vector<double> inv_sqrt(n_amp);
    for (int n = 0; n < n_amp; ++n) inv_sqrt[n] = n == 0 ? 1.0 : 1.0 / std::sqrt(double(n));
    for (int iy = 0; iy < spec.ny; ++iy) {
        for (int ix = 0; ix < spec.nx; ++ix) {
            const complex a_conj{grid.x(ix), -grid.y(iy)};
            complex term{1.0, 0.0};
            complex s = psi.amplitudes[0];
            for (int n = 1; n < n_amp; ++n) {
                term *= a_conj * inv_sqrt[n];
                s += psi.amplitudes[n] * term;
            }
            const double abs2 = grid.x(ix) * grid.x(ix) + grid.y(iy) * grid.y(iy);
            grid.values[static_cast<std::size_t>(iy) * spec.nx + ix] =
                std::norm(s) * std::exp(-abs2) / std::numbers::pi;
        }
    }
    return grid;
}

struct QPeak {
    double x, y;   // refined (sub-node) position
    double value;  // quadratic-fit peak value
};

/// Interior local maxima of the grid (strict over the 8-neighborhood), with
/// per-axis 3-point quadratic refinement of the position. Sorted by value,
/// largest first.
inline std::vector<QPeak> find_q_maxima(const QGrid& grid) {
    std::vector<QPeak> peaks;
    const int nx = grid.spec.nx, ny = grid.spec.ny;
    for (int iy = 1; iy + 1 < ny; ++iy) {
        for (int ix = 1; ix + 1 < nx; ++ix) {
            const double v = grid.at(ix, iy);
            bool is_max = true;
            for (int oy = -1; oy <= 1 && is_max; ++oy)
                for (int ox = -1; ox <= 1; ++ox) {
                    if (ox == 0 && oy == 0) continue;
                    if (grid.at(ix + ox, iy + oy) >= v) {
                        is_max = false;
                        break;
                    }
                }
            if (!is_max) continue;
            auto refine = [](double lo, double mid, double hi) {
                const double denom = lo - 2.0 * mid + hi;
                return denom == 0.0 ? 0.0 : 0.5 * (lo - hi) / denom;
            };
            const double fx = refine(grid.at(ix - 1, iy), v, grid.at(ix + 1, iy));
            const double fy = refine(grid.at(ix, iy - 1), v, grid.at(ix, iy + 1));
            peaks.push_back({grid.x(ix) + fx * grid.spec.dx(), grid.y(iy) + fy * grid.spec.dy(),
                             v + 0.25 * ((grid.at(ix + 1, iy) - grid.at(ix - 1, iy)) * fx +
                                         (grid.at(ix, iy + 1) - grid.at(ix, iy - 1)) * fy)});
        }
    }
    std::sort(peaks.begin(), peaks.end(), [](const QPeak& a, const QPeak& b) {
        return a.value > b.value;
    });
    return peaks;
}

/// Quadrature route for <a^n (a^dagger)^m> = int d^2alpha Q alpha^n (alpha*)^m.
/// Rejects grids whose boundary still carries weight, since the truncated
/// integral would silently miss mass.
inline complex antinormal_moment_quadrature(const QGrid& grid, int n, int m) {
    if (n < 0 || m < 0)
        throw std::invalid_argument("antinormal_moment_quadrature: orders must be >= 0");
    double boundary_max = 0.0;
    auto weight = [&](int ix, int iy) {
        const double r = std::hypot(grid.x(ix), grid.y(iy));
        return std::pow(std::max(r, 1.0), n + m) * grid.at(ix, iy);
    };
    for (int ix = 0; ix < grid.spec.nx; ++ix)
        boundary_max = std::max({boundary_max, weight(ix, 0), weight(ix, grid.spec.ny - 1)});
    for (int iy = 0; iy < grid.spec.ny; ++iy)
        boundary_max = std::max({boundary_max, weight(0, iy), weight(grid.spec.nx - 1, iy)});
    if (boundary_max > 1e-10) {
        const double extent = std::max({std::abs(grid.spec.x_min), std::abs(grid.spec.x_max),
                                        std::abs(grid.spec.y_min), std::abs(grid.spec.y_max)});
        throw std::invalid_argument(
            "antinormal_moment_quadrature: grid too small (boundary density " +
            std::to_string(boundary_max) + "); suggest extent >= " + std::to_string(extent + 3.0));
    }
    complex s{};
    for (int iy = 0; iy < grid.spec.ny; ++iy) {
        const double wy = (iy == 0 || iy == grid.spec.ny - 1) ? 0.5 : 1.0;
        for (int ix = 0; ix < grid.spec.nx; ++ix) {
            const double wx = (ix == 0 || ix == grid.spec.nx - 1) ? 0.5 : 1.0;
            const complex a{grid.x(ix), grid.y(iy)};
            complex f{1.0, 0.0};
            for (int k = 0; k < n; ++k) f *= a;
            const complex ac = std::conj(a);
            for (int k = 0; k < m; ++k) f *= ac;
            s += wx * wy * grid.at(ix, iy) * f;
        }
    }
    return s * grid.spec.dx() * grid.spec.dy();
}

} // namespace kerr
