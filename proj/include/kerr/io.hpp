#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "kerr/ensemble.hpp"
#include "kerr/noise.hpp"
#include "kerr/qfunction.hpp"
#include "kerr/sde.hpp"

namespace kerr::io {

enum class TableFormat { csv, json_lines };

using Cell = std::variant<double, long, std::string>;

/// Column-named table with a schema tag; serializable as CSV (schema in a
/// leading comment line) or JSON-lines (schema as the first object).
struct Table {
    std::string schema;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> cells) {
        if (cells.size() != columns.size())
            throw std::invalid_argument("Table: row width mismatch for schema " + schema);
        rows.push_back(std::move(cells));
    }
};

namespace detail {

inline std::string cell_to_string(const Cell& c, bool json) {
    if (std::holds_alternative<double>(c)) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", std::get<double>(c));
        std::string s = buf;
        if (json && (s.find("nan") != std::string::npos || s.find("inf") != std::string::npos))
            return "null";
        return s;
    }
    if (std::holds_alternative<long>(c)) return std::to_string(std::get<long>(c));
    const std::string& s = std::get<std::string>(c);
    return json ? "\"" + s + "\"" : s;
}

} // namespace detail

inline void write_table(const std::filesystem::path& path, const Table& table,
                        TableFormat format) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file " + path.string());
    if (format == TableFormat::csv) {
        out << "# schema: " << table.schema << "\n";
        for (std::size_t i = 0; i < table.columns.size(); ++i)
            out << table.columns[i] << (i + 1 < table.columns.size() ? "," : "\n");
        for (const auto& row : table.rows)
            for (std::size_t i = 0; i < row.size(); ++i)
                out << detail::cell_to_string(row[i], false) << (i + 1 < row.size() ? "," : "\n");
    } else {
        out << "{\"schema\":\"" << table.schema << "\"}\n";
        for (const auto& row : table.rows) {
            out << "{";
            for (std::size_t i = 0; i < row.size(); ++i)
                out << "\"" << table.columns[i] << "\":" << detail::cell_to_string(row[i], true)
                    << (i + 1 < row.size() ? "," : "");
            out << "}\n";
        }
    }
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

/// Minimal CSV reader for files produced by write_table (used by tests and
/// round-trip checks). Skips '#' comment lines; no quoting support.
struct CsvData {
    std::string schema;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return static_cast<int>(i);
        throw std::out_of_range("no column " + name);
    }
    double value(std::size_t row, const std::string& name) const {
        return std::stod(rows[row][static_cast<std::size_t>(column(name))]);
    }
};

inline CsvData read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    CsvData data;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto pos = line.find("schema:");
            if (pos != std::string::npos) {
                data.schema = line.substr(pos + 7);
                while (!data.schema.empty() && data.schema.front() == ' ')
                    data.schema.erase(data.schema.begin());
            }
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!header_seen) {
            data.columns = std::move(cells);
            header_seen = true;
        } else {
            data.rows.push_back(std::move(cells));
        }
    }
    return data;
}

inline Table moment_series_table(const MomentSeries& ms) {
    Table t;
    t.schema = "kerr.moments.v1";
    t.columns = {"t",       "mean_re", "mean_im", "stderr_re", "stderr_im",
                 "prod_re", "prod_im", "n_alive"};
    for (std::size_t r = 0; r < ms.n_times(); ++r)
        t.add_row({ms.times[r], ms.mean_alpha[r].real(), ms.mean_alpha[r].imag(),
                   ms.stderr_re[r], ms.stderr_im[r], ms.mean_prod[r].real(),
                   ms.mean_prod[r].imag(), ms.n_alive[r]});
    return t;
}

/// Moment series plus the two analytic overlay curves (the fixed-beta
/// stochastic average of the chosen representation and the exact expectation)
/// evaluated on the same time grid.
inline Table moment_series_table_with_overlay(const MomentSeries& ms, const complex& beta,
                                              double mu, int representation_sign = +1) {
    Table t;
    t.schema = "kerr.moments.overlay.v1";
    t.columns = {"t",       "mean_re", "mean_im",    "stderr_re",  "stderr_im", "prod_re",
                 "prod_im", "n_alive", "resummed_re", "resummed_im", "exact_re",  "exact_im"};
    for (std::size_t r = 0; r < ms.n_times(); ++r) {
        const complex resummed = representation_sign > 0
                                     ? stochastic_average_resummed(beta, mu, ms.times[r])
                                     : positive_p_stochastic_average(beta, mu, ms.times[r]);
        const complex exact = mean_a_exact(beta, mu, ms.times[r]);
        t.add_row({ms.times[r], ms.mean_alpha[r].real(), ms.mean_alpha[r].imag(),
                   ms.stderr_re[r], ms.stderr_im[r], ms.mean_prod[r].real(),
                   ms.mean_prod[r].imag(), ms.n_alive[r], resummed.real(), resummed.imag(),
                   exact.real(), exact.imag()});
    }
    return t;
}

inline Table trajectory_table(const Trajectory& traj) {
    Table t;
    t.schema = "kerr.trajectory.v1";
    t.columns = {"t", "alpha_re", "alpha_im", "alpha_plus_re", "alpha_plus_im", "diverged"};
    for (std::size_t i = 0; i < traj.points.size(); ++i) {
        const bool last = i + 1 == traj.points.size();
        t.add_row({traj.times[i], traj.points[i].alpha.real(), traj.points[i].alpha.imag(),
                   traj.points[i].alpha_plus.real(), traj.points[i].alpha_plus.imag(),
                   static_cast<long>(last && traj.divergence_flag ? 1 : 0)});
    }
    return t;
}

inline Table noise_table(const NoisePath& path) {
    Table t;
    t.schema = "kerr.noise.v1";
    t.columns = {"step", "eta_re", "eta_im", "eta_plus_re", "eta_plus_im"};
    for (std::size_t l = 0; l < path.n_steps(); ++l)
        t.add_row({static_cast<long>(l), path.increments[l].first.real(),
                   path.increments[l].first.imag(), path.increments[l].second.real(),
                   path.increments[l].second.imag()});
    return t;
}

inline Table divergence_table(const std::vector<DivergenceRow>& rows) {
    Table t;
    t.schema = "kerr.divergence.v1";
    t.columns = {"beta_re", "beta_im", "fraction", "median_time"};
    for (const auto& row : rows)
        t.add_row({row.beta.real(), row.beta.imag(), row.fraction_diverged,
                   row.median_divergence_time ? *row.median_divergence_time
                                              : std::numeric_limits<double>::quiet_NaN()});
    return t;
}

inline Table qgrid_table(const QGrid& grid) {
    Table t;
    t.schema = "kerr.qgrid.v1";
    t.columns = {"x", "y", "q"};
    for (int iy = 0; iy < grid.spec.ny; ++iy)
        for (int ix = 0; ix < grid.spec.nx; ++ix)
            t.add_row({grid.x(ix), grid.y(iy), grid.at(ix, iy)});
    return t;
}

// Compact binary Q-grid: fixed little-endian header then row-major doubles.
inline constexpr char qgrid_magic[8] = {'K', 'E', 'R', 'R', 'Q', 'G', 'R', 'D'};

inline void write_qgrid_binary(const std::filesystem::path& path, const QGrid& grid) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file " + path.string());
    out.write(qgrid_magic, 8);
    const std::uint32_t version = 1, nx = static_cast<std::uint32_t>(grid.spec.nx),
                        ny = static_cast<std::uint32_t>(grid.spec.ny);
    char units[16] = "dimensionless";
    out.write(reinterpret_cast<const char*>(&version), 4);
    out.write(reinterpret_cast<const char*>(&nx), 4);
    out.write(reinterpret_cast<const char*>(&ny), 4);
    for (double v : {grid.spec.x_min, grid.spec.x_max, grid.spec.y_min, grid.spec.y_max})
        out.write(reinterpret_cast<const char*>(&v), 8);
    out.write(units, 16);
    out.write(reinterpret_cast<const char*>(grid.values.data()),
              static_cast<std::streamsize>(grid.values.size() * sizeof(double)));
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

inline QGrid read_qgrid_binary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    char magic[8];
    in.read(magic, 8);
    if (!in || std::string(magic, 8) != std::string(qgrid_magic, 8))
        throw std::runtime_error("not a qgrid binary: " + path.string());
    std::uint32_t version, nx, ny;
    in.read(reinterpret_cast<char*>(&version), 4);
    in.read(reinterpret_cast<char*>(&nx), 4);
    in.read(reinterpret_cast<char*>(&ny), 4);
    if (version != 1) throw std::runtime_error("unsupported qgrid version");
    double corners[4];
    for (double& v : corners) in.read(reinterpret_cast<char*>(&v), 8);
    char units[16];
    in.read(units, 16);
    QGrid grid{{corners[0], corners[1], corners[2], corners[3], static_cast<int>(nx),
                static_cast<int>(ny)},
               {}};
    grid.values.resize(static_cast<std::size_t>(nx) * ny);
    in.read(reinterpret_cast<char*>(grid.values.data()),
            static_cast<std::streamsize>(grid.values.size() * sizeof(double)));
    if (!in) throw std::runtime_error("truncated qgrid binary: " + path.string());
    return grid;
}

} // namespace kerr::io
