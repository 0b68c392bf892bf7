#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kerr/analytic.hpp"
#include "kerr/ensemble.hpp"
#include "kerr/fock.hpp"
#include "kerr/io.hpp"
#include "kerr/langevin_fp.hpp"
#include "kerr/qfunction.hpp"
#include "kerr/sde.hpp"
#include "kerr/version.hpp"

namespace kerr::cli {

/// A failure of the numerical work itself (as opposed to configuration).
struct science_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr int exit_ok = 0;
inline constexpr int exit_config_error = 2;
inline constexpr int exit_science_error = 3;

/// Fully resolved invocation. String-typed fields hold the command-line
/// spelling; parse/validation happens in resolve_* helpers below.
struct RunConfig {
    std::string command;

    // model
    double mu = 1.0;
    std::string representation = "q";  // q | positive-p

    // ensemble
    long n_traj = 50000;
    std::string init = "fixed";  // fixed | q0 | delta-pp
    std::string beta = "0.001+0.1i";
    std::string alpha0 = "1+0i";
    double t_final = 1.0;
    double dt = 1e-4;
    long record_stride = 100;
    double divergence_threshold = default_divergence_threshold;
    std::uint64_t seed = 42;
    std::string integrator = "heun";  // heun | exact
    int threads = 0;
    long dump_trajectories = 0;
    long dump_noise = 0;

    // analytic
    std::string times = "0:0.01:6.3";

    // qgrid
    std::vector<double> grid_times{std::numbers::pi / 2.0};
    double extent = 0.0;  // 0 = auto: |alpha0| + 4
    int resolution = 256;

    // fpcheck
    long n_points = 100;

    // diverge
    std::vector<std::string> betas{"0.5+0i", "1+0i", "2+0i"};

    // output
    std::string out_dir = "kerr-out";
    std::string format = "csv";  // csv | json-lines

    int representation_sign() const { return representation == "positive-p" ? -1 : +1; }
    io::TableFormat table_format() const {
        return format == "json-lines" ? io::TableFormat::json_lines : io::TableFormat::csv;
    }
    KerrModel model() const { return KerrModel{mu, representation_sign()}; }

    InitialMode initial_mode() const {
        if (init == "fixed") return InitialMode::fixed(parse_complex(beta));
        if (init == "q0") return InitialMode::q0(parse_complex(alpha0));
        if (init == "delta-pp") return InitialMode::delta_pp(parse_complex(alpha0));
        throw std::invalid_argument("init must be one of fixed|q0|delta-pp");
    }

    EnsembleConfig ensemble_config() const {
        EnsembleConfig ec;
        ec.n_trajectories = n_traj;
        ec.initial = initial_mode();
        ec.t_final = t_final;
        ec.dt = dt;
        ec.record_stride = record_stride;
        ec.divergence_threshold = divergence_threshold;
        ec.master_seed = seed;
        ec.integrator = integrator == "exact" ? IntegratorKind::pathwise_exact
                                              : IntegratorKind::heun;
        ec.n_threads = threads;
        return ec;
    }
};

namespace detail {

/// Files created by the current run; removed again if the run fails partway.
class OutputTracker {
public:
    explicit OutputTracker(std::filesystem::path dir) : dir_(std::move(dir)) {
        std::filesystem::create_directories(dir_);
    }
    std::filesystem::path path(const std::string& name) {
        created_.push_back(dir_ / name);
        return created_.back();
    }
    const std::vector<std::filesystem::path>& created() const { return created_; }
    void discard_all() {
        std::error_code ec;
        for (const auto& p : created_) std::filesystem::remove(p, ec);
    }

private:
    std::filesystem::path dir_;
    std::vector<std::filesystem::path> created_;
};

inline std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Every option of the chosen command with its final (resolved) value, in
/// `--opt=value` form so the vector re-parses to an identical run.
inline std::vector<std::string> resolved_argv(const RunConfig& cfg) {
    std::vector<std::string> argv{cfg.command};
    auto add = [&](const std::string& name, const std::string& value) {
        argv.push_back("--" + name + "=" + value);
    };
    auto addd = [&](const std::string& name, double v) { add(name, fmt_double(v)); };
    auto addl = [&](const std::string& name, long v) { add(name, std::to_string(v)); };

    add("mu", fmt_double(cfg.mu));
    add("representation", cfg.representation);
    const bool ensemble = cfg.command == "simulate" || cfg.command == "compare";
    if (ensemble) {
        addl("n-traj", cfg.n_traj);
        add("init", cfg.init);
        add("beta", cfg.beta);
        addd("t-final", cfg.t_final);
        addd("dt", cfg.dt);
        addl("record-stride", cfg.record_stride);
        addd("divergence-threshold", cfg.divergence_threshold);
        add("integrator", cfg.integrator);
        addl("threads", cfg.threads);
    }
    if (ensemble || cfg.command == "analytic" || cfg.command == "qgrid")
        add("alpha0", cfg.alpha0);
    if (cfg.command == "simulate") {
        addl("dump-trajectories", cfg.dump_trajectories);
        addl("dump-noise", cfg.dump_noise);
    }
    if (cfg.command == "analytic") add("times", cfg.times);
    if (cfg.command == "qgrid") {
        for (double t : cfg.grid_times) add("t", fmt_double(t));
        addd("extent", cfg.extent);
        addl("res", cfg.resolution);
    }
    if (cfg.command == "fpcheck") addl("n-points", cfg.n_points);
    if (cfg.command == "diverge") {
        for (const auto& b : cfg.betas) add("betas", b);
        addl("n-traj", cfg.n_traj);
        addd("t-final", cfg.t_final);
        addd("dt", cfg.dt);
        addd("divergence-threshold", cfg.divergence_threshold);
        addl("threads", cfg.threads);
    }
    add("out-dir", cfg.out_dir);
    add("format", cfg.format);
    add("seed", std::to_string(cfg.seed));
    return argv;
}

} // namespace detail

int dispatch(const RunConfig& cfg, detail::OutputTracker& out);

/// Parse arguments (argv[0] excluded), run the requested command, write its
/// artifacts, and return the process exit code.
inline int run_cli(std::vector<std::string> args, std::ostream& err = std::cerr) {
    RunConfig cfg;
    CLI::App app{"Stochastic and analytic toolkit for the Kerr anharmonic oscillator"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read options from a key=value file (flags take precedence)");
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.set_version_flag("--version", std::string(version_string));

    auto add_output = [&](CLI::App* cmd) {
        cmd->add_option("--out-dir", cfg.out_dir, "Output directory")->capture_default_str();
        cmd->add_option("--format", cfg.format, "Output format")
            ->check(CLI::IsMember({"csv", "json-lines"}))
            ->capture_default_str();
        cmd->add_option("--seed", cfg.seed, "Master seed")->capture_default_str();
    };
    auto add_model = [&](CLI::App* cmd) {
        cmd->add_option("--mu", cfg.mu, "Nonlinearity strength")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        cmd->add_option("--representation", cfg.representation, "Phase-space representation")
            ->check(CLI::IsMember({"q", "positive-p"}))
            ->capture_default_str();
    };
    auto add_ensemble = [&](CLI::App* cmd) {
        cmd->add_option("--n-traj", cfg.n_traj, "Number of trajectories")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        cmd->add_option("--init", cfg.init, "Initial-condition mode")
            ->check(CLI::IsMember({"fixed", "q0", "delta-pp"}))
            ->capture_default_str();
        cmd->add_option("--beta", cfg.beta, "Fixed initial amplitude (a+bi)")
            ->capture_default_str();
        cmd->add_option("--t-final", cfg.t_final, "End time")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        cmd->add_option("--dt", cfg.dt, "Step size")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        cmd->add_option("--record-stride", cfg.record_stride, "Record every k-th step")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        cmd->add_option("--divergence-threshold", cfg.divergence_threshold,
                        "|alpha| treated as divergent")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        cmd->add_option("--integrator", cfg.integrator, "Stepping scheme")
            ->check(CLI::IsMember({"heun", "exact"}))
            ->capture_default_str();
        cmd->add_option("--threads", cfg.threads, "Worker threads (0 = auto)")
            ->capture_default_str();
    };
    auto add_alpha0 = [&](CLI::App* cmd) {
        cmd->add_option("--alpha0", cfg.alpha0, "Coherent-state amplitude (a+bi)")
            ->capture_default_str();
    };

    CLI::App* simulate = app.add_subcommand("simulate", "Run a trajectory ensemble");
    add_model(simulate);
    add_ensemble(simulate);
    add_alpha0(simulate);
    add_output(simulate);
    simulate->add_option("--dump-trajectories", cfg.dump_trajectories,
                         "Also dump the first N trajectories")
        ->capture_default_str();
    simulate->add_option("--dump-noise", cfg.dump_noise, "Also dump the first N noise paths")
        ->capture_default_str();

    CLI::App* analytic = app.add_subcommand("analytic", "Closed-form expectation-value curves");
    add_model(analytic);
    add_alpha0(analytic);
    analytic->add_option("--times", cfg.times, "Time grid start:step:stop")
        ->capture_default_str();
    add_output(analytic);

    CLI::App* compare = app.add_subcommand("compare", "Averaging-order experiment");
    add_model(compare);
    add_ensemble(compare);
    add_alpha0(compare);
    add_output(compare);

    CLI::App* fpcheck = app.add_subcommand("fpcheck", "Langevin->Fokker-Planck round trip");
    add_model(fpcheck);
    fpcheck->add_option("--n-points", cfg.n_points, "Number of sample phase points")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    add_output(fpcheck);

    CLI::App* qgrid = app.add_subcommand("qgrid", "Husimi Q function on a grid");
    add_model(qgrid);
    add_alpha0(qgrid);
    qgrid->add_option("--t", cfg.grid_times, "Evaluation time(s)")->capture_default_str();
    qgrid->add_option("--extent", cfg.extent, "Half-width of the grid (0 = auto)")
        ->capture_default_str();
    qgrid->add_option("--res", cfg.resolution, "Nodes per axis")
        ->check(CLI::Range(2, 4096))
        ->capture_default_str();
    add_output(qgrid);

    CLI::App* diverge = app.add_subcommand("diverge", "Divergence-time statistics across beta");
    add_model(diverge);
    diverge->add_option("--betas", cfg.betas, "Initial amplitudes (a+bi)")->capture_default_str();
    diverge->add_option("--n-traj", cfg.n_traj, "Trajectories per beta")
        ->check(CLI::PositiveNumber)
        ->default_val(500l);
    diverge->add_option("--t-final", cfg.t_final, "End time")
        ->check(CLI::PositiveNumber)
        ->default_val(10.0);
    diverge->add_option("--dt", cfg.dt, "Step size")
        ->check(CLI::PositiveNumber)
        ->default_val(1e-3);
    diverge->add_option("--divergence-threshold", cfg.divergence_threshold,
                        "|alpha| treated as divergent")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    diverge->add_option("--threads", cfg.threads, "Worker threads (0 = auto)")
        ->capture_default_str();
    add_output(diverge);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
            return app.exit(e);
        }
        err << "config error: " << e.what() << "\n";
        const CLI::Option* config_opt = app.get_config_ptr();
        const std::string config_file = (config_opt && config_opt->count() > 0)
                                            ? config_opt->as<std::string>()
                                            : std::string{};
        if (!config_file.empty()) {
            // point at the offending config line(s) when the key appears there
            std::ifstream in(config_file);
            std::string line;
            const std::string what = e.what();
            for (int n = 1; std::getline(in, line); ++n) {
                const auto eq = line.find('=');
                if (eq == std::string::npos) continue;
                std::string key = line.substr(0, eq);
                while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
                if (!key.empty() && what.find(key) != std::string::npos)
                    err << "  " << config_file << ":" << n << ": " << line << "\n";
            }
        }
        return exit_config_error;
    }

    cfg.command = app.get_subcommands().front()->get_name();

    std::optional<detail::OutputTracker> out;
    try {
        out.emplace(std::filesystem::path(cfg.out_dir));
        // manifest first: the complete resolved invocation
        nlohmann::json manifest;
        manifest["schema"] = "kerr.manifest.v1";
        manifest["version"] = version_string;
        manifest["command"] = cfg.command;
        manifest["argv_resolved"] = detail::resolved_argv(cfg);
        manifest["seed"] = cfg.seed;

        const int rc = dispatch(cfg, *out);

        std::vector<std::string> names;
        for (const auto& p : out->created()) names.push_back(p.filename().string());
        manifest["outputs"] = names;
        std::ofstream mf(out->path("manifest.json"));
        mf << manifest.dump(2) << "\n";
        if (!mf) throw std::runtime_error("failed to write manifest");
        return rc;
    } catch (const std::invalid_argument& e) {
        if (out) out->discard_all();
        err << "config error: " << e.what() << "\n";
        return exit_config_error;
    } catch (const std::exception& e) {
        if (out) out->discard_all();
        err << "error: " << e.what() << "\n";
        return exit_science_error;
    }
}

namespace detail {

inline std::string data_name(const RunConfig& cfg, const std::string& stem) {
    return stem + (cfg.format == "csv" ? ".csv" : ".jsonl");
}

inline void run_simulate(const RunConfig& cfg, OutputTracker& out) {
    const KerrModel model = cfg.model();
    const EnsembleConfig ec = cfg.ensemble_config();
    const MomentSeries ms = run_ensemble(model, ec);
    const complex overlay_beta = ec.initial.value;
    io::write_table(out.path(data_name(cfg, "moments")),
                    io::moment_series_table_with_overlay(ms, overlay_beta, cfg.mu,
                                                         cfg.representation_sign()),
                    cfg.table_format());
    for (long i = 0; i < cfg.dump_trajectories; ++i) {
        PhiloxStream ic(ec.master_seed, static_cast<std::uint64_t>(i),
                        PhiloxStream::Domain::initial_condition);
        const PhasePoint p0 = sample_initial(ec.initial, ic);
        const NoisePath path = sample_noise_path(
            model.noise_config(ec.dt, ec.master_seed, static_cast<std::uint64_t>(i)),
            static_cast<std::size_t>(ec.n_steps()));
        const Trajectory traj = ec.integrator == IntegratorKind::pathwise_exact
                                    ? pathwise_exact_trajectory(model, p0.alpha, path,
                                                                ec.divergence_threshold)
                                    : integrate_trajectory(model, p0, path,
                                                           ec.divergence_threshold);
        io::write_table(out.path("trajectory_" + std::to_string(i) + ".csv"),
                        io::trajectory_table(traj), io::TableFormat::csv);
    }
    for (long i = 0; i < cfg.dump_noise; ++i) {
        const NoisePath path = sample_noise_path(
            model.noise_config(ec.dt, ec.master_seed, static_cast<std::uint64_t>(i)),
            static_cast<std::size_t>(ec.n_steps()));
        io::write_table(out.path("noise_" + std::to_string(i) + ".csv"), io::noise_table(path),
                        io::TableFormat::csv);
    }
}

inline void run_analytic(const RunConfig& cfg, OutputTracker& out) {
    const complex alpha0 = parse_complex(cfg.alpha0);
    const std::vector<double> grid = parse_time_grid(cfg.times);
    io::Table t;
    t.schema = "kerr.analytic.v1";
    t.columns = {"t",           "exact_re",      "exact_im",     "resummed_re", "resummed_im",
                 "ordered_re",  "ordered_im",    "ordered_terms", "ordered_converged"};
    for (double tt : grid) {
        const complex exact = mean_a_exact(alpha0, cfg.mu, tt);
        const complex resummed = stochastic_average_resummed(alpha0, cfg.mu, tt);
        const MomentFormulaResult ordered = ordered_double_average(alpha0, cfg.mu, tt);
        if (!ordered.converged)
            throw science_error("ordered series did not converge at t=" + std::to_string(tt) +
                                ": " + ordered.divergent_reason.value_or("unknown"));
        t.add_row({tt, exact.real(), exact.imag(), resummed.real(), resummed.imag(),
                   ordered.value.real(), ordered.value.imag(),
                   static_cast<long>(ordered.series_terms_used),
                   static_cast<long>(ordered.converged ? 1 : 0)});
    }
    io::write_table(out.path(data_name(cfg, "analytic")), t, cfg.table_format());
}

inline void run_compare(const RunConfig& cfg, OutputTracker& out) {
    const complex alpha0 = parse_complex(cfg.alpha0);
    EnsembleConfig ec = cfg.ensemble_config();
    const AveragingOrderReport rep = averaging_order_experiment(alpha0, cfg.mu, ec);

    io::Table a = io::moment_series_table_with_overlay(rep.fixed_beta, alpha0, cfg.mu);
    a.schema = "kerr.compare.fixed.v1";
    a.columns.push_back("z_vs_resummed");
    for (std::size_t r = 0; r < a.rows.size(); ++r) a.rows[r].push_back(rep.fixed_beta_z[r]);
    io::write_table(out.path(data_name(cfg, "compare_fixed_beta")), a, cfg.table_format());

    io::Table b = io::moment_series_table_with_overlay(rep.q0_sampled, alpha0, cfg.mu);
    b.schema = "kerr.compare.q0.v1";
    io::write_table(out.path(data_name(cfg, "compare_q0_sampled")), b, cfg.table_format());

    nlohmann::json rj;
    rj["schema"] = "kerr.compare.v1";
    rj["q0_divergence_fraction"] = rep.q0_divergence_fraction;
    if (rep.q0_blow_up_time) rj["q0_blow_up_time"] = *rep.q0_blow_up_time;
    rj["ordered_vs_exact_max"] = rep.ordered_vs_exact_max;
    std::ofstream rf(out.path("compare_report.json"));
    rf << rj.dump(2) << "\n";
    if (!rf) throw std::runtime_error("failed to write compare report");
}

inline void run_fpcheck(const RunConfig& cfg, OutputTracker& out) {
    const KerrModel model = cfg.model();
    const FPCoefficients got = fp_from_langevin(kerr_langevin(model));
    const FPCoefficients ref = kerr_fp_reference(model);

    PhiloxStream rng(cfg.seed, 0);
    io::Table t;
    t.schema = "kerr.fpcheck.v1";
    t.columns = {"alpha_re", "alpha_im", "alpha_plus_re", "alpha_plus_im", "residual",
                 "diffusion"};
    double max_residual = 0.0;
    bool all_negative = true;
    for (long i = 0; i < cfg.n_points; ++i) {
        const auto [x1, y1] = rng.next_gaussian_pair();
        const auto [x2, y2] = rng.next_gaussian_pair();
        const PhasePoint p{complex{x1, y1}, complex{x2, y2}};
        const double res = fp_roundtrip_residual(got, ref, p);
        max_residual = std::max(max_residual, res);
        const auto rep = negative_diffusion_check(got, {p});
        const char* cls = rep.samples[0].cls == DiffusionClass::negative   ? "negative"
                          : rep.samples[0].cls == DiffusionClass::positive ? "positive"
                                                                           : "boundary";
        if (rep.samples[0].cls != DiffusionClass::negative) all_negative = false;
        t.add_row({p.alpha.real(), p.alpha.imag(), p.alpha_plus.real(), p.alpha_plus.imag(), res,
                   std::string(cls)});
    }
    io::write_table(out.path(data_name(cfg, "fpcheck")), t, cfg.table_format());
    nlohmann::json sj;
    sj["schema"] = "kerr.fpcheck.summary.v1";
    sj["max_residual"] = max_residual;
    sj["negative_diffusion_everywhere"] = all_negative;
    std::ofstream sf(out.path("fpcheck_summary.json"));
    sf << sj.dump(2) << "\n";
    if (!sf) throw std::runtime_error("failed to write fpcheck summary");
}

inline void run_qgrid(const RunConfig& cfg, OutputTracker& out) {
    const complex alpha0 = parse_complex(cfg.alpha0);
    const double extent = cfg.extent > 0.0 ? cfg.extent : std::abs(alpha0) + 4.0;
    for (std::size_t k = 0; k < cfg.grid_times.size(); ++k) {
        FockVector psi;
        try {
            psi = fock_evolve(alpha0, cfg.mu, cfg.grid_times[k]);
        } catch (const std::invalid_argument& e) {
            throw science_error(e.what());
        }
        const QGrid grid = q_function(psi, GridSpec::centered(extent, cfg.resolution));
        const std::string stem = "qgrid_" + std::to_string(k);
        io::write_table(out.path(data_name(cfg, stem)), io::qgrid_table(grid),
                        cfg.table_format());
        io::write_qgrid_binary(out.path(stem + ".bin"), grid);
    }
}

inline void run_diverge(const RunConfig& cfg, OutputTracker& out) {
    std::vector<complex> betas;
    for (const auto& s : cfg.betas) betas.push_back(parse_complex(s));
    EnsembleConfig ec = cfg.ensemble_config();
    ec.record_stride = std::max<long>(1, ec.n_steps());  // only divergence times are needed
    const auto rows = divergence_statistics(cfg.model(), betas, ec);
    io::write_table(out.path(data_name(cfg, "diverge")), io::divergence_table(rows),
                    cfg.table_format());
}

} // namespace detail

inline int dispatch(const RunConfig& cfg, detail::OutputTracker& out) {
    if (cfg.command == "simulate") detail::run_simulate(cfg, out);
    else if (cfg.command == "analytic") detail::run_analytic(cfg, out);
    else if (cfg.command == "compare") detail::run_compare(cfg, out);
    else if (cfg.command == "fpcheck") detail::run_fpcheck(cfg, out);
    else if (cfg.command == "qgrid") detail::run_qgrid(cfg, out);
    else if (cfg.command == "diverge") detail::run_diverge(cfg, out);
    else throw std::invalid_argument("unknown command " + cfg.command);
    return exit_ok;
}

} // namespace kerr::cli
