#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "gsdsce/evaluation.hpp"
#include "gsdsce/gsd_estimator.hpp"
#include "gsdsce/version.hpp"
#include "run_config.hpp"
#include "svg_plot.hpp"

namespace gsdsce::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

struct CommonArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir = "gsdsce_out";
};

struct EstimateArgs {
    std::string channel_path;
    std::optional<std::size_t> paths;
    bool include_cfr = false;
};

struct ExperimentArgs {
    std::string preset = "custom";
    std::optional<std::size_t> trials;
    std::size_t workers = 1;
    bool plot = false;
    bool timing = false;
    std::string nmse_norm = "estimate";
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::invalid_argument, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw Error(ErrorKind::invalid_argument, "cannot write '" + path.string() + "'");
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw Error(ErrorKind::invalid_argument, "cannot create output directory '" + dir.string() + "'");
    }
}

ConfigFile file_and_flags(const CommonArgs& common, std::optional<std::size_t> trials) {
    ConfigFile cf;
    if (!common.config_path.empty()) cf = load_config(common.config_path);
    ConfigFile flags;
    flags.seed = common.seed;
    flags.trials = trials;
    return merge(cf, flags);
}

// Console output only; files keep full precision.
std::string brief(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string complex_text(cplx z) {
    return brief(z.real()) + (std::signbit(z.imag()) ? "-" : "+") + brief(std::abs(z.imag())) + "j";
}

ordered_json real_json(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

ordered_json config_json(const eval::ExperimentConfig& ec) {
    ordered_json methods = ordered_json::array();
    for (const auto m : ec.methods) methods.push_back(eval::to_string(m));
    return {
        {"n_subcarriers", ec.cfg.n_subcarriers},
        {"delta_f_hz", ec.cfg.subcarrier_spacing_hz},
        {"pilot_spacing", ec.cfg.pilot_spacing},
        {"pilot_symbol", {ec.cfg.pilot_symbol.real(), ec.cfg.pilot_symbol.imag()}},
        {"modulation_order", ec.cfg.modulation_order},
        {"path_count", ec.path_count},
        {"rate_inv_s", 1.0 / ec.dist.rate_per_s},
        {"tau_max_s", real_json(ec.dist.tau_max_s)},
        {"trials", ec.trial_count},
        {"seed", ec.base_seed},
        {"methods", methods},
        {"data_symbols_per_trial", ec.data_symbols_per_trial},
        {"nmse_normalization", ec.nmse_norm == eval::NmseNormalization::estimate ? "estimate" : "truth"},
        {"gsd",
         {{"l_max", ec.gsd.l_max},
          {"eps_geo", ec.gsd.eps_geo},
          {"eps_geo_max", ec.gsd.eps_geo_max},
          {"eps_zero", ec.gsd.eps_zero},
          {"normalize_input", ec.gsd.normalize_input}}},
        {"omp",
         {{"grid_size", ec.omp.grid_size},
          {"max_iterations", ec.omp.max_iterations},
          {"residual_threshold", ec.omp.residual_threshold}}},
    };
}

int cmd_estimate(const CommonArgs& common, const EstimateArgs& args, std::ostream& out) {
    eval::ExperimentConfig ec;
    ConfigFile cf = file_and_flags(common, std::nullopt);
    if (args.paths) cf.path_count = args.paths;
    apply(cf, ec);
    ec.cfg.validate();
    ec.dist.validate();

    // Without a channel file the channel matches trial 0 of an experiment
    // with the same seed.
    const MultipathChannel ch = args.channel_path.empty()
                                    ? [&] {
                                          Rng rng = Rng::derive(ec.base_seed, 0, 0);
                                          return sample_channel(rng, ec.path_count, ec.dist);
                                      }()
                                    : channel_from_json(read_file(args.channel_path));

    const auto est = gsd::estimate(pilot_observation(ch, ec.cfg), ec.cfg, ec.gsd);
    const double err = eval::nmse(cfr(ch, ec.cfg), est.cfr_hat);

    out << "detected paths: " << est.detected_paths << " (true " << ch.path_count() << ")\n";
    for (std::size_t l = 0; l < est.detected_paths; ++l) {
        out << "path " << l << ": gain " << complex_text(est.gains_hat[l]) << " delay_s "
            << brief(est.delays_hat_s[l]) << "\n";
    }
    out << "nmse: " << brief(err) << "\n";

    ensure_dir(common.out_dir);
    const fs::path path = fs::path(common.out_dir) / "estimate.json";
    write_file(path, gsd::estimate_to_json(est, args.include_cfr));
    out << "wrote " << path.string() << "\n";
    return kExitOk;
}

std::string point_file(std::size_t index) {
    std::ostringstream os;
    os << "trials_" << std::setw(2) << std::setfill('0') << index << ".csv";
    return os.str();
}

std::string method_label(const std::string& series, eval::Method m, bool multi_series) {
    return multi_series ? series + " " + eval::to_string(m) : std::string(eval::to_string(m));
}

void write_plots(Preset preset, const std::vector<eval::SummaryRow>& rows, const fs::path& dir) {
    const bool sweep = preset == Preset::fig1 || preset == Preset::fig2;
    std::map<std::string, std::size_t> series_count;
    for (const auto& r : rows) series_count[r.series] += 1;
    const bool multi = series_count.size() > 1;

    if (sweep) {
        PlotSpec spec;
        spec.title = preset == Preset::fig1 ? "SE versus tau_max" : "SE versus pilot density";
        spec.x_label = preset == Preset::fig1 ? "tau_max (us)" : "rho = 1/K";
        spec.y_label = "spectral efficiency (bit/s/Hz)";
        std::map<std::string, PlotSeries> by_label;
        std::vector<std::string> order;
        for (const auto& r : rows) {
            const auto label = method_label(r.series, r.method, multi);
            if (!by_label.count(label)) {
                order.push_back(label);
                by_label[label].label = label;
            }
            by_label[label].x.push_back(preset == Preset::fig1 ? r.sweep_value * 1e6 : r.sweep_value);
            by_label[label].y.push_back(r.mean_se);
        }
        for (const auto& label : order) spec.series.push_back(by_label[label]);
        write_file(dir / "se.svg", render_svg(spec));
    }

    PlotSpec cdf;
    cdf.title = "CDF of NMSE";
    cdf.x_label = "NMSE";
    cdf.y_label = "empirical CDF";
    cdf.log_x = true;
    const auto grid = eval::nmse_cdf_grid();
    for (const auto& r : rows) {
        // Sweeps would give one curve per point; keep CDFs for the fixed presets.
        if (sweep) break;
        PlotSeries s;
        s.label = r.sweep_var == "path_count"
                      ? "L=" + eval::format_double(r.sweep_value) + " " + eval::to_string(r.method)
                      : std::string(eval::to_string(r.method));
        s.x = grid;
        s.y = r.cdf;
        cdf.series.push_back(std::move(s));
    }
    if (!sweep) write_file(dir / "nmse_cdf.svg", render_svg(cdf));
}

int cmd_experiment(const CommonArgs& common, const ExperimentArgs& args, std::ostream& out,
                   std::ostream& err) {
    const auto preset = preset_from_string(args.preset);
    if (!preset) {
        err << "error: unknown preset '" << args.preset << "' (expected fig1, fig2, fig3 or custom)\n";
        return kExitUsage;
    }
    eval::NmseNormalization norm;
    if (args.nmse_norm == "estimate") norm = eval::NmseNormalization::estimate;
    else if (args.nmse_norm == "truth") norm = eval::NmseNormalization::truth;
    else {
        err << "error: --nmse-norm must be 'estimate' or 'truth'\n";
        return kExitUsage;
    }

    auto points = expand_preset(*preset, file_and_flags(common, args.trials));
    const fs::path dir(common.out_dir);
    ensure_dir(dir);

    ordered_json manifest{{"tool", "gsdsce"},
                          {"version", kVersion},
                          {"preset", to_string(*preset)},
                          {"seed", points.front().config.base_seed},
                          {"trials", points.front().config.trial_count},
                          {"record_timing", args.timing},
                          {"points", ordered_json::array()}};

    std::vector<eval::SummaryRow> rows;
    for (std::size_t i = 0; i < points.size(); ++i) {
        auto& p = points[i];
        p.config.workers = std::max<std::size_t>(1, args.workers);
        p.config.record_timing = args.timing;
        p.config.nmse_norm = norm;
        const auto records = eval::run_experiment(p.config);
        {
            std::ostringstream csv;
            eval::write_trials_csv(csv, records);
            write_file(dir / point_file(i), csv.str());
        }
        const auto summary = eval::summarize(records, {p.series, p.sweep_var, p.sweep_value});
        for (const auto& r : summary) {
            out << p.series << ' ' << p.sweep_var << '=' << brief(p.sweep_value) << ' '
                << eval::to_string(r.method) << ": mean_se " << brief(r.mean_se) << " error_free "
                << brief(r.error_free_fraction) << " median_nmse " << brief(r.median_nmse) << "\n";
        }
        rows.insert(rows.end(), summary.begin(), summary.end());
        manifest["points"].push_back({{"index", i},
                                      {"series", p.series},
                                      {"sweep_var", p.sweep_var},
                                      {"sweep_value", p.sweep_value},
                                      {"trials_csv", point_file(i)},
                                      {"config", config_json(p.config)}});
    }

    std::ostringstream summary_csv;
    eval::write_summary_csv(summary_csv, rows);
    write_file(dir / "summary.csv", summary_csv.str());
    std::ostringstream cdf_csv;
    eval::write_cdf_csv(cdf_csv, rows);
    write_file(dir / "cdf.csv", cdf_csv.str());
    if (args.plot) write_plots(*preset, rows, dir);
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
    out << "wrote " << points.size() << " point(s) to " << dir.string() << "\n";
    return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"GSD-SCE sparse OFDM channel estimation"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    CommonArgs common;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", common.config_path, "flat key = value config file");
        sub->add_option("--seed", common.seed, "base seed (default 20190107)");
        sub->add_option("--out-dir", common.out_dir, "output directory")->capture_default_str();
    };

    EstimateArgs est;
    auto* estimate = app.add_subcommand("estimate", "estimate one channel and report the result");
    add_common(estimate);
    estimate->add_option("--channel", est.channel_path, "channel JSON file; otherwise one is drawn");
    estimate->add_option("--paths", est.paths, "path count for a drawn channel");
    estimate->add_flag("--include-cfr", est.include_cfr, "include the estimated CFR in estimate.json");

    ExperimentArgs exp;
    auto* experiment = app.add_subcommand("experiment", "run a Monte Carlo experiment");
    add_common(experiment);
    experiment->add_option("--preset", exp.preset, "fig1, fig2, fig3 or custom")->capture_default_str();
    experiment->add_option("--trials", exp.trials, "trials per sweep point");
    experiment->add_option("--workers", exp.workers, "worker threads; results do not depend on it")
        ->capture_default_str();
    experiment->add_flag("--plot", exp.plot, "also write SVG charts");
    experiment->add_flag("--timing", exp.timing, "record per-trial wall time (breaks bit-exact reruns)");
    experiment->add_option("--nmse-norm", exp.nmse_norm, "NMSE denominator: estimate or truth")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*estimate) return cmd_estimate(common, est, out);
        return cmd_experiment(common, exp, out, err);
    } catch (const Error& e) {
        err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
    }
    return kExitError;
}

}  // namespace gsdsce::cli
