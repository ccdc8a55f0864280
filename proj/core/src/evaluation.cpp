#include "gsdsce/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <thread>

#include "gsdsce/error.hpp"

namespace gsdsce::eval {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t integer_sqrt(std::size_t n) {
    auto r = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

double mean(std::span<const double> v) {
    double acc = 0.0;
    for (const double x : v) acc += x;
    return acc / static_cast<double>(v.size());
}

std::vector<double> gather(std::span<const TrialRecord> records, double TrialRecord::*field) {
    std::vector<double> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(r.*field);
    return out;
}

}  // namespace

const char* to_string(Method m) noexcept {
    switch (m) {
        case Method::gsd: return "gsd";
        case Method::omp: return "omp";
        case Method::cubic: return "cubic";
        case Method::perfect: return "perfect";
    }
    return "unknown";
}

std::optional<Method> method_from_string(std::string_view name) noexcept {
    for (const Method m : {Method::gsd, Method::omp, Method::cubic, Method::perfect}) {
        if (name == to_string(m)) return m;
    }
    return std::nullopt;
}

double nmse(std::span<const cplx> h, std::span<const cplx> h_hat, NmseNormalization norm) {
    if (h.size() != h_hat.size()) {
        throw Error(ErrorKind::dimension, "NMSE operands differ in length");
    }
    double err = 0.0;
    double ref = 0.0;
    for (std::size_t n = 0; n < h.size(); ++n) {
        err += std::norm(h[n] - h_hat[n]);
        ref += std::norm(norm == NmseNormalization::estimate ? h_hat[n] : h[n]);
    }
    if (!(ref > 0.0)) {
        throw Error(ErrorKind::undefined_metric, "NMSE undefined for a zero-norm reference");
    }
    return err / ref;
}

QamConstellation::QamConstellation(std::size_t order) : order_(order), side_(integer_sqrt(order)) {
    if (order < 4 || side_ * side_ != order || side_ % 2 != 0) {
        throw Error(ErrorKind::invalid_argument,
                    "QAM order must be an even-sided square, got " + std::to_string(order));
    }
    scale_ = std::sqrt(3.0 / (2.0 * (static_cast<double>(order) - 1.0)));
}

cplx QamConstellation::point(std::size_t index) const noexcept {
    const auto level = [&](std::size_t i) {
        return (2.0 * static_cast<double>(i) - static_cast<double>(side_ - 1)) * scale_;
    };
    return {level(index % side_), level(index / side_)};
}

std::size_t QamConstellation::demap(cplx z) const noexcept {
    const auto axis = [&](double v) -> std::size_t {
        const double idx = std::round((v / scale_ + static_cast<double>(side_ - 1)) / 2.0);
        if (!(idx > 0.0)) return 0;
        if (idx >= static_cast<double>(side_ - 1)) return side_ - 1;
        return static_cast<std::size_t>(idx);
    };
    return axis(z.real()) + side_ * axis(z.imag());
}

double ser(std::span<const cplx> h, std::span<const cplx> h_hat, const OfdmConfig& cfg, Rng& rng,
           std::size_t n_symbols) {
    if (n_symbols < 1) throw Error(ErrorKind::invalid_argument, "SER needs at least one symbol");
    if (h.size() != cfg.n_subcarriers || h_hat.size() != cfg.n_subcarriers) {
        throw Error(ErrorKind::dimension, "CFR length does not match the configuration");
    }
    std::vector<std::size_t> data_bins;
    for (std::size_t n = 0; n < cfg.n_subcarriers; ++n) {
        if (n % cfg.pilot_spacing != 0) data_bins.push_back(n);
    }
    if (data_bins.empty()) data_bins.push_back(0);

    const QamConstellation qam(cfg.modulation_order);
    std::size_t errors = 0;
    for (std::size_t i = 0; i < n_symbols; ++i) {
        const std::size_t bin = data_bins[i % data_bins.size()];
        const std::size_t sent = rng.below(qam.order());
        const cplx received = qam.point(sent) * h[bin];
        if (h_hat[bin] == cplx{}) {
            ++errors;
            continue;
        }
        const cplx equalized = received / h_hat[bin];
        if (!std::isfinite(equalized.real()) || !std::isfinite(equalized.imag()) ||
            qam.demap(equalized) != sent) {
            ++errors;
        }
    }
    return static_cast<double>(errors) / static_cast<double>(n_symbols);
}

double spectral_efficiency(double q, std::size_t pilot_spacing, std::size_t modulation_order) {
    if (!(q >= 0.0 && q <= 1.0)) {
        throw Error(ErrorKind::invalid_argument, "symbol error rate must lie in [0, 1]");
    }
    const double k = static_cast<double>(pilot_spacing);
    return (k - 1.0) / k * (1.0 - q) * std::log2(static_cast<double>(modulation_order));
}

void ExperimentConfig::validate() const {
    cfg.validate();
    dist.validate();
    if (trial_count < 1) throw Error(ErrorKind::invalid_argument, "trial count must be positive");
    if (path_count < 1) throw Error(ErrorKind::invalid_argument, "path count must be positive");
    if (methods.empty()) throw Error(ErrorKind::invalid_argument, "no methods selected");
    if (data_symbols_per_trial < 1) {
        throw Error(ErrorKind::invalid_argument, "data symbol count must be positive");
    }
    const std::size_t l_max = gsd.resolved_l_max(cfg.pilot_count());
    if (l_max < 1 || 2 * l_max + 1 > cfg.pilot_count()) {
        throw Error(ErrorKind::invalid_argument, "GSD l_max exceeds the pilot budget");
    }
}

std::vector<TrialRecord> run_experiment(const ExperimentConfig& ec) {
    ec.validate();
    std::vector<Method> methods = ec.methods;
    std::sort(methods.begin(), methods.end());
    methods.erase(std::unique(methods.begin(), methods.end()), methods.end());

    baselines::OmpOptions omp_opts = ec.omp;
    if (omp_opts.max_iterations == 0) omp_opts.max_iterations = ec.path_count;
    std::optional<baselines::OmpDictionary> dict;
    if (std::find(methods.begin(), methods.end(), Method::omp) != methods.end()) {
        dict.emplace(ec.cfg, omp_opts.grid_size);
    }

    const OfdmConfig& cfg = ec.cfg;
    const CVector zeros(cfg.n_subcarriers);

    auto run_trial = [&](std::size_t trial, std::span<TrialRecord> out) {
        Rng channel_rng = Rng::derive(ec.base_seed, trial, 0);
        const MultipathChannel ch = sample_channel(channel_rng, ec.path_count, ec.dist);
        const PilotObservation s = pilot_observation(ch, cfg);
        const CVector h = cfr(ch, cfg);

        for (std::size_t i = 0; i < methods.size(); ++i) {
            TrialRecord rec;
            rec.trial_index = trial;
            rec.method = methods[i];
            const auto start = std::chrono::steady_clock::now();
            std::optional<CVector> h_hat;
            try {
                switch (methods[i]) {
                    case Method::gsd: h_hat = gsd::estimate(s, cfg, ec.gsd).cfr_hat; break;
                    case Method::omp: h_hat = baselines::omp_estimate(s, cfg, *dict, omp_opts); break;
                    case Method::cubic: h_hat = baselines::cubic_interp_estimate(s, cfg); break;
                    case Method::perfect: h_hat = h; break;
                }
            } catch (const Error&) {
                h_hat.reset();
            }
            if (ec.record_timing) {
                rec.elapsed_s =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            }

            Rng data_rng = Rng::derive(ec.base_seed, trial, 1);
            if (h_hat) {
                try {
                    rec.nmse = nmse(h, *h_hat, ec.nmse_norm);
                } catch (const Error&) {
                    rec.nmse = kInf;
                }
                rec.ser = ser(h, *h_hat, cfg, data_rng, ec.data_symbols_per_trial);
            } else {
                rec.nmse = kInf;
                rec.ser = ser(h, zeros, cfg, data_rng, ec.data_symbols_per_trial);
            }
            rec.error_free = rec.nmse < kErrorFreeThreshold;
            rec.se = spectral_efficiency(rec.ser, cfg.pilot_spacing, cfg.modulation_order);
            out[i] = rec;
        }
    };

    std::vector<TrialRecord> records(ec.trial_count * methods.size());
    const std::size_t workers = std::max<std::size_t>(1, std::min(ec.workers, ec.trial_count));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t t = next++; t < ec.trial_count; t = next++) {
            run_trial(t, std::span(records).subspan(t * methods.size(), methods.size()));
        }
    };
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    return records;
}

std::vector<double> nmse_cdf_grid() {
    std::vector<double> grid;
    for (int i = -56; i <= 8; ++i) grid.push_back(std::pow(10.0, i / 4.0));
    return grid;
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw Error(ErrorKind::invalid_argument, "quantile of an empty sample");
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    if (frac == 0.0 || values[lo] == values[hi]) return values[lo];
    return values[lo] + frac * (values[hi] - values[lo]);
}

std::vector<SummaryRow> summarize(std::span<const TrialRecord> records, const SummaryKey& key,
                                  double error_free_threshold) {
    if (records.empty()) throw Error(ErrorKind::invalid_argument, "cannot summarize no records");
    const auto grid = nmse_cdf_grid();
    std::vector<SummaryRow> rows;
    for (const Method m : {Method::gsd, Method::omp, Method::cubic, Method::perfect}) {
        std::vector<TrialRecord> subset;
        for (const auto& r : records) {
            if (r.method == m) subset.push_back(r);
        }
        if (subset.empty()) continue;
        SummaryRow row;
        row.series = key.series;
        row.sweep_var = key.sweep_var;
        row.sweep_value = key.sweep_value;
        row.method = m;
        row.trials = subset.size();
        const auto nmses = gather(subset, &TrialRecord::nmse);
        row.mean_se = mean(gather(subset, &TrialRecord::se));
        row.mean_ser = mean(gather(subset, &TrialRecord::ser));
        row.mean_nmse = mean(nmses);
        row.median_nmse = quantile(nmses, 0.5);
        row.p10_nmse = quantile(nmses, 0.1);
        row.p90_nmse = quantile(nmses, 0.9);
        const auto free = std::count_if(nmses.begin(), nmses.end(),
                                        [&](double v) { return v < error_free_threshold; });
        row.error_free_fraction = static_cast<double>(free) / static_cast<double>(nmses.size());
        for (const double x : grid) {
            const auto below = std::count_if(nmses.begin(), nmses.end(),
                                             [&](double v) { return v <= x; });
            row.cdf.push_back(static_cast<double>(below) / static_cast<double>(nmses.size()));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_trials_csv(std::ostream& os, std::span<const TrialRecord> records) {
    os << "trial,method,nmse,ser,se,error_free,elapsed_s\n";
    for (const auto& r : records) {
        os << r.trial_index << ',' << to_string(r.method) << ',' << format_double(r.nmse) << ','
           << format_double(r.ser) << ',' << format_double(r.se) << ',' << (r.error_free ? 1 : 0)
           << ',' << format_double(r.elapsed_s) << '\n';
    }
}

void write_summary_csv(std::ostream& os, std::span<const SummaryRow> rows) {
    os << "series,sweep_var,sweep_value,method,trials,mean_se,mean_ser,mean_nmse,median_nmse,"
          "p10_nmse,p90_nmse,error_free_fraction\n";
    for (const auto& r : rows) {
        os << r.series << ',' << r.sweep_var << ',' << format_double(r.sweep_value) << ','
           << to_string(r.method) << ',' << r.trials << ',' << format_double(r.mean_se) << ','
           << format_double(r.mean_ser) << ',' << format_double(r.mean_nmse) << ','
           << format_double(r.median_nmse) << ',' << format_double(r.p10_nmse) << ','
           << format_double(r.p90_nmse) << ',' << format_double(r.error_free_fraction) << '\n';
    }
}

void write_cdf_csv(std::ostream& os, std::span<const SummaryRow> rows) {
    os << "series,sweep_var,sweep_value,method,nmse,cdf\n";
    const auto grid = nmse_cdf_grid();
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < grid.size() && i < r.cdf.size(); ++i) {
            os << r.series << ',' << r.sweep_var << ',' << format_double(r.sweep_value) << ','
               << to_string(r.method) << ',' << format_double(grid[i]) << ','
               << format_double(r.cdf[i]) << '\n';
        }
    }
}

}  // namespace gsdsce::eval
