#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gsdsce/baselines.hpp"
#include "gsdsce/channel_model.hpp"
#include "gsdsce/gsd_estimator.hpp"
#include "gsdsce/random.hpp"

namespace gsdsce::eval {

/// A trial counts as error-free when its NMSE falls below this.
inline constexpr double kErrorFreeThreshold = 1e-8;

enum class Method { gsd, omp, cubic, perfect };

const char* to_string(Method m) noexcept;
std::optional<Method> method_from_string(std::string_view name) noexcept;

/// Normalization of the squared error. `estimate` divides by ||h_hat||^2,
/// `truth` by ||h||^2.
enum class NmseNormalization { estimate, truth };

/// ||h - h_hat||^2 / ||h_hat||^2 by default. Throws ErrorKind::undefined_metric
/// when the normalizing vector is zero and ErrorKind::dimension on a length
/// mismatch.
double nmse(std::span<const cplx> h, std::span<const cplx> h_hat,
            NmseNormalization norm = NmseNormalization::estimate);

/// Square M-QAM with unit average energy; symbol i maps to (I, Q) levels
/// (i % m, i / m) with m = sqrt(M).
class QamConstellation {
public:
    explicit QamConstellation(std::size_t order);

    std::size_t order() const noexcept { return order_; }
    std::size_t side() const noexcept { return side_; }
    cplx point(std::size_t index) const noexcept;
    /// Index of the nearest constellation point.
    std::size_t demap(cplx z) const noexcept;

private:
    std::size_t order_;
    std::size_t side_;
    double scale_;
};

/// Symbol error rate of noiseless one-tap equalization with h_hat. Symbols are
/// placed on non-pilot subcarriers, cycling when n_symbols exceeds them.
double ser(std::span<const cplx> h, std::span<const cplx> h_hat, const OfdmConfig& cfg, Rng& rng,
           std::size_t n_symbols);

/// (K-1)/K * (1-q) * log2(M).
double spectral_efficiency(double q, std::size_t pilot_spacing, std::size_t modulation_order);

struct TrialRecord {
    std::size_t trial_index = 0;
    Method method = Method::gsd;
    double nmse = 0.0;
    double ser = 0.0;
    double se = 0.0;
    bool error_free = false;
    double elapsed_s = 0.0;
};

struct ExperimentConfig {
    std::uint64_t base_seed = 20190107;
    std::size_t trial_count = 5000;
    OfdmConfig cfg;
    std::size_t path_count = 4;
    DelayDistribution dist;
    std::vector<Method> methods{Method::gsd, Method::omp, Method::cubic, Method::perfect};
    std::size_t data_symbols_per_trial = 330;
    gsd::GsdOptions gsd;
    /// max_iterations = 0 uses the true path count.
    baselines::OmpOptions omp{5000, 0, 1e-8};
    NmseNormalization nmse_norm = NmseNormalization::estimate;
    std::size_t workers = 1;
    /// Wall-clock timing makes records non-reproducible; off writes 0.
    bool record_timing = false;

    void validate() const;
};

/// Runs every trial; records come back ordered by (trial_index, method)
/// whatever the worker count. Estimator failures are recorded as
/// nmse = +inf, error_free = false, with SER from an all-zero estimate.
std::vector<TrialRecord> run_experiment(const ExperimentConfig& ec);

/// Fixed log-spaced NMSE grid, 1e-14 .. 1e2, four points per decade.
std::vector<double> nmse_cdf_grid();

struct SummaryRow {
    std::string series;
    std::string sweep_var;
    double sweep_value = 0.0;
    Method method = Method::gsd;
    std::size_t trials = 0;
    double mean_se = 0.0;
    double mean_ser = 0.0;
    double mean_nmse = 0.0;
    double median_nmse = 0.0;
    double p10_nmse = 0.0;
    double p90_nmse = 0.0;
    double error_free_fraction = 0.0;
    std::vector<double> cdf;  // on nmse_cdf_grid()
};

struct SummaryKey {
    std::string series;
    std::string sweep_var;
    double sweep_value = 0.0;
};

/// One row per method present, in method order. Throws
/// ErrorKind::invalid_argument on empty input.
std::vector<SummaryRow> summarize(std::span<const TrialRecord> records, const SummaryKey& key = {},
                                  double error_free_threshold = kErrorFreeThreshold);

/// Linear-interpolation quantile of an unsorted sample.
double quantile(std::vector<double> values, double q);

/// Header: trial,method,nmse,ser,se,error_free,elapsed_s
void write_trials_csv(std::ostream& os, std::span<const TrialRecord> records);
void write_summary_csv(std::ostream& os, std::span<const SummaryRow> rows);
void write_cdf_csv(std::ostream& os, std::span<const SummaryRow> rows);

/// Shortest round-trip representation; "inf" for +infinity.
std::string format_double(double v);

}  // namespace gsdsce::eval
