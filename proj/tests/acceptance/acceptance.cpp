// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "gsdsce/evaluation.hpp"
#include "gsdsce/gsd_estimator.hpp"
#include "properties.hpp"

namespace {

using namespace gsdsce;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kSeed = 20190107;
constexpr double kSeMax = 11.0 / 12.0 * 10.0;

int g_failures = 0;

void report(int id, bool pass, const std::string& detail, double seconds) {
    std::printf("%s criterion %d: %s [%.1f s]\n", pass ? "PASS" : "FAIL", id, detail.c_str(), seconds);
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

class Timer {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

eval::ExperimentConfig gsd_only(std::size_t trials, std::size_t paths, double tau_max) {
    eval::ExperimentConfig ec;
    ec.base_seed = kSeed;
    ec.trial_count = trials;
    ec.path_count = paths;
    ec.dist.tau_max_s = tau_max;
    ec.methods = {eval::Method::gsd};
    return ec;
}

eval::SummaryRow summary_for(const std::vector<eval::TrialRecord>& records, eval::Method m) {
    for (const auto& row : eval::summarize(records)) {
        if (row.method == m) return row;
    }
    return {};
}

void criterion_error_free_regime() {
    Timer t;
    const auto row = summary_for(eval::run_experiment(gsd_only(1000, 4, 1e-6)), eval::Method::gsd);
    const bool pass = row.error_free_fraction >= 0.99 && std::abs(row.mean_se - kSeMax) <= 0.05;
    report(1, pass,
           "L=4 tau_max=1us 1000 trials: error-free " + fmt("%.4f", row.error_free_fraction) +
               " (>= 0.99), mean SE " + fmt("%.4f", row.mean_se) + " (9.1667 +- 0.05)",
           t.seconds());
}

void criterion_p_free_l4() {
    Timer t;
    const auto ec = gsd_only(5000, 4, kInf);
    const double closed = p_free_closed_form(ec.dist, ec.cfg, 4);
    const auto row = summary_for(eval::run_experiment(ec), eval::Method::gsd);
    const bool pass = std::abs(row.error_free_fraction - closed) <= 0.03;
    report(2, pass,
           "L=4 tau_max=inf 5000 trials: empirical " + fmt("%.4f", row.error_free_fraction) +
               ", closed form " + fmt("%.4f", closed) + " (+- 0.03)",
           t.seconds());
}

void criterion_p_free_l8() {
    Timer t;
    const auto ec = gsd_only(5000, 8, kInf);
    const double closed = p_free_closed_form(ec.dist, ec.cfg, 8);
    const auto row = summary_for(eval::run_experiment(ec), eval::Method::gsd);
    const double sigma = std::sqrt(closed * (1.0 - closed) / 5000.0);
    const bool pass = std::abs(closed - 0.59) <= 0.01 && row.error_free_fraction <= closed + 3.0 * sigma;
    report(3, pass,
           "L=8 tau_max=inf 5000 trials: closed form " + fmt("%.4f", closed) + " (0.59 +- 0.01), empirical " +
               fmt("%.4f", row.error_free_fraction) + " (<= " + fmt("%.4f", closed + 3.0 * sigma) + ")",
           t.seconds());
}

void criterion_condition_boundary() {
    Timer t;
    const std::vector<double> taus{0.8e-6, 1.2e-6, 1.389e-6, 1.8e-6, 2.5e-6};
    std::vector<double> fractions;
    for (const double tau : taus) {
        fractions.push_back(
            summary_for(eval::run_experiment(gsd_only(500, 4, tau)), eval::Method::gsd).error_free_fraction);
    }
    bool pass = true;
    std::string detail = "error-free by tau_max:";
    for (std::size_t i = 0; i < taus.size(); ++i) {
        detail += " " + fmt("%.3f", taus[i] * 1e6) + "us=" + fmt("%.3f", fractions[i]);
        if (taus[i] < 1.389e-6 && fractions[i] < 0.99) pass = false;
        if (taus[i] > 1.389e-6 && !(fractions[i] < fractions[i - 1])) pass = false;
    }
    report(4, pass, detail + " (>= 0.99 below 1.389us, strictly decreasing from 1.389us)", t.seconds());
}

void criterion_detection() {
    Timer t;
    const OfdmConfig cfg;
    DelayDistribution dist;
    dist.tau_max_s = 1e-6;
    bool pass = true;
    std::string detail = "correct L-hat over 500 trials, tau_max=1us:";
    for (std::size_t paths = 1; paths <= 6; ++paths) {
        std::size_t correct = 0;
        for (std::size_t trial = 0; trial < 500; ++trial) {
            Rng rng = Rng::derive(kSeed, trial, 0);
            const auto ch = sample_channel(rng, paths, dist);
            try {
                correct += gsd::detect_path_count(pilot_observation(ch, cfg)) == paths;
            } catch (const Error&) {
            }
        }
        detail += " L" + std::to_string(paths) + "=" + std::to_string(correct);
        if (correct != 500) pass = false;
    }
    report(5, pass, detail + " (all 500 required)", t.seconds());
}

void criterion_baseline_ordering() {
    Timer t;
    eval::ExperimentConfig ec;
    ec.base_seed = kSeed;
    ec.trial_count = 500;
    ec.path_count = 4;
    ec.dist.tau_max_s = 1e-6;
    ec.methods = {eval::Method::gsd, eval::Method::omp, eval::Method::cubic};
    const auto records = eval::run_experiment(ec);
    const double gsd = summary_for(records, eval::Method::gsd).median_nmse;
    const double omp = summary_for(records, eval::Method::omp).median_nmse;
    const double cubic = summary_for(records, eval::Method::cubic).median_nmse;
    const bool pass = gsd < 1e-10 && omp > 1e-6 && gsd < omp && gsd < cubic;
    report(6, pass,
           "median NMSE gsd " + fmt("%.3g", gsd) + " (< 1e-10), omp " + fmt("%.3g", omp) + " (> 1e-6), cubic " +
               fmt("%.3g", cubic),
           t.seconds());
}

void criterion_properties() {
    Timer t;
    bool pass = true;
    std::string detail;
    for (const auto& r : testing::run_all_properties(testing::kPropertyCases)) {
        if (!detail.empty()) detail += "; ";
        detail += r.name + " " + std::to_string(r.cases - r.failures) + "/" + std::to_string(r.cases);
        if (!r.passed()) {
            pass = false;
            detail += " (" + r.first_failure + ")";
        }
    }
    report(7, pass, detail, t.seconds());
}

}  // namespace

int main() {
    criterion_error_free_regime();
    criterion_p_free_l4();
    criterion_p_free_l8();
    criterion_condition_boundary();
    criterion_detection();
    criterion_baseline_ordering();
    criterion_properties();
    std::printf("%d of 7 criteria failed\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
