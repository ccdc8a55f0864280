#include "run_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "gsdsce/error.hpp"

namespace gsdsce::cli {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
    throw Error(ErrorKind::parse, "config line " + std::to_string(line) + ": " + what);
}

template <typename T>
T parse_integer(std::string_view v, std::size_t line) {
    T out{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        fail(line, "expected a non-negative integer, got '" + std::string(v) + "'");
    }
    return out;
}

double parse_real(std::string_view v, std::size_t line) {
    if (v == "inf" || v == "infinity") return std::numeric_limits<double>::infinity();
    // g++ 11 has floating from_chars; strtod would accept trailing junk.
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out)) {
        fail(line, "expected a number, got '" + std::string(v) + "'");
    }
    return out;
}

std::vector<eval::Method> parse_methods(std::string_view v, std::size_t line) {
    std::vector<eval::Method> out;
    while (!v.empty()) {
        const auto comma = v.find(',');
        const auto name = trim(v.substr(0, comma));
        const auto m = eval::method_from_string(name);
        if (!m) fail(line, "unknown method '" + std::string(name) + "'");
        out.push_back(*m);
        if (comma == std::string_view::npos) break;
        v.remove_prefix(comma + 1);
    }
    if (out.empty()) fail(line, "methods list is empty");
    return out;
}

template <typename T>
void take(std::optional<T>& dst, const std::optional<T>& src) {
    if (src) dst = src;
}

}  // namespace

ConfigFile parse_config(std::string_view text) {
    ConfigFile cf;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) fail(line_no, "expected key = value");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (value.empty()) fail(line_no, "missing value for '" + std::string(key) + "'");

        if (key == "n_subcarriers") cf.n_subcarriers = parse_integer<std::size_t>(value, line_no);
        else if (key == "delta_f_hz") cf.delta_f_hz = parse_real(value, line_no);
        else if (key == "pilot_spacing") cf.pilot_spacing = parse_integer<std::size_t>(value, line_no);
        else if (key == "modulation_order") cf.modulation_order = parse_integer<std::size_t>(value, line_no);
        else if (key == "path_count") cf.path_count = parse_integer<std::size_t>(value, line_no);
        else if (key == "rate_inv_s") cf.rate_inv_s = parse_real(value, line_no);
        else if (key == "tau_max_s") cf.tau_max_s = parse_real(value, line_no);
        else if (key == "trials") cf.trials = parse_integer<std::size_t>(value, line_no);
        else if (key == "seed") cf.seed = parse_integer<std::uint64_t>(value, line_no);
        else if (key == "methods") cf.methods = parse_methods(value, line_no);
        else fail(line_no, "unknown key '" + std::string(key) + "'");
    }
    return cf;
}

ConfigFile load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::invalid_argument, "cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

ConfigFile merge(const ConfigFile& base, const ConfigFile& over) {
    ConfigFile out = base;
    take(out.n_subcarriers, over.n_subcarriers);
    take(out.delta_f_hz, over.delta_f_hz);
    take(out.pilot_spacing, over.pilot_spacing);
    take(out.modulation_order, over.modulation_order);
    take(out.path_count, over.path_count);
    take(out.rate_inv_s, over.rate_inv_s);
    take(out.tau_max_s, over.tau_max_s);
    take(out.trials, over.trials);
    take(out.seed, over.seed);
    take(out.methods, over.methods);
    return out;
}

void apply(const ConfigFile& f, eval::ExperimentConfig& ec) {
    if (f.n_subcarriers) ec.cfg.n_subcarriers = *f.n_subcarriers;
    if (f.delta_f_hz) ec.cfg.subcarrier_spacing_hz = *f.delta_f_hz;
    if (f.pilot_spacing) ec.cfg.pilot_spacing = *f.pilot_spacing;
    if (f.modulation_order) ec.cfg.modulation_order = *f.modulation_order;
    if (f.path_count) ec.path_count = *f.path_count;
    if (f.rate_inv_s) ec.dist.rate_per_s = 1.0 / *f.rate_inv_s;
    if (f.tau_max_s) ec.dist.tau_max_s = *f.tau_max_s;
    if (f.trials) ec.trial_count = *f.trials;
    if (f.seed) ec.base_seed = *f.seed;
    if (f.methods) ec.methods = *f.methods;
}

std::optional<Preset> preset_from_string(std::string_view name) noexcept {
    if (name == "fig1") return Preset::fig1;
    if (name == "fig2") return Preset::fig2;
    if (name == "fig3") return Preset::fig3;
    if (name == "custom") return Preset::custom;
    return std::nullopt;
}

const char* to_string(Preset p) noexcept {
    switch (p) {
        case Preset::fig1: return "fig1";
        case Preset::fig2: return "fig2";
        case Preset::fig3: return "fig3";
        case Preset::custom: return "custom";
    }
    return "?";
}

std::vector<SweepPoint> expand_preset(Preset preset, const ConfigFile& overrides) {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    eval::ExperimentConfig base;
    apply(overrides, base);

    std::vector<SweepPoint> points;
    switch (preset) {
        case Preset::fig1:
            // Around 1/(K df) = 1.389 us for the default numerology.
            for (const double us : {0.6, 0.8, 1.0, 1.2, 1.389, 1.6, 1.8, 2.0, 2.5, 3.0}) {
                SweepPoint p{"fig1", "tau_max_s", us * 1e-6, base};
                p.config.dist.tau_max_s = p.sweep_value;
                points.push_back(std::move(p));
            }
            break;
        case Preset::fig2:
            // Two series in one preset; rho = 1/K on the x axis.
            for (const double tau : {1e-6, kInf}) {
                const std::string series = std::isinf(tau) ? "fig2_tau_inf" : "fig2_tau_1us";
                for (const std::size_t k : {6u, 8u, 10u, 12u, 13u, 14u, 16u, 18u, 20u, 24u, 30u, 36u}) {
                    SweepPoint p{series, "rho", 1.0 / static_cast<double>(k), base};
                    p.config.cfg.pilot_spacing = k;
                    p.config.dist.tau_max_s = tau;
                    points.push_back(std::move(p));
                }
            }
            break;
        case Preset::fig3:
            for (const std::size_t l : {4u, 8u}) {
                SweepPoint p{"fig3", "path_count", static_cast<double>(l), base};
                p.config.path_count = l;
                p.config.dist.tau_max_s = kInf;
                points.push_back(std::move(p));
            }
            break;
        case Preset::custom:
            points.push_back(SweepPoint{"custom", "none", 0.0, base});
            break;
    }
    for (const auto& p : points) p.config.validate();
    return points;
}

}  // namespace gsdsce::cli
