#include "gsdsce/channel_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include <json.hpp>

#include "gsdsce/error.hpp"

namespace gsdsce {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string delay_text(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

bool is_power_of_four(std::size_t m) {
    if (m < 4) return false;
    while (m % 4 == 0) m /= 4;
    return m == 1;
}

/// exp(-j 2 pi x) with x reduced to [0, 1) first.
cplx unit_phasor(double cycles) {
    const double frac = cycles - std::floor(cycles);
    return std::polar(1.0, -kTwoPi * frac);
}

std::string line_context(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

}  // namespace

void OfdmConfig::validate() const {
    auto fail = [](const std::string& msg) { throw Error(ErrorKind::invalid_argument, msg); };
    if (n_subcarriers < 2) fail("n_subcarriers must be at least 2");
    if (!(subcarrier_spacing_hz > 0.0) || !std::isfinite(subcarrier_spacing_hz)) {
        fail("subcarrier spacing must be positive");
    }
    if (pilot_spacing < 1 || pilot_spacing >= n_subcarriers) {
        fail("pilot spacing must lie in [1, n_subcarriers)");
    }
    if (!(std::abs(pilot_symbol) > 0.0)) fail("pilot symbol must be non-zero");
    if (!is_power_of_four(modulation_order)) {
        fail("modulation order must be a power of four, got " + std::to_string(modulation_order));
    }
    if (pilot_count() < 3) fail("configuration yields fewer than 3 pilots");
}

MultipathChannel::MultipathChannel(CVector gains, std::vector<double> delays_s)
    : gains_(std::move(gains)), delays_(std::move(delays_s)) {
    if (gains_.empty() || gains_.size() != delays_.size()) {
        throw Error(ErrorKind::invalid_argument,
                    "channel needs equal, non-zero numbers of gains and delays (got " +
                        std::to_string(gains_.size()) + " and " + std::to_string(delays_.size()) +
                        ")");
    }
    for (const cplx g : gains_) {
        if (!std::isfinite(g.real()) || !std::isfinite(g.imag())) {
            throw Error(ErrorKind::invalid_argument, "path gains must be finite");
        }
    }
    for (std::size_t i = 0; i < delays_.size(); ++i) {
        if (!std::isfinite(delays_[i]) || delays_[i] < 0.0) {
            throw Error(ErrorKind::invalid_argument, "path delays must be finite and non-negative");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (delays_[i] == delays_[j]) {
                throw Error(ErrorKind::invalid_argument,
                            "paths " + std::to_string(j) + " and " + std::to_string(i) +
                                " share delay " + delay_text(delays_[i]) + " s");
            }
        }
    }
}

double MultipathChannel::max_delay_s() const noexcept {
    return *std::max_element(delays_.begin(), delays_.end());
}

double DelayDistribution::quantile(double u) const noexcept {
    if (!bounded()) return -std::log1p(-u) / rate_per_s;
    const double mass = -std::expm1(-rate_per_s * tau_max_s);
    const double tau = -std::log1p(-u * mass) / rate_per_s;
    return std::min(tau, tau_max_s);
}

double DelayDistribution::cdf(double t) const noexcept {
    if (t <= 0.0) return 0.0;
    if (!bounded()) return -std::expm1(-rate_per_s * t);
    if (t >= tau_max_s) return 1.0;
    return std::expm1(-rate_per_s * t) / std::expm1(-rate_per_s * tau_max_s);
}

void DelayDistribution::validate() const {
    if (!(rate_per_s > 0.0) || !std::isfinite(rate_per_s)) {
        throw Error(ErrorKind::invalid_argument, "delay rate must be positive");
    }
    if (!(tau_max_s > 0.0)) {
        throw Error(ErrorKind::invalid_argument, "tau_max must be positive");
    }
}

PilotObservation::PilotObservation(CVector samples) : samples_(std::move(samples)) {
    for (const cplx s : samples_) {
        if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) {
            throw Error(ErrorKind::invalid_argument, "pilot samples must be finite");
        }
    }
}

MultipathChannel sample_channel(Rng& rng, std::size_t path_count, const DelayDistribution& dist) {
    if (path_count < 1) throw Error(ErrorKind::invalid_argument, "path count must be at least 1");
    dist.validate();
    CVector gains(path_count);
    std::vector<double> delays;
    delays.reserve(path_count);
    const double sigma = std::sqrt(0.5);
    for (std::size_t l = 0; l < path_count; ++l) {
        const double re = rng.gaussian();
        const double im = rng.gaussian();
        gains[l] = {sigma * re, sigma * im};
    }
    while (delays.size() < path_count) {
        const double tau = dist.quantile(rng.uniform());
        if (std::find(delays.begin(), delays.end(), tau) == delays.end()) delays.push_back(tau);
    }
    return MultipathChannel(std::move(gains), std::move(delays));
}

CVector synthesize_cfr(std::span<const cplx> gains, std::span<const double> delays_s,
                       const OfdmConfig& cfg) {
    if (gains.size() != delays_s.size()) {
        throw Error(ErrorKind::dimension, "gain and delay lists differ in length");
    }
    CVector h(cfg.n_subcarriers);
    for (std::size_t l = 0; l < gains.size(); ++l) {
        const double cycles_per_bin = cfg.subcarrier_spacing_hz * delays_s[l];
        for (std::size_t n = 0; n < h.size(); ++n) {
            h[n] += gains[l] * unit_phasor(static_cast<double>(n) * cycles_per_bin);
        }
    }
    return h;
}

CVector cfr(const MultipathChannel& ch, const OfdmConfig& cfg) {
    return synthesize_cfr(ch.gains(), ch.delays_s(), cfg);
}

PilotObservation pilot_observation(const MultipathChannel& ch, const OfdmConfig& cfg) {
    const CVector h = cfr(ch, cfg);
    CVector s(cfg.pilot_count());
    for (std::size_t p = 0; p < s.size(); ++p) s[p] = cfg.pilot_symbol * h[p * cfg.pilot_spacing];
    return PilotObservation(std::move(s));
}

double p_free_closed_form(const DelayDistribution& dist, const OfdmConfig& cfg,
                          std::size_t path_count) {
    if (path_count < 1) throw Error(ErrorKind::invalid_argument, "path count must be at least 1");
    const double per_path = dist.cdf(cfg.unambiguous_delay_s());
    return std::pow(per_path, static_cast<double>(path_count));
}

std::string channel_to_json(const MultipathChannel& ch) {
    nlohmann::json doc;
    doc["gains"] = nlohmann::json::array();
    for (const cplx g : ch.gains()) doc["gains"].push_back({g.real(), g.imag()});
    doc["delays_s"] = ch.delays_s();
    return doc.dump(2);
}

MultipathChannel channel_from_json(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        const std::size_t at = e.byte == 0 ? 0 : e.byte - 1;
        throw Error(ErrorKind::parse, "malformed channel JSON at " + line_context(text, at) + ": " +
                                          e.what());
    }
    auto schema_error = [](const std::string& msg) {
        throw Error(ErrorKind::parse, "channel JSON schema: " + msg);
    };
    if (!doc.is_object()) schema_error("top level must be an object");
    if (!doc.contains("gains") || !doc["gains"].is_array()) schema_error("missing array 'gains'");
    if (!doc.contains("delays_s") || !doc["delays_s"].is_array()) {
        schema_error("missing array 'delays_s'");
    }
    CVector gains;
    for (const auto& g : doc["gains"]) {
        if (!g.is_array() || g.size() != 2 || !g[0].is_number() || !g[1].is_number()) {
            schema_error("each gain must be a [re, im] pair");
        }
        gains.emplace_back(g[0].get<double>(), g[1].get<double>());
    }
    std::vector<double> delays;
    for (const auto& d : doc["delays_s"]) {
        if (!d.is_number()) schema_error("each delay must be a number");
        delays.push_back(d.get<double>());
    }
    return MultipathChannel(std::move(gains), std::move(delays));
}

}  // namespace gsdsce
