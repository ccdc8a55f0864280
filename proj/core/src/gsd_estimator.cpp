#include "gsdsce/gsd_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <json.hpp>

namespace gsdsce::gsd {

namespace {

double factorial(std::size_t n) {
    double f = 1.0;
    for (std::size_t i = 2; i <= n; ++i) f *= static_cast<double>(i);
    return f;
}

/// Volume of the simplex spanned by the origin and the given vertices.
cplx simplex_volume(std::span<const CVector> vertices) {
    return numkit::det_complex(numkit::ComplexMatrix::from_columns(vertices)) /
           factorial(vertices.size());
}

double max_modulus(std::span<const cplx> s) {
    double m = 0.0;
    for (const cplx v : s) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace

const char* to_string(Phase phase) noexcept {
    switch (phase) {
        case Phase::detection: return "path-count detection";
        case Phase::ratio_polynomial: return "ratio polynomial";
        case Phase::root_finding: return "root finding";
        case Phase::initial_terms: return "initial terms";
    }
    return "unknown phase";
}

std::vector<CVector> build_vertices(std::span<const cplx> s, std::size_t order, std::size_t start,
                                    std::size_t count) {
    if (order == 0 || count == 0) {
        throw Error(ErrorKind::invalid_argument, "vertex order and count must be positive");
    }
    if (start + count + order - 2 >= s.size()) {
        throw Error(ErrorKind::insufficient_samples,
                    "vertex window [" + std::to_string(start) + ", " +
                        std::to_string(start + count + order - 2) + "] exceeds " +
                        std::to_string(s.size()) + " samples");
    }
    std::vector<CVector> vertices;
    vertices.reserve(count);
    for (std::size_t k = start; k < start + count; ++k) {
        vertices.emplace_back(s.begin() + static_cast<std::ptrdiff_t>(k),
                              s.begin() + static_cast<std::ptrdiff_t>(k + order));
    }
    return vertices;
}

CVector simplex_volume_series(const PilotObservation& s, std::size_t order, bool normalize_input) {
    const std::size_t pilots = s.size();
    if (order == 0) throw Error(ErrorKind::invalid_argument, "simplex order must be positive");
    // Omega[k] reads s[k .. k + 2*order - 2]; three terms need 2*order + 1 pilots.
    if (pilots < 2 * order + 1) {
        throw Error(ErrorKind::insufficient_samples,
                    "order " + std::to_string(order) + " needs at least " +
                        std::to_string(2 * order + 1) + " pilots, got " + std::to_string(pilots));
    }
    CVector samples(s.samples().begin(), s.samples().end());
    if (normalize_input) {
        const double scale = max_modulus(samples);
        if (scale > 0.0) {
            for (cplx& v : samples) v /= scale;
        }
    }
    const std::size_t terms = pilots - 2 * order + 2;
    const auto vertices = build_vertices(samples, order, 0, terms + order - 1);
    CVector omega(terms);
    for (std::size_t k = 0; k < terms; ++k) {
        omega[k] = simplex_volume(std::span(vertices).subspan(k, order));
    }
    return omega;
}

std::size_t detect_path_count(const PilotObservation& s, const GsdOptions& opts) {
    const std::size_t l_max = opts.resolved_l_max(s.size());
    if (l_max < 1 || 2 * l_max + 1 > s.size()) {
        throw Error(ErrorKind::invalid_argument,
                    "l_max " + std::to_string(l_max) + " violates 2*l_max+1 <= P with P = " +
                        std::to_string(s.size()));
    }
    if (!(opts.eps_geo > 0.0) || opts.eps_geo_max < opts.eps_geo) {
        throw Error(ErrorKind::invalid_argument, "eps_geo must be positive and <= eps_geo_max");
    }
    std::vector<CVector> series;
    series.reserve(l_max);
    for (std::size_t order = 1; order <= l_max; ++order) {
        series.push_back(simplex_volume_series(s, order, opts.normalize_input));
        if (numkit::is_geometric(series.back(), opts.eps_geo, opts.eps_zero)) return order;
    }
    // Rounding in s_T alone perturbs ill-conditioned volume series by more
    // than eps_geo; relax only once the strict pass has found nothing.
    for (double eps = opts.eps_geo * 10.0; eps <= opts.eps_geo_max * (1.0 + 1e-12); eps *= 10.0) {
        for (std::size_t order = 1; order <= l_max; ++order) {
            if (numkit::is_geometric(series[order - 1], eps, opts.eps_zero)) return order;
        }
    }
    std::vector<double> dispersions;
    dispersions.reserve(l_max);
    for (const auto& omega : series) dispersions.push_back(numkit::ratio_dispersion(omega));
    throw DetectionError("no order in 1.." + std::to_string(l_max) +
                             " yields a non-zero geometric volume series",
                         std::move(dispersions));
}

numkit::ComplexPolynomial ratio_polynomial(const PilotObservation& s, std::size_t path_count,
                                           double zero_threshold) {
    const std::size_t order = path_count;
    if (order == 0) throw Error(ErrorKind::invalid_argument, "path count must be positive");
    if (s.size() < 2 * order) {
        throw Error(ErrorKind::insufficient_samples,
                    "ratio polynomial of degree " + std::to_string(order) + " needs " +
                        std::to_string(2 * order) + " pilots, got " + std::to_string(s.size()));
    }
    const auto vertices = build_vertices(s.samples(), order, 0, order + 1);

    // coeffs[k] multiplies r^(L-k): Lambda(aleph[k]) * (-1)^(L-k), where
    // aleph[k] drops vertex v_(L-k).
    CVector coeffs(order + 1);
    std::vector<CVector> subset;
    subset.reserve(order);
    for (std::size_t k = 0; k <= order; ++k) {
        subset.clear();
        const std::size_t dropped = order - k;
        for (std::size_t i = 0; i <= order; ++i) {
            if (i != dropped) subset.push_back(vertices[i]);
        }
        const double sign = (order - k) % 2 == 0 ? 1.0 : -1.0;
        coeffs[k] = sign * simplex_volume(subset);
    }

    const double largest = max_modulus(coeffs);
    if (!(std::abs(coeffs.front()) > zero_threshold * largest)) {
        throw Error(ErrorKind::degenerate_geometry,
                    "leading simplex volume vanishes (order overestimated or ratios coincide)");
    }
    return numkit::ComplexPolynomial(std::move(coeffs));
}

CVector solve_ratios(const numkit::ComplexPolynomial& p) {
    CVector roots = numkit::poly_roots(p);
    std::sort(roots.begin(), roots.end(),
              [](cplx a, cplx b) { return std::arg(a) < std::arg(b); });
    return roots;
}

CVector solve_initial_terms(const PilotObservation& s, std::span<const cplx> ratios) {
    const std::size_t paths = ratios.size();
    if (paths == 0) throw Error(ErrorKind::invalid_argument, "no ratios supplied");
    for (std::size_t i = 0; i < paths; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (!(std::abs(ratios[i] - ratios[j]) > 1e-8)) {
                throw numkit::RankError("common ratios " + std::to_string(j) + " and " +
                                            std::to_string(i) + " nearly coincide",
                                        paths - 1);
            }
        }
    }
    numkit::ComplexMatrix v(s.size(), paths);
    for (std::size_t l = 0; l < paths; ++l) {
        cplx power = 1.0;
        for (std::size_t p = 0; p < s.size(); ++p) {
            v(p, l) = power;
            power *= ratios[l];
        }
    }
    return numkit::solve_least_squares(v, s.samples());
}

ChannelParameters extract_channel(std::span<const cplx> initial_terms,
                                  std::span<const cplx> ratios, const OfdmConfig& cfg) {
    if (initial_terms.size() != ratios.size()) {
        throw Error(ErrorKind::dimension, "initial terms and ratios differ in length");
    }
    if (!(std::abs(cfg.pilot_symbol) > 0.0)) {
        throw Error(ErrorKind::invalid_argument, "pilot symbol must be non-zero");
    }
    const double bound = cfg.unambiguous_delay_s();
    const double radians_per_second =
        2.0 * std::numbers::pi * static_cast<double>(cfg.pilot_spacing) * cfg.subcarrier_spacing_hz;
    ChannelParameters out;
    out.gains.reserve(ratios.size());
    out.delays_s.reserve(ratios.size());
    for (std::size_t l = 0; l < ratios.size(); ++l) {
        out.gains.push_back(initial_terms[l] / cfg.pilot_symbol);
        double theta = std::arg(ratios[l]);
        if (theta > 0.0) theta -= 2.0 * std::numbers::pi;
        double tau = std::max(0.0, -theta / radians_per_second);
        if (tau >= bound) tau = std::nextafter(bound, 0.0);
        out.delays_s.push_back(tau);
    }
    return out;
}

CVector reconstruct_cfr(std::span<const cplx> gains, std::span<const double> delays_s,
                        const OfdmConfig& cfg) {
    return synthesize_cfr(gains, delays_s, cfg);
}

GsdEstimate estimate(const PilotObservation& s, const OfdmConfig& cfg, const GsdOptions& opts) {
    cfg.validate();
    if (s.size() != cfg.pilot_count()) {
        throw Error(ErrorKind::dimension, "observation has " + std::to_string(s.size()) +
                                              " samples, configuration expects " +
                                              std::to_string(cfg.pilot_count()));
    }

    GsdEstimate est;
    est.detected_paths = detect_path_count(s, opts);

    double scale = 1.0;
    if (opts.normalize_input) {
        scale = max_modulus(s.samples());
        if (!(scale > 0.0)) scale = 1.0;
    }
    CVector scaled(s.samples().begin(), s.samples().end());
    for (cplx& v : scaled) v /= scale;
    const PilotObservation normalized(std::move(scaled));

    auto tagged = [](Phase phase, auto&& step) {
        try {
            return step();
        } catch (const Error& e) {
            throw EstimationError(phase, e.kind(), e.what());
        }
    };

    const auto poly = tagged(Phase::ratio_polynomial, [&] {
        return ratio_polynomial(normalized, est.detected_paths, opts.eps_zero);
    });
    est.common_ratios = tagged(Phase::root_finding, [&] { return solve_ratios(poly); });
    est.initial_terms = tagged(Phase::initial_terms,
                               [&] { return solve_initial_terms(normalized, est.common_ratios); });
    for (cplx& a : est.initial_terms) a *= scale;

    auto params = extract_channel(est.initial_terms, est.common_ratios, cfg);
    est.gains_hat = std::move(params.gains);
    est.delays_hat_s = std::move(params.delays_s);
    est.cfr_hat = reconstruct_cfr(est.gains_hat, est.delays_hat_s, cfg);
    return est;
}

std::string estimate_to_json(const GsdEstimate& est, bool include_cfr) {
    using nlohmann::json;
    json doc;
    doc["detected_paths"] = est.detected_paths;
    doc["paths"] = json::array();
    for (std::size_t l = 0; l < est.detected_paths; ++l) {
        doc["paths"].push_back({
            {"gain", {est.gains_hat[l].real(), est.gains_hat[l].imag()}},
            {"delay_s", est.delays_hat_s[l]},
            {"initial_term", {est.initial_terms[l].real(), est.initial_terms[l].imag()}},
            {"common_ratio", {est.common_ratios[l].real(), est.common_ratios[l].imag()}},
        });
    }
    if (include_cfr) {
        doc["cfr_hat"] = json::array();
        for (const cplx h : est.cfr_hat) doc["cfr_hat"].push_back({h.real(), h.imag()});
    }
    return doc.dump(2);
}

}  // namespace gsdsce::gsd
