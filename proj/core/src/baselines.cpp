#include "gsdsce/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gsdsce/error.hpp"
#include "gsdsce/numkit.hpp"

namespace gsdsce::baselines {

namespace {

double l2_norm(std::span<const cplx> v) {
    double acc = 0.0;
    for (const cplx x : v) acc += std::norm(x);
    return std::sqrt(acc);
}

}  // namespace

OmpDictionary::OmpDictionary(const OfdmConfig& cfg, std::size_t grid_size)
    : grid_size_(grid_size), pilots_(cfg.pilot_count()), spacing_hz_(cfg.subcarrier_spacing_hz) {
    cfg.validate();
    if (grid_size_ < pilots_) {
        throw Error(ErrorKind::invalid_argument, "OMP grid must have at least P atoms");
    }
    atoms_.resize(grid_size_ * pilots_);
    const auto k = static_cast<std::uint64_t>(cfg.pilot_spacing);
    for (std::size_t g = 0; g < grid_size_; ++g) {
        for (std::size_t p = 0; p < pilots_; ++p) {
            // Phase p*K*delta_f*tau_g = p*K*g/G cycles; reduce exactly in integers.
            const std::uint64_t num = (static_cast<std::uint64_t>(p) * k * g) % grid_size_;
            const double cycles = static_cast<double>(num) / static_cast<double>(grid_size_);
            atoms_[g * pilots_ + p] = std::polar(1.0, -2.0 * std::numbers::pi * cycles);
        }
    }
}

double OmpDictionary::delay_s(std::size_t g) const noexcept {
    return static_cast<double>(g) / (static_cast<double>(grid_size_) * spacing_hz_);
}

OmpResult omp_solve(const PilotObservation& s, const OfdmConfig& cfg, const OmpDictionary& dict,
                    const OmpOptions& opts) {
    if (opts.max_iterations < 1) {
        throw Error(ErrorKind::invalid_argument, "OMP needs at least one iteration");
    }
    if (s.size() != dict.pilot_count()) {
        throw Error(ErrorKind::dimension, "observation length does not match the dictionary");
    }
    const std::size_t pilots = s.size();
    CVector target(pilots);
    for (std::size_t p = 0; p < pilots; ++p) target[p] = s[p] / cfg.pilot_symbol;
    const double target_norm = l2_norm(target);

    OmpResult out;
    CVector residual = target;
    const double atom_norm = std::sqrt(static_cast<double>(pilots));

    while (out.support.size() < opts.max_iterations) {
        if (!(target_norm > 0.0) || l2_norm(residual) < opts.residual_threshold * target_norm) {
            break;
        }
        std::size_t best = 0;
        double best_score = -1.0;
        for (std::size_t g = 0; g < dict.grid_size(); ++g) {
            const auto atom = dict.atom(g);
            cplx dot = 0.0;
            for (std::size_t p = 0; p < pilots; ++p) dot += std::conj(atom[p]) * residual[p];
            const double score = std::abs(dot) / atom_norm;
            if (score > best_score) {
                best_score = score;
                best = g;
            }
        }
        if (std::find(out.support.begin(), out.support.end(), best) != out.support.end()) break;

        std::vector<std::size_t> support = out.support;
        support.push_back(best);
        numkit::ComplexMatrix a(pilots, support.size());
        for (std::size_t c = 0; c < support.size(); ++c) {
            const auto atom = dict.atom(support[c]);
            for (std::size_t p = 0; p < pilots; ++p) a(p, c) = atom[p];
        }
        CVector coeffs;
        try {
            coeffs = numkit::solve_least_squares(a, target);
        } catch (const numkit::RankError&) {
            break;
        }
        out.support = std::move(support);
        out.coefficients = std::move(coeffs);
        for (std::size_t p = 0; p < pilots; ++p) {
            cplx fit = 0.0;
            for (std::size_t c = 0; c < out.support.size(); ++c) {
                fit += a(p, c) * out.coefficients[c];
            }
            residual[p] = target[p] - fit;
        }
        out.residual_norms.push_back(l2_norm(residual));
    }

    std::vector<double> delays;
    delays.reserve(out.support.size());
    for (const std::size_t g : out.support) delays.push_back(dict.delay_s(g));
    out.cfr_hat = synthesize_cfr(out.coefficients, delays, cfg);
    return out;
}

CVector omp_estimate(const PilotObservation& s, const OfdmConfig& cfg, const OmpDictionary& dict,
                     const OmpOptions& opts) {
    return omp_solve(s, cfg, dict, opts).cfr_hat;
}

CVector omp_estimate(const PilotObservation& s, const OfdmConfig& cfg, const OmpOptions& opts) {
    const OmpDictionary dict(cfg, opts.grid_size);
    return omp_estimate(s, cfg, dict, opts);
}

CVector cubic_interp_estimate(const PilotObservation& s, const OfdmConfig& cfg) {
    const std::size_t pilots = s.size();
    if (pilots < 4) {
        throw Error(ErrorKind::insufficient_samples,
                    "cubic interpolation needs at least 4 pilots, got " + std::to_string(pilots));
    }
    CVector y(pilots);
    for (std::size_t p = 0; p < pilots; ++p) y[p] = s[p] / cfg.pilot_symbol;
    const double h = static_cast<double>(cfg.pilot_spacing);

    // Second derivatives with natural ends: M_0 = M_{P-1} = 0. The spline is
    // linear in the data, so solving once on complex values equals separate
    // real and imaginary splines.
    const std::size_t inner = pilots - 2;
    std::vector<double> diag(inner, 4.0);
    CVector rhs(inner);
    for (std::size_t i = 0; i < inner; ++i) {
        rhs[i] = 6.0 * (y[i + 2] - 2.0 * y[i + 1] + y[i]) / (h * h);
    }
    for (std::size_t i = 1; i < inner; ++i) {
        const double w = 1.0 / diag[i - 1];
        diag[i] -= w;
        rhs[i] -= w * rhs[i - 1];
    }
    CVector second(pilots);
    for (std::size_t i = inner; i-- > 0;) {
        const cplx next = i + 1 < inner ? second[i + 2] : cplx{};
        second[i + 1] = (rhs[i] - next) / diag[i];
    }

    auto segment = [&](std::size_t i, double t) {
        // t in [0, h] measured from knot i.
        const double u = h - t;
        return second[i] * u * u * u / (6.0 * h) + second[i + 1] * t * t * t / (6.0 * h) +
               (y[i] / h - second[i] * h / 6.0) * u + (y[i + 1] / h - second[i + 1] * h / 6.0) * t;
    };

    const std::size_t last_knot = (pilots - 1) * cfg.pilot_spacing;
    const std::size_t i_last = pilots - 2;
    const cplx end_slope = (y[i_last + 1] - y[i_last]) / h +
                           h * (second[i_last] + 2.0 * second[i_last + 1]) / 6.0;

    CVector out(cfg.n_subcarriers);
    for (std::size_t n = 0; n < out.size(); ++n) {
        if (n >= last_knot) {
            out[n] = y[pilots - 1] + end_slope * static_cast<double>(n - last_knot);
            continue;
        }
        const std::size_t i = n / cfg.pilot_spacing;
        const std::size_t offset = n - i * cfg.pilot_spacing;
        out[n] = offset == 0 ? y[i] : segment(i, static_cast<double>(offset));
    }
    return out;
}

}  // namespace gsdsce::baselines
