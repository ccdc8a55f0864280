#pragma once

#include <cstddef>
#include <vector>

#include "gsdsce/channel_model.hpp"

namespace gsdsce::baselines {

struct OmpOptions {
    std::size_t grid_size = 5000;
    std::size_t max_iterations = 4;
    double residual_threshold = 1e-8;
};

/// Partial-DFT delay dictionary restricted to the pilot subcarriers. Atom g
/// has entries exp(-j 2 pi p K delta_f tau_g) with tau_g = g / (G delta_f).
/// Immutable once built; share one instance across threads.
class OmpDictionary {
public:
    OmpDictionary(const OfdmConfig& cfg, std::size_t grid_size);

    std::size_t grid_size() const noexcept { return grid_size_; }
    std::size_t pilot_count() const noexcept { return pilots_; }
    double delay_s(std::size_t g) const noexcept;

    /// Atom g, length P.
    std::span<const cplx> atom(std::size_t g) const noexcept {
        return {atoms_.data() + g * pilots_, pilots_};
    }

private:
    std::size_t grid_size_;
    std::size_t pilots_;
    double spacing_hz_;
    CVector atoms_;
};

struct OmpResult {
    std::vector<std::size_t> support;
    CVector coefficients;
    std::vector<double> residual_norms;  // after each iteration
    CVector cfr_hat;
};

/// Greedy recovery over the dictionary; coefficients are refit over the whole
/// support each iteration. Stops at max_iterations, on the relative residual
/// threshold, or when an already chosen atom is selected again.
OmpResult omp_solve(const PilotObservation& s, const OfdmConfig& cfg, const OmpDictionary& dict,
                    const OmpOptions& opts);

CVector omp_estimate(const PilotObservation& s, const OfdmConfig& cfg, const OmpOptions& opts);
CVector omp_estimate(const PilotObservation& s, const OfdmConfig& cfg, const OmpDictionary& dict,
                     const OmpOptions& opts);

/// Natural cubic spline through (pK, s_T[p] / beta) on real and imaginary
/// parts; subcarriers past the last pilot continue the final segment linearly.
/// Throws ErrorKind::insufficient_samples for fewer than 4 pilots.
CVector cubic_interp_estimate(const PilotObservation& s, const OfdmConfig& cfg);

}  // namespace gsdsce::baselines
