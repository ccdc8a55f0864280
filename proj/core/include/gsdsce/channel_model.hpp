#pragma once

#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gsdsce/random.hpp"

namespace gsdsce {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

/// OFDM numerology and pilot layout. Pilots sit on subcarriers 0, K, 2K, ...
struct OfdmConfig {
    std::size_t n_subcarriers = 360;
    double subcarrier_spacing_hz = 60e3;
    std::size_t pilot_spacing = 12;
    cplx pilot_symbol{1.0, 0.0};
    std::size_t modulation_order = 1024;

    /// ceil(N / K).
    std::size_t pilot_count() const noexcept {
        return (n_subcarriers + pilot_spacing - 1) / pilot_spacing;
    }

    /// 1 / (K * delta_f): largest delay whose pilot-domain phase is unambiguous.
    double unambiguous_delay_s() const noexcept {
        return 1.0 / (static_cast<double>(pilot_spacing) * subcarrier_spacing_hz);
    }

    /// Throws ErrorKind::invalid_argument on N < 2, non-positive spacing,
    /// K outside [1, N), zero pilot symbol, M not a power of four, or P < 3.
    void validate() const;
};

/// Ground-truth sparse channel: one complex gain and one excess delay per path.
class MultipathChannel {
public:
    /// Throws ErrorKind::invalid_argument unless the sequences have equal
    /// non-zero length, delays are finite and non-negative, and no two delays
    /// are equal.
    MultipathChannel(CVector gains, std::vector<double> delays_s);

    std::size_t path_count() const noexcept { return gains_.size(); }
    const CVector& gains() const noexcept { return gains_; }
    const std::vector<double>& delays_s() const noexcept { return delays_; }

    double max_delay_s() const noexcept;

private:
    CVector gains_;
    std::vector<double> delays_;
};

/// Exponential delay law with rate lambda, optionally truncated at tau_max.
struct DelayDistribution {
    double rate_per_s = 1.0 / 5e-7;
    double tau_max_s = std::numeric_limits<double>::infinity();

    bool bounded() const noexcept { return tau_max_s != std::numeric_limits<double>::infinity(); }

    /// Inverse CDF at u in [0, 1).
    double quantile(double u) const noexcept;
    double cdf(double t) const noexcept;

    void validate() const;
};

/// Pilot-domain observation s_T, one complex sample per pilot subcarrier.
class PilotObservation {
public:
    explicit PilotObservation(CVector samples);

    std::size_t size() const noexcept { return samples_.size(); }
    std::span<const cplx> samples() const noexcept { return samples_; }
    cplx operator[](std::size_t p) const { return samples_[p]; }

private:
    CVector samples_;
};

/// Draws i.i.d. CN(0,1) gains and truncated-exponential delays. A delay that
/// repeats an earlier one bit-exactly is redrawn.
MultipathChannel sample_channel(Rng& rng, std::size_t path_count, const DelayDistribution& dist);

/// h[n] = sum_l alpha_l exp(-j 2 pi n delta_f tau_l), n = 0..N-1.
CVector cfr(const MultipathChannel& ch, const OfdmConfig& cfg);

/// Same synthesis restricted to the given gain/delay lists.
CVector synthesize_cfr(std::span<const cplx> gains, std::span<const double> delays_s,
                       const OfdmConfig& cfg);

/// s_T[p] = beta * h[pK], p = 0..P-1.
PilotObservation pilot_observation(const MultipathChannel& ch, const OfdmConfig& cfg);

/// Probability that all L delays fall below 1 / (K delta_f).
double p_free_closed_form(const DelayDistribution& dist, const OfdmConfig& cfg,
                          std::size_t path_count);

/// {"gains":[[re,im],...],"delays_s":[...]}
std::string channel_to_json(const MultipathChannel& ch);

/// Throws ErrorKind::parse (with line and column) on malformed JSON or a bad
/// schema, and ErrorKind::invalid_argument when the channel invariants fail.
MultipathChannel channel_from_json(std::string_view text);

}  // namespace gsdsce
