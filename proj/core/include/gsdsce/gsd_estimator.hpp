#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gsdsce/channel_model.hpp"
#include "gsdsce/error.hpp"
#include "gsdsce/numkit.hpp"

/// Sparse channel estimation by geometric sequence decomposition.
///
/// Each path contributes a geometric sequence beta*alpha_l * r_l^p to the
/// pilot observation, with r_l = exp(-j 2 pi K delta_f tau_l). The estimator
///   1. finds the path count as the smallest order whose series of simplex
///      volumes (Hankel determinants over L!) is a non-zero geometric sequence,
///   2. recovers the ratios as roots of a polynomial whose coefficients are
///      leave-one-out simplex volumes over the first 2L pilots, then fits the
///      initial terms by least squares over every pilot,
///   3. maps terms and ratios to gains and delays and resynthesizes the CFR.
namespace gsdsce::gsd {

struct GsdOptions {
    /// Largest model order tried; 0 selects (P - 1) / 2.
    std::size_t l_max = 0;
    double eps_geo = numkit::kDefaultEpsGeo;
    /// When no order passes at eps_geo, the tolerance is relaxed tenfold per
    /// round up to this cap. Set equal to eps_geo for a single strict pass.
    double eps_geo_max = 1e-3;
    double eps_zero = numkit::kDefaultEpsZero;
    bool normalize_input = true;

    std::size_t resolved_l_max(std::size_t pilot_count) const noexcept {
        return l_max == 0 ? (pilot_count - 1) / 2 : l_max;
    }
};

struct GsdEstimate {
    std::size_t detected_paths = 0;
    CVector initial_terms;
    CVector common_ratios;
    CVector gains_hat;
    std::vector<double> delays_hat_s;
    CVector cfr_hat;
};

enum class Phase { detection, ratio_polynomial, root_finding, initial_terms };

const char* to_string(Phase phase) noexcept;

/// Estimator failure tagged with the pipeline phase that raised it.
class EstimationError : public Error {
public:
    EstimationError(Phase phase, ErrorKind cause, const std::string& what)
        : Error(cause, std::string(to_string(phase)) + ": " + what), phase_(phase) {}

    Phase phase() const noexcept { return phase_; }

private:
    Phase phase_;
};

/// Phase 1 failure; carries max ratio dispersion of Omega_L for each order.
class DetectionError : public Error {
public:
    DetectionError(const std::string& what, std::vector<double> dispersions)
        : Error(ErrorKind::detection_failure, what), dispersions_(std::move(dispersions)) {}

    const std::vector<double>& dispersions() const noexcept { return dispersions_; }

private:
    std::vector<double> dispersions_;
};

/// Vertices v_k = (s[k], ..., s[k+order-1]) for k = start..start+count-1.
std::vector<CVector> build_vertices(std::span<const cplx> s, std::size_t order, std::size_t start,
                                    std::size_t count);

/// Omega[k] = det([v_k, ..., v_{k+order-1}]) / order!, k = 0..P-2*order+1,
/// which is every window the observation supports.
/// With normalize_input the input is first divided by max|s|.
CVector simplex_volume_series(const PilotObservation& s, std::size_t order,
                              bool normalize_input = false);

/// Smallest order whose volume series passes the geometric test, trying
/// eps_geo first and relaxing toward eps_geo_max only when no order passes.
/// Throws DetectionError when even the loosest round fails.
std::size_t detect_path_count(const PilotObservation& s, const GsdOptions& opts = {});

/// Degree-L polynomial whose roots are the common ratios; coefficient of
/// (-r)^(L-k) is the volume of the simplex on v_0..v_L without v_{L-k}.
/// zero_threshold is relative to the largest coefficient magnitude.
numkit::ComplexPolynomial ratio_polynomial(const PilotObservation& s, std::size_t path_count,
                                           double zero_threshold = numkit::kDefaultEpsZero);

/// Roots sorted by ascending principal phase.
CVector solve_ratios(const numkit::ComplexPolynomial& p);

/// Least-squares initial terms over all pilots.
CVector solve_initial_terms(const PilotObservation& s, std::span<const cplx> ratios);

struct ChannelParameters {
    CVector gains;
    std::vector<double> delays_s;
};

/// alpha_l = a_l / beta; tau_l from the ratio phase mapped to (-2 pi, 0].
ChannelParameters extract_channel(std::span<const cplx> initial_terms,
                                  std::span<const cplx> ratios, const OfdmConfig& cfg);

CVector reconstruct_cfr(std::span<const cplx> gains, std::span<const double> delays_s,
                        const OfdmConfig& cfg);

/// Full pipeline. Throws DetectionError or EstimationError.
GsdEstimate estimate(const PilotObservation& s, const OfdmConfig& cfg, const GsdOptions& opts = {});

/// JSON document with the detected order, per-path parameters and optionally ĥ.
std::string estimate_to_json(const GsdEstimate& est, bool include_cfr = false);

}  // namespace gsdsce::gsd
