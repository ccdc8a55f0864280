#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gsdsce/evaluation.hpp"
#include "gsdsce/gsd_estimator.hpp"
#include "oracles.hpp"

namespace gsdsce::gsd {
namespace {

using testing::geometric_superposition;
using testing::pilot_ratio;

PilotObservation obs(CVector v) { return PilotObservation(std::move(v)); }

double min_distance(const CVector& set, cplx z) {
    double best = 1e300;
    for (const cplx v : set) best = std::min(best, std::abs(v - z));
    return best;
}

TEST(BuildVertices, DirectWindowing) {
    const CVector s{1.0, 2.0, 3.0, 4.0};
    const auto v = build_vertices(s, 2, 0, 3);
    ASSERT_EQ(v.size(), 3u);
    EXPECT_EQ(v[0], (CVector{1.0, 2.0}));
    EXPECT_EQ(v[1], (CVector{2.0, 3.0}));
    EXPECT_EQ(v[2], (CVector{3.0, 4.0}));
}

TEST(BuildVertices, OrderOneGivesScalars) {
    const CVector s{5.0, 6.0, 7.0};
    const auto v = build_vertices(s, 1, 0, 3);
    for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(v[k], CVector{s[k]});
}

TEST(BuildVertices, OverrunIsInsufficientSamples) {
    const CVector s{1.0, 2.0, 3.0, 4.0};
    try {
        build_vertices(s, 2, 1, 3);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::insufficient_samples);
    }
}

TEST(SimplexVolumeSeries, OrderOneIsObservation) {
    const CVector s{1.0, cplx(2.0, 1.0), -3.0, cplx(0.0, 4.0), 5.0};
    const auto omega = simplex_volume_series(obs(s), 1);
    EXPECT_EQ(omega, s);
}

TEST(SimplexVolumeSeries, SingleSequenceIsFlatAtOrderTwo) {
    const auto s = geometric_superposition({cplx(0.8, 0.3)}, {std::polar(1.0, -0.7)}, 12);
    for (const cplx v : simplex_volume_series(obs(s), 2)) EXPECT_LT(std::abs(v), 1e-15);
}

TEST(SimplexVolumeSeries, TwoSequencesGiveProductRatio) {
    Rng rng(31);
    const CVector a{testing::random_complex(rng), testing::random_complex(rng)};
    const CVector r{std::polar(1.0, -0.4), std::polar(1.0, -2.1)};
    const auto s = geometric_superposition(a, r, 10);
    const auto omega = simplex_volume_series(obs(s), 2);
    ASSERT_EQ(omega.size(), 10u - 4u + 2u);
    for (std::size_t k = 0; k < omega.size(); ++k) {
        // Brute-force 2x2 determinant with vertices as columns.
        const cplx det = s[k] * s[k + 2] - s[k + 1] * s[k + 1];
        EXPECT_LT(std::abs(omega[k] - det / 2.0), 1e-14);
    }
    for (std::size_t k = 1; k < omega.size(); ++k) {
        EXPECT_LT(std::abs(omega[k] / omega[k - 1] - r[0] * r[1]), 1e-10);
    }
}

TEST(SimplexVolumeSeries, NormalizationScalesByPower) {
    const auto s = geometric_superposition({2.0, cplx(0.0, -3.0), 1.5},
                                           {std::polar(1.0, -0.3), std::polar(1.0, -1.3),
                                            std::polar(1.0, -2.9)},
                                           15);
    double peak = 0.0;
    for (const cplx v : s) peak = std::max(peak, std::abs(v));
    const auto raw = simplex_volume_series(obs(s), 3, false);
    const auto scaled = simplex_volume_series(obs(s), 3, true);
    for (std::size_t k = 0; k < raw.size(); ++k) {
        EXPECT_LT(std::abs(scaled[k] * std::pow(peak, 3.0) - raw[k]), 1e-12 * std::abs(raw[k]));
    }
}

TEST(SimplexVolumeSeries, NeedsEnoughPilots) {
    EXPECT_THROW(simplex_volume_series(obs(CVector(6, 1.0)), 3), Error);
    EXPECT_NO_THROW(simplex_volume_series(obs(CVector(7, 1.0)), 3));
}

TEST(SimplexVolumeSeries, ExactInputRatioIsProductOfRatios) {
    const OfdmConfig cfg;
    Rng rng(55);
    for (std::size_t paths = 1; paths <= 6; ++paths) {
        const auto ch = testing::well_conditioned_channel(rng, paths, cfg, 0.1);
        const auto omega = simplex_volume_series(pilot_observation(ch, cfg), paths, true);
        cplx product = 1.0;
        for (const double tau : ch.delays_s()) product *= pilot_ratio(tau, cfg);
        for (std::size_t k = 1; k < omega.size(); ++k) {
            EXPECT_LT(std::abs(omega[k] / omega[k - 1] - product), 1e-8) << "L=" << paths;
        }
    }
}

TEST(DetectPathCount, SinglePath) {
    const OfdmConfig cfg;
    const auto s = pilot_observation(MultipathChannel({cplx(0.3, 0.9)}, {7e-7}), cfg);
    EXPECT_EQ(detect_path_count(s), 1u);
}

TEST(DetectPathCount, ThreeSeededPaths) {
    const OfdmConfig cfg;
    const MultipathChannel ch({cplx(1.0, 0.2), cplx(-0.5, 0.7), cplx(0.4, -0.9)},
                              {1.1e-7, 5.3e-7, 9.8e-7});
    const auto s = pilot_observation(ch, cfg);
    ASSERT_EQ(s.size(), 30u);
    EXPECT_EQ(detect_path_count(s), 3u);
}

TEST(DetectPathCount, LmaxBeyondBudgetIsPreconditionError) {
    const OfdmConfig cfg;
    const auto s = pilot_observation(MultipathChannel({1.0}, {1e-7}), cfg);
    GsdOptions opts;
    opts.l_max = 15;  // 2*15+1 > 30
    try {
        detect_path_count(s, opts);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::invalid_argument);
    }
    opts.l_max = 14;
    EXPECT_EQ(detect_path_count(s, opts), 1u);
}

TEST(DetectPathCount, NoGeometricOrderRaisesWithDispersions) {
    Rng rng(1);
    CVector noise(11);
    for (cplx& v : noise) v = testing::random_complex(rng);
    GsdOptions opts;
    opts.l_max = 5;
    try {
        detect_path_count(obs(noise), opts);
        FAIL() << "random data should not be geometric at any order";
    } catch (const DetectionError& e) {
        EXPECT_EQ(e.kind(), ErrorKind::detection_failure);
        EXPECT_EQ(e.dispersions().size(), 5u);
    }
}

TEST(DetectPathCount, StrictPassIsTriedFirst) {
    // A sequence geometric to 1e-4 passes only after relaxation; with the
    // relaxation disabled it fails.
    CVector s{1.0};
    for (int k = 1; k < 9; ++k) s.push_back(s.back() * cplx(0.0, -1.0));
    s[5] *= 1.0 + 2e-5;
    GsdOptions strict;
    strict.l_max = 4;
    strict.eps_geo_max = strict.eps_geo;
    EXPECT_THROW(detect_path_count(obs(s), strict), DetectionError);
    GsdOptions relaxed = strict;
    relaxed.eps_geo_max = 1e-3;
    EXPECT_EQ(detect_path_count(obs(s), relaxed), 1u);
}

TEST(RatioPolynomial, OrderOneRootIsConsecutiveRatio) {
    const CVector s{cplx(2.0, 1.0), cplx(-1.0, 3.0), 4.0};
    const auto p = ratio_polynomial(obs(s), 1);
    ASSERT_EQ(p.degree(), 1u);
    EXPECT_EQ(p.coefficients()[0], -s[0]);
    EXPECT_EQ(p.coefficients()[1], s[1]);
    const auto roots = solve_ratios(p);
    EXPECT_LT(std::abs(roots[0] - s[1] / s[0]), 1e-15);
}

TEST(RatioPolynomial, TwoSequencesRootsAreRatios) {
    Rng rng(19);
    const CVector a{testing::random_complex(rng), testing::random_complex(rng)};
    const CVector r{std::polar(1.0, -0.9), std::polar(1.0, -2.6)};
    const auto s = geometric_superposition(a, r, 8);
    const auto roots = numkit::poly_roots(ratio_polynomial(obs(s), 2));
    for (const cplx want : r) EXPECT_LT(min_distance(roots, want), 1e-10);
}

TEST(RatioPolynomial, HomogeneousOfDegreeL) {
    Rng rng(23);
    const CVector a{1.0, cplx(0.5, -0.4), cplx(-0.8, 0.1)};
    const CVector r{std::polar(1.0, -0.2), std::polar(1.0, -1.4), std::polar(1.0, -3.0)};
    const auto s = geometric_superposition(a, r, 9);
    const cplx c{1.7, -0.6};
    CVector sc = s;
    for (cplx& v : sc) v *= c;
    const auto p = ratio_polynomial(obs(s), 3);
    const auto pc = ratio_polynomial(obs(sc), 3);
    const cplx c3 = c * c * c;
    for (std::size_t k = 0; k <= 3; ++k) {
        EXPECT_LT(std::abs(pc.coefficients()[k] - c3 * p.coefficients()[k]),
                  1e-12 * std::abs(c3 * p.coefficients()[k]));
    }
    const auto r0 = solve_ratios(p);
    const auto r1 = solve_ratios(pc);
    for (std::size_t k = 0; k < 3; ++k) EXPECT_LT(std::abs(r0[k] - r1[k]), 1e-10);
}

TEST(RatioPolynomial, VanishingLeadingVolumeIsDegenerate) {
    // One path with r = 1 at order 2: every vertex is (1, 1), so all volumes
    // vanish exactly.
    try {
        ratio_polynomial(obs(CVector(10, 1.0)), 2);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::degenerate_geometry);
    }
}

TEST(SolveRatios, FourPathChannelRatios) {
    const OfdmConfig cfg;
    const MultipathChannel ch({cplx(0.9, 0.1), cplx(-0.3, 0.8), cplx(0.5, 0.5), cplx(-1.2, -0.4)},
                              {4e-8, 3.1e-7, 6.6e-7, 1.2e-6});
    const auto s = pilot_observation(ch, cfg);
    double peak = 0.0;
    for (const cplx v : s.samples()) peak = std::max(peak, std::abs(v));
    CVector scaled(s.samples().begin(), s.samples().end());
    for (cplx& v : scaled) v /= peak;
    const auto roots = solve_ratios(ratio_polynomial(obs(scaled), 4));
    for (const double tau : ch.delays_s()) EXPECT_LT(min_distance(roots, pilot_ratio(tau, cfg)), 1e-9);
    for (std::size_t k = 1; k < roots.size(); ++k) {
        EXPECT_LT(std::arg(roots[k - 1]), std::arg(roots[k]));
    }
}

TEST(SolveRatios, RootsAreUnitModulusForNoiselessInput) {
    const OfdmConfig cfg;
    Rng rng(61);
    for (int t = 0; t < 200; ++t) {
        const std::size_t paths = 1 + rng.below(5);
        const auto ch = testing::well_conditioned_channel(rng, paths, cfg);
        const auto est = estimate(pilot_observation(ch, cfg), cfg);
        for (const cplx r : est.common_ratios) EXPECT_NEAR(std::abs(r), 1.0, 1e-6);
    }
}

TEST(SolveInitialTerms, ConstantSequence) {
    const CVector ratios{1.0};
    const auto a = solve_initial_terms(obs({5.0, 5.0, 5.0}), ratios);
    ASSERT_EQ(a.size(), 1u);
    EXPECT_LT(std::abs(a[0] - cplx(5.0)), 1e-15);
}

TEST(SolveInitialTerms, RecoversSeededTerms) {
    const OfdmConfig cfg;
    const MultipathChannel ch({cplx(0.4, -1.1), cplx(1.3, 0.2)}, {2.2e-7, 8.9e-7});
    const auto s = pilot_observation(ch, cfg);
    const CVector ratios{pilot_ratio(2.2e-7, cfg), pilot_ratio(8.9e-7, cfg)};
    const auto a = solve_initial_terms(s, ratios);
    for (std::size_t l = 0; l < 2; ++l) {
        EXPECT_LT(std::abs(a[l] - cfg.pilot_symbol * ch.gains()[l]), 1e-10);
    }
    const auto fit = geometric_superposition(a, ratios, s.size());
    double res = 0.0;
    double ref = 0.0;
    for (std::size_t p = 0; p < s.size(); ++p) {
        res += std::norm(fit[p] - s[p]);
        ref += std::norm(s[p]);
    }
    EXPECT_LT(std::sqrt(res / ref), 1e-9);
}

TEST(SolveInitialTerms, CoincidentRatiosAreRankError) {
    const CVector ratios{std::polar(1.0, -1.0), std::polar(1.0, -1.0 + 1e-10)};
    try {
        solve_initial_terms(obs(CVector(10, 1.0)), ratios);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::rank_deficient);
    }
}

TEST(ExtractChannel, ZeroPhaseIsZeroDelay) {
    const OfdmConfig cfg;
    const CVector a{2.0};
    const CVector r{1.0};
    const auto p = extract_channel(a, r, cfg);
    EXPECT_EQ(p.delays_s[0], 0.0);
    EXPECT_FALSE(std::signbit(p.delays_s[0]));
    EXPECT_EQ(p.gains[0], cplx(2.0));
}

TEST(ExtractChannel, HalfTurn) {
    const OfdmConfig cfg;
    const CVector a{1.0};
    const CVector r{std::polar(1.0, -std::numbers::pi)};
    const auto p = extract_channel(a, r, cfg);
    EXPECT_NEAR(p.delays_s[0], 1.0 / (2.0 * 12.0 * 60e3), 1e-18);
    EXPECT_NEAR(p.delays_s[0], 0.694e-6, 1e-9);
}

TEST(ExtractChannel, PositivePhaseWrapsBelowZero) {
    const OfdmConfig cfg;
    const CVector a{1.0};
    const CVector r{std::polar(1.0, std::numbers::pi / 2.0)};
    const auto p = extract_channel(a, r, cfg);
    EXPECT_NEAR(p.delays_s[0], 3.0 / (4.0 * 12.0 * 60e3), 1e-18);
}

TEST(ExtractChannel, GainsDivideByPilotSymbol) {
    OfdmConfig cfg;
    cfg.pilot_symbol = {0.0, 2.0};
    const CVector a{cplx(4.0, 2.0)};
    const CVector r{std::polar(1.0, -0.1)};
    const auto p = extract_channel(a, r, cfg);
    EXPECT_LT(std::abs(p.gains[0] - cplx(1.0, -2.0)), 1e-15);
}

TEST(ReconstructCfr, ZeroGainsGiveZeroCfr) {
    const OfdmConfig cfg;
    const CVector gains{0.0, 0.0};
    const std::vector<double> delays{1e-7, 2e-7};
    for (const cplx v : reconstruct_cfr(gains, delays, cfg)) EXPECT_EQ(v, cplx{});
}

TEST(ReconstructCfr, TrueParametersReproduceCfr) {
    const OfdmConfig cfg;
    Rng rng(3);
    const auto ch = testing::well_conditioned_channel(rng, 4, cfg);
    const auto h = cfr(ch, cfg);
    const auto h_hat = reconstruct_cfr(ch.gains(), ch.delays_s(), cfg);
    EXPECT_LT(testing::sum_sq([&] {
                  CVector d(h.size());
                  for (std::size_t n = 0; n < h.size(); ++n) d[n] = h[n] - h_hat[n];
                  return d;
              }()),
              1e-24 * testing::sum_sq(h));
}

TEST(ReconstructCfr, InterpolatesOwnPilots) {
    OfdmConfig cfg;
    cfg.pilot_symbol = {0.8, 0.6};
    const MultipathChannel ch({cplx(0.7, -0.2), cplx(0.1, 1.0), cplx(-0.6, -0.6)},
                              {1e-7, 4.4e-7, 1.05e-6});
    const auto s = pilot_observation(ch, cfg);
    const auto est = estimate(s, cfg);
    for (std::size_t p = 0; p < s.size(); ++p) {
        EXPECT_LT(std::abs(est.cfr_hat[p * cfg.pilot_spacing] - s[p] / cfg.pilot_symbol), 1e-10);
    }
}

TEST(Estimate, SinglePathRoundTrip) {
    const OfdmConfig cfg;
    const MultipathChannel ch({1.0}, {0.5e-6});
    const auto est = estimate(pilot_observation(ch, cfg), cfg);
    EXPECT_EQ(est.detected_paths, 1u);
    EXPECT_LT(std::abs(est.gains_hat[0] - cplx(1.0)), 1e-12);
    EXPECT_NEAR(est.delays_hat_s[0], 0.5e-6, 1e-18);
    EXPECT_LT(eval::nmse(cfr(ch, cfg), est.cfr_hat), 1e-12);
    EXPECT_EQ(est.cfr_hat.size(), 360u);
}

TEST(Estimate, FourPathsInsideBoundAreErrorFree) {
    const OfdmConfig cfg;
    const MultipathChannel ch({cplx(0.9, -0.3), cplx(0.2, 0.6), cplx(-1.1, 0.4), cplx(0.3, -0.8)},
                              {5e-8, 3.7e-7, 8.2e-7, 1.31e-6});
    const auto est = estimate(pilot_observation(ch, cfg), cfg);
    EXPECT_EQ(est.detected_paths, 4u);
    EXPECT_LT(eval::nmse(cfr(ch, cfg), est.cfr_hat), 1e-10);
    for (const double tau : est.delays_hat_s) {
        EXPECT_GE(tau, 0.0);
        EXPECT_LT(tau, cfg.unambiguous_delay_s());
    }
}

TEST(Estimate, DelayBeyondBoundAliases) {
    const OfdmConfig cfg;
    const double tau = cfg.unambiguous_delay_s() + 0.2e-6;
    const MultipathChannel ch({1.0}, {tau});
    const auto est = estimate(pilot_observation(ch, cfg), cfg);
    ASSERT_EQ(est.detected_paths, 1u);
    EXPECT_NEAR(est.delays_hat_s[0], 0.2e-6, 1e-15);
    EXPECT_GT(eval::nmse(cfr(ch, cfg), est.cfr_hat), 0.1);
}

TEST(Estimate, DeterministicOutput) {
    const OfdmConfig cfg;
    Rng rng(90);
    const auto ch = sample_channel(rng, 5, DelayDistribution{});
    const auto s = pilot_observation(ch, cfg);
    const auto a = estimate(s, cfg);
    const auto b = estimate(s, cfg);
    EXPECT_EQ(a.common_ratios, b.common_ratios);
    EXPECT_EQ(a.initial_terms, b.initial_terms);
    EXPECT_EQ(a.cfr_hat, b.cfr_hat);
}

TEST(Estimate, WrongObservationLength) {
    const OfdmConfig cfg;
    EXPECT_THROW(estimate(obs(CVector(29, 1.0)), cfg), Error);
}

TEST(Estimate, ZeroObservationFailsDetection) {
    const OfdmConfig cfg;
    EXPECT_THROW(estimate(obs(CVector(30)), cfg), DetectionError);
}

TEST(EstimateJson, ContainsPathsAndOptionalCfr) {
    const OfdmConfig cfg;
    const auto est = estimate(pilot_observation(MultipathChannel({1.0}, {1e-7}), cfg), cfg);
    const auto brief = estimate_to_json(est);
    EXPECT_NE(brief.find("\"detected_paths\": 1"), std::string::npos);
    EXPECT_NE(brief.find("\"delay_s\""), std::string::npos);
    EXPECT_EQ(brief.find("cfr_hat"), std::string::npos);
    EXPECT_NE(estimate_to_json(est, true).find("cfr_hat"), std::string::npos);
}

}  // namespace
}  // namespace gsdsce::gsd
