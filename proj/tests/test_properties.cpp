#include <gtest/gtest.h>

#include "properties.hpp"

namespace gsdsce::testing {
namespace {

void expect_pass(const PropertyResult& r) {
    EXPECT_GE(r.cases, kPropertyCases);
    EXPECT_EQ(r.failures, 0u) << r.name << ": " << r.first_failure;
}

TEST(Properties, VietaRelationsHoldForRecoveredRoots) { expect_pass(property_vieta()); }
TEST(Properties, DeterminantMatchesCofactorExpansion) { expect_pass(property_cofactor_det()); }
TEST(Properties, RoundtripRecoversInRangeChannels) { expect_pass(property_roundtrip()); }
TEST(Properties, AliasedDelaysLeaveEstimateUnchanged) { expect_pass(property_aliasing()); }
TEST(Properties, ScalingObservationScalesInitialTerms) { expect_pass(property_scale_equivariance()); }
TEST(Properties, NmseUsesEstimateNorm) { expect_pass(property_nmse_algebra()); }

}  // namespace
}  // namespace gsdsce::testing
