#include <gtest/gtest.h>

#include <random>

#include "droplab/physics.hpp"
#include "expect_error.hpp"

using namespace droplab;
using droplab::testing::code_of;

namespace {
const SedimentationModel kModel;
constexpr double kPhi = 9.0 * 1.86e-8 / (2.0 * 1e-12 * 9.8e6);
}  // namespace

TEST(Model, PrefactorDerivedFromConstants) {
  EXPECT_DOUBLE_EQ(kModel.phi(), kPhi);
  EXPECT_NEAR(kModel.phi(), 0.85e-2, 0.01e-2);
  const SedimentationModel heavy(1.86e-8, 2e-12, 9.8e6);
  EXPECT_DOUBLE_EQ(heavy.phi(), kPhi / 2);
}

TEST(Model, RejectsNonPositiveConstants) {
  EXPECT_EQ(code_of([] { SedimentationModel(0, 1, 1); }), ErrorCode::NonPositiveInput);
  EXPECT_EQ(code_of([] { SedimentationModel(1, -1, 1); }), ErrorCode::NonPositiveInput);
  EXPECT_EQ(code_of([] { SedimentationModel(1, 1, 0); }), ErrorCode::NonPositiveInput);
}

TEST(SettlingTime, ReferenceRadiiFromOnePointFiveMetres) {
  EXPECT_NEAR(sedimentation_time(kModel, 1, 1.5e6), 12811.2, 0.1);
  EXPECT_NEAR(sedimentation_time(kModel, 10, 1.5e6), 128.112, 0.001);
  EXPECT_NEAR(sedimentation_time(kModel, 100, 1.5e6), 1.28112, 0.00001);
  // Rounded published values: 1.3e4 s, 130 s, 1.3 s.
  EXPECT_NEAR(sedimentation_time(kModel, 1, 1.5e6) / 1.3e4, 1.0, 0.02);
  EXPECT_NEAR(sedimentation_time(kModel, 10, 1.5e6) / 130, 1.0, 0.02);
  EXPECT_NEAR(sedimentation_time(kModel, 100, 1.5e6) / 1.3, 1.0, 0.02);
}

TEST(SettlingTime, ZeroHeight) { EXPECT_EQ(sedimentation_time(kModel, 10, 0), 0.0); }

TEST(SettlingTime, Errors) {
  EXPECT_EQ(code_of([] { sedimentation_time(kModel, 0, 1); }), ErrorCode::NonPositiveRadius);
  EXPECT_EQ(code_of([] { sedimentation_time(kModel, -3, 1); }), ErrorCode::NonPositiveRadius);
  EXPECT_EQ(code_of([] { sedimentation_time(kModel, 3, -1); }), ErrorCode::NonPositiveInput);
}

TEST(Velocity, DirectEvaluation) {
  EXPECT_DOUBLE_EQ(terminal_velocity(kModel, 10), 100 / kPhi);
  EXPECT_NEAR(terminal_velocity(kModel, 10), 1.17085e4, 1);
  const double v88 = terminal_velocity(kModel, 88);
  EXPECT_NEAR(v88 / 9.11e5, 1.0, 0.01);
  EXPECT_NEAR(1e5 / v88, 0.110, 0.001);
  EXPECT_EQ(code_of([] { terminal_velocity(kModel, 0); }), ErrorCode::NonPositiveRadius);
}

TEST(Radius, FallingTenCentimetres) {
  EXPECT_NEAR(estimate_radius(kModel, 1e5, 0.110), 88.1, 0.05);
  EXPECT_NEAR(estimate_radius(kModel, 1e5, 0.167), 71.5, 0.05);
  EXPECT_NEAR(estimate_radius(kModel, 1e5, 0.110), 88, 1);
  EXPECT_NEAR(estimate_radius(kModel, 1e5, 0.167), 71, 1);
  EXPECT_EQ(code_of([] { estimate_radius(kModel, 1e5, 0); }), ErrorCode::NonPositiveInput);
  EXPECT_EQ(code_of([] { estimate_radius(kModel, 0, 1); }), ErrorCode::NonPositiveInput);
}

TEST(Radius, MinimumDetectable) {
  EXPECT_NEAR(min_detectable_radius(kModel, 1e5, 10), 9.24, 0.01);
  EXPECT_NEAR(min_detectable_radius(kModel, 1e5, 10), 9.2, 0.05);
  EXPECT_NEAR(min_detectable_radius(kModel, 1e5, 40) / min_detectable_radius(kModel, 1e5, 10), 0.5, 1e-12);
  EXPECT_EQ(code_of([] { min_detectable_radius(kModel, 1e5, -1); }), ErrorCode::NonPositiveInput);
}

TEST(Properties, RoundTripAndScaling) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> lr(std::log(0.5), std::log(500.0)), lz(std::log(10.0), std::log(1e7));
  for (int i = 0; i < 1000; ++i) {
    const double r = std::exp(lr(rng)), z = std::exp(lz(rng));
    const double t = sedimentation_time(kModel, r, z);
    EXPECT_NEAR(estimate_radius(kModel, z, t) / r, 1.0, 1e-9);
    EXPECT_NEAR(t * terminal_velocity(kModel, r) / z, 1.0, 1e-12);
    EXPECT_NEAR(sedimentation_time(kModel, 2 * r, z) / t, 0.25, 1e-12);
    EXPECT_LT(sedimentation_time(kModel, r * 1.01, z), t);
    EXPECT_GT(sedimentation_time(kModel, r, z * 1.01), t);
    EXPECT_NEAR(estimate_radius(kModel, z, 4 * t) / r, 0.5, 1e-9);
  }
}
