#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "droplab/imageproc.hpp"
#include "droplab/synth.hpp"
#include "expect_error.hpp"
#include "test_support.hpp"

using namespace droplab;
using droplab::testing::code_of;

namespace {

FrameStack stack_of(std::vector<GrayImage> frames) {
  Manifest m;
  m.trial_id = "t";
  return FrameStack(std::move(frames), m);
}

BinaryMask mask_from(const std::vector<std::string>& rows) {
  BinaryMask m(static_cast<int>(rows[0].size()), static_cast<int>(rows.size()));
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) m(x, y) = rows[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)] == '#';
  return m;
}

}  // namespace

// ---- histogram stretch -------------------------------------------------

TEST(Stretch, ConstantFrameIsZero) {
  const GrayImage out = histogram_stretch(GrayImage(8, 8, 77));
  for (auto p : out.pixels()) EXPECT_EQ(p, 0);
}

TEST(Stretch, EndpointsAndMidpoint) {
  GrayImage img(3, 1);
  img(0, 0) = 50;
  img(1, 0) = 100;
  img(2, 0) = 75;
  const GrayImage out = histogram_stretch(img, 0.0);
  EXPECT_EQ(out(0, 0), 0);
  EXPECT_EQ(out(1, 0), 255);
  EXPECT_EQ(out(2, 0), 128);
}

TEST(Stretch, LowContrastBlobReachesNearFullScale) {
  synth::SceneSpec spec;
  spec.width = 64;
  spec.height = 64;
  spec.frame_count = 1;
  spec.background_level = 10;
  spec.droplets = {{.radius_um = 30, .spawn_frame = 0, .x0_px = 32, .y0_px = 32}};
  spec.manifest.frame_height_um = 64 * 10.0;  // sigma = 3 px
  const auto scene = synth::render_scene(spec);
  const GrayImage& frame = scene.stack.frame(0);
  int raw_max = *std::max_element(frame.pixels().begin(), frame.pixels().end());
  ASSERT_LT(raw_max, 60);
  const GrayImage out = histogram_stretch(frame);
  EXPECT_GE(*std::max_element(out.pixels().begin(), out.pixels().end()), 250);
}

TEST(Stretch, MatchesSortedQuantileOracle) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const int lo = static_cast<int>(rng() % 100);
    const GrayImage img = droplab::testing::random_frame(rng, 1 + static_cast<int>(rng() % 40),
                                                         1 + static_cast<int>(rng() % 40), lo,
                                                         lo + static_cast<int>(rng() % 150));
    const double f = static_cast<double>(rng() % 100) / 1000.0;
    const auto [qlo, qhi] = droplab::testing::sorted_quantiles(img, f);
    const GrayImage out = histogram_stretch(img, f);
    for (std::size_t i = 0; i < img.size(); ++i) {
      const int v = img.pixels()[i];
      int expected;
      if (qhi <= qlo) {
        expected = 0;
      } else {
        const double scaled = 255.0 * (std::clamp(v, qlo, qhi) - qlo) / (qhi - qlo);
        expected = static_cast<int>(std::floor(scaled + 0.5));
      }
      ASSERT_EQ(out.pixels()[i], expected) << "trial " << trial << " value " << v;
    }
  }
}

TEST(Stretch, IsMonotone) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const GrayImage img = droplab::testing::random_frame(rng, 17, 13);
    const GrayImage out = histogram_stretch(img);
    for (std::size_t i = 0; i < img.size(); ++i)
      for (std::size_t j = 0; j < img.size(); ++j)
        if (img.pixels()[i] <= img.pixels()[j]) ASSERT_LE(out.pixels()[i], out.pixels()[j]);
  }
}

TEST(Stretch, RejectsBadFraction) {
  EXPECT_EQ(code_of([] { histogram_stretch(GrayImage(2, 2), 0.5); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { histogram_stretch(GrayImage(2, 2), -0.1); }), ErrorCode::InvalidArgument);
}

// ---- illumination profile and flat field -------------------------------

TEST(Illumination, UniformBackgroundGivesUnitGains) {
  const auto profile = estimate_illumination_profile(stack_of({GrayImage(6, 5, 100), GrayImage(6, 5, 100)}), 2);
  ASSERT_EQ(profile.gains.size(), 5u);
  for (double g : profile.gains) EXPECT_DOUBLE_EQ(g, 1.0);
}

TEST(Illumination, TwoLevelField) {
  const GrayImage f = droplab::testing::split_frame(4, 6, 200, 50);
  const auto profile = estimate_illumination_profile(stack_of({f, f, f}), 3);
  for (int y = 0; y < 3; ++y) EXPECT_DOUBLE_EQ(profile.gains[static_cast<std::size_t>(y)], 1.0);
  for (int y = 3; y < 6; ++y) EXPECT_DOUBLE_EQ(profile.gains[static_cast<std::size_t>(y)], 0.25);
}

TEST(Illumination, LinearGradientRecovered) {
  const int h = 41;
  GrayImage f(8, h);
  std::vector<int> rows;
  for (int y = 0; y < h; ++y) {
    const int v = static_cast<int>(std::floor(200.0 - 160.0 * y / (h - 1) + 0.5));
    rows.push_back(v);
    for (int x = 0; x < 8; ++x) f(x, y) = static_cast<std::uint8_t>(v);
  }
  const auto profile = estimate_illumination_profile(stack_of({f, f, f, f, f}), 5);
  for (int y = 0; y < h; ++y) {
    EXPECT_DOUBLE_EQ(profile.gains[static_cast<std::size_t>(y)], rows[static_cast<std::size_t>(y)] / 200.0);
    EXPECT_NEAR(profile.gains[static_cast<std::size_t>(y)], 1.0 - 0.8 * y / (h - 1), 0.5 / 200.0);
  }
}

TEST(Illumination, TemporalMedianRejectsTransients) {
  GrayImage bright(4, 4, 100);
  GrayImage spike = bright;
  spike(1, 3) = 255;
  const auto profile = estimate_illumination_profile(stack_of({bright, spike, bright}), 3);
  for (double g : profile.gains) EXPECT_DOUBLE_EQ(g, 1.0);
}

TEST(Illumination, FloorAndAllDark) {
  const GrayImage f = droplab::testing::split_frame(4, 4, 100, 0);
  const auto profile = estimate_illumination_profile(stack_of({f}), 1);
  EXPECT_DOUBLE_EQ(profile.gains[3], IlluminationProfile::kDefaultFloor);
  EXPECT_EQ(code_of([] { estimate_illumination_profile(stack_of({GrayImage(4, 4)}), 1); }),
            ErrorCode::AllDarkBackground);
}

TEST(FlatField, IdentityUnderUnitGains) {
  std::mt19937_64 rng(8);
  const GrayImage img = droplab::testing::random_frame(rng, 10, 7);
  IlluminationProfile unit{std::vector<double>(7, 1.0)};
  EXPECT_EQ(flat_field_correct(img, unit), img);
}

TEST(FlatField, SelfCorrectionFlattensField) {
  const GrayImage f = droplab::testing::split_frame(4, 6, 200, 50);
  const auto profile = estimate_illumination_profile(stack_of({f}), 1);
  const GrayImage out = flat_field_correct(f, profile);
  for (auto p : out.pixels()) EXPECT_NEAR(p, 200, 1);
}

TEST(FlatField, DimensionMismatch) {
  IlluminationProfile p{std::vector<double>(3, 1.0)};
  EXPECT_EQ(code_of([&] { flat_field_correct(GrayImage(4, 4), p); }), ErrorCode::DimensionMismatch);
}

TEST(FlatField, EqualDropletsMatchAfterCorrection) {
  synth::SceneSpec spec;
  spec.width = 80;
  spec.height = 200;
  spec.frame_count = 6;
  spec.manifest.frame_height_um = 200 * 20.0;  // sigma = 3 px for R = 60
  spec.illumination = synth::Illumination::linear_gradient(1.0, 0.25);
  spec.background_level = 60;
  spec.droplets = {{.radius_um = 60, .spawn_frame = 5, .x0_px = 40, .y0_px = 15},
                   {.radius_um = 60, .spawn_frame = 5, .x0_px = 40, .y0_px = 185}};
  const auto scene = synth::render_scene(spec);
  const auto profile = estimate_illumination_profile(scene.stack, 5);
  const GrayImage corrected = flat_field_correct(scene.stack.frame(5), profile);
  const GrayImage background = flat_field_correct(scene.stack.frame(0), profile);
  const double top = corrected(40, 15) - background(40, 15);
  const double bottom = corrected(40, 185) - background(40, 185);
  ASSERT_GT(top, 50);
  EXPECT_NEAR(bottom / top, 1.0, 0.05);
  // Uncorrected the two differ by the illumination ratio.
  const GrayImage& raw = scene.stack.frame(5);
  EXPECT_LT((raw(40, 185) - scene.stack.frame(0)(40, 185)) / static_cast<double>(raw(40, 15) - scene.stack.frame(0)(40, 15)),
            0.5);
}

// ---- threshold ---------------------------------------------------------

TEST(Threshold, FixedLevel) {
  GrayImage img(2, 1);
  img(0, 0) = 90;
  img(1, 0) = 110;
  const auto r = threshold(img, ThresholdMethod::fixed(100));
  EXPECT_EQ(r.mask(0, 0), 0);
  EXPECT_EQ(r.mask(1, 0), 1);
  EXPECT_EQ(r.level, 100);
  EXPECT_FALSE(r.degenerate);
}

TEST(Threshold, OtsuBimodalPicksLowestSeparatingLevel) {
  const GrayImage img = droplab::testing::split_frame(8, 8, 0, 255);
  const auto r = threshold(img, ThresholdMethod::otsu());
  EXPECT_EQ(r.level, 0);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) EXPECT_EQ(r.mask(x, y), y < 4 ? 0 : 1);
}

TEST(Threshold, OtsuOnConstantFrameIsDegenerate) {
  const auto r = threshold(GrayImage(5, 5, 42), ThresholdMethod::otsu());
  EXPECT_TRUE(r.degenerate);
  for (auto p : r.mask.pixels()) EXPECT_EQ(p, 0);
  EXPECT_FALSE(otsu_level(histogram(GrayImage(5, 5, 42))));
}

TEST(Threshold, OtsuMatchesBruteForceOracle) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    GrayImage img;
    switch (trial % 3) {
      case 0: img = droplab::testing::random_frame(rng, 1 + static_cast<int>(rng() % 30), 1 + static_cast<int>(rng() % 30)); break;
      case 1: {
        // Two clusters of uneven size.
        img = droplab::testing::random_frame(rng, 24, 24, 10, 40);
        const int n = static_cast<int>(rng() % 200);
        for (int i = 0; i < n; ++i) img.pixels()[rng() % img.size()] = static_cast<std::uint8_t>(150 + rng() % 60);
        break;
      }
      default: img = droplab::testing::random_frame(rng, 6, 6, 0, 3); break;
    }
    const int expected = droplab::testing::brute_force_otsu(img);
    const auto got = otsu_level(histogram(img));
    if (expected < 0) {
      EXPECT_FALSE(got) << "trial " << trial;
    } else {
      ASSERT_TRUE(got) << "trial " << trial;
      EXPECT_EQ(*got, expected) << "trial " << trial;
    }
  }
}

TEST(Threshold, OtsuSeparatesDropletFromBackground) {
  synth::SceneSpec spec;
  spec.width = 64;
  spec.height = 64;
  spec.frame_count = 1;
  spec.noise_amplitude = 6;
  spec.seed = 2;
  spec.droplets = {{.radius_um = 100, .spawn_frame = 0, .x0_px = 32, .y0_px = 32}};
  spec.manifest.frame_height_um = 64 * 25.0;
  const auto scene = synth::render_scene(spec);
  const auto r = threshold(scene.stack.frame(0), ThresholdMethod::otsu());
  EXPECT_EQ(r.level, droplab::testing::brute_force_otsu(scene.stack.frame(0)));
  EXPECT_EQ(r.mask(32, 32), 1);
  EXPECT_EQ(r.mask(2, 2), 0);
}

// ---- segmentation ------------------------------------------------------

TEST(Segment, EmptyMaskGivesNoDetections) {
  EXPECT_TRUE(segment(BinaryMask(10, 10), GrayImage(10, 10), 0).empty());
}

TEST(Segment, TwoSquareBlocks) {
  const BinaryMask m = mask_from({"..........",
                                  ".###......",
                                  ".###......",
                                  ".###......",
                                  "..........",
                                  "......###.",
                                  "......###.",
                                  "......###."});
  GrayImage src(10, 8, 9);
  const auto d = segment(m, src, 3);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_DOUBLE_EQ(d[0].centroid_x_px, 2.0);
  EXPECT_DOUBLE_EQ(d[0].centroid_y_px, 2.0);
  EXPECT_DOUBLE_EQ(d[1].centroid_x_px, 7.0);
  EXPECT_DOUBLE_EQ(d[1].centroid_y_px, 6.0);
  for (const auto& det : d) {
    EXPECT_EQ(det.area_px, 9);
    EXPECT_EQ(det.frame_index, 3);
    EXPECT_DOUBLE_EQ(det.mean_intensity, 9.0);
    EXPECT_EQ(det.peak_intensity, 9);
  }
}

TEST(Segment, IntensityWeightedCentroid) {
  const BinaryMask m = mask_from({"###"});
  GrayImage src(3, 1);
  src(0, 0) = 10;
  src(1, 0) = 10;
  src(2, 0) = 20;
  const auto d = segment(m, src, 0);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_DOUBLE_EQ(d[0].centroid_x_px, (0 * 10 + 1 * 10 + 2 * 20) / 40.0);
  EXPECT_EQ(d[0].peak_intensity, 20);
}

TEST(Segment, MinAreaAndConnectivity) {
  const BinaryMask m = mask_from({"##....",
                                  "##....",
                                  "..##..",
                                  "..##..",
                                  ".....#"});
  GrayImage src(6, 5, 50);
  EXPECT_EQ(segment(m, src, 0, 3, Connectivity::Eight).size(), 1u);
  EXPECT_EQ(segment(m, src, 0, 3, Connectivity::Four).size(), 2u);
  EXPECT_EQ(segment(m, src, 0, 1, Connectivity::Four).size(), 3u);
  EXPECT_EQ(segment(m, src, 0, 1, Connectivity::Eight).size(), 2u);
}

TEST(Segment, RecoversGaussianBlobCentres) {
  synth::SceneSpec spec;
  spec.width = 200;
  spec.height = 120;
  spec.frame_count = 1;
  spec.manifest.frame_height_um = 120 * 20.0;
  const double xs[] = {20.3, 50.7, 80.5, 110.2, 140.9, 170.4, 100.0};
  const double ys[] = {30.25, 60.6, 40.1, 90.9, 25.5, 70.75, 15.3};
  const double rs[] = {40, 60, 80, 100, 50, 70, 90};
  for (int i = 0; i < 7; ++i) spec.droplets.push_back({.radius_um = rs[i], .spawn_frame = 0, .x0_px = xs[i], .y0_px = ys[i]});
  const auto scene = synth::render_scene(spec);
  const auto r = threshold(scene.stack.frame(0), ThresholdMethod::fixed(4));
  const auto det = segment(r.mask, scene.stack.frame(0), 0);
  ASSERT_EQ(det.size(), 7u);
  for (const auto& truth : scene.truth.droplets) {
    const auto& p = truth.path.front();
    const auto it = std::min_element(det.begin(), det.end(), [&](const Detection& a, const Detection& b) {
      return std::hypot(a.centroid_x_px - p.x_px, a.centroid_y_px - p.y_px) <
             std::hypot(b.centroid_x_px - p.x_px, b.centroid_y_px - p.y_px);
    });
    EXPECT_LT(std::hypot(it->centroid_x_px - p.x_px, it->centroid_y_px - p.y_px), 0.5) << "droplet " << truth.droplet_id;
  }
}

TEST(Segment, OutputOrderedAndMirrorEquivariant) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const GrayImage src = droplab::testing::random_frame(rng, 30, 20);
    const auto mask = threshold(src, ThresholdMethod::fixed(200)).mask;
    const auto det = segment(mask, src, 0, 1);
    for (std::size_t i = 1; i < det.size(); ++i)
      ASSERT_TRUE(std::pair(det[i - 1].centroid_y_px, det[i - 1].centroid_x_px) <=
                  std::pair(det[i].centroid_y_px, det[i].centroid_x_px));
    GrayImage mirrored(30, 20);
    for (int y = 0; y < 20; ++y)
      for (int x = 0; x < 30; ++x) mirrored(29 - x, y) = src(x, y);
    const auto mdet = segment(threshold(mirrored, ThresholdMethod::fixed(200)).mask, mirrored, 0, 1);
    ASSERT_EQ(mdet.size(), det.size());
    std::vector<std::tuple<double, double, int>> a, b;
    for (const auto& d : det) a.emplace_back(std::round((29 - d.centroid_x_px) * 1e9), std::round(d.centroid_y_px * 1e9), d.area_px);
    for (const auto& d : mdet) b.emplace_back(std::round(d.centroid_x_px * 1e9), std::round(d.centroid_y_px * 1e9), d.area_px);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    EXPECT_EQ(a, b);
  }
}
