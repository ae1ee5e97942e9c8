#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "droplab/pipeline.hpp"
#include "droplab/synth.hpp"
#include "droplab/tracking.hpp"
#include "expect_error.hpp"

using namespace droplab;
using droplab::testing::code_of;

namespace {

Detection det(int frame, double x, double y, int area = 9) {
  Detection d;
  d.frame_index = frame;
  d.centroid_x_px = x;
  d.centroid_y_px = y;
  d.area_px = area;
  d.mean_intensity = 50;
  d.peak_intensity = 80;
  return d;
}

Manifest manifest(double fps, std::optional<double> upp = std::nullopt) {
  Manifest m;
  m.trial_id = "t";
  m.fps = fps;
  m.um_per_pixel = upp;
  return m;
}

}  // namespace

TEST(Link, SingleChain) {
  std::vector<std::vector<Detection>> frames;
  for (int f = 0; f < 20; ++f) frames.push_back({det(f, 50, 10 + 5.0 * f)});
  const auto tracks = link_detections(frames, {.gate_px = 20, .max_gap_frames = 2});
  ASSERT_EQ(tracks.size(), 1u);
  EXPECT_EQ(tracks[0].detections.size(), 20u);
  EXPECT_EQ(tracks[0].start_frame(), 0);
  EXPECT_EQ(tracks[0].end_frame(), 19);
}

TEST(Link, WellSeparatedPairKeepsIdentity) {
  std::vector<std::vector<Detection>> frames;
  for (int f = 0; f < 15; ++f) frames.push_back({det(f, 200, 10 + 5.0 * f), det(f, 100, 10 + 5.0 * f)});
  const auto tracks = link_detections(frames, {.gate_px = 20});
  ASSERT_EQ(tracks.size(), 2u);
  for (const auto& t : tracks) {
    ASSERT_EQ(t.detections.size(), 15u);
    for (const auto& d : t.detections) EXPECT_EQ(d.centroid_x_px, t.detections.front().centroid_x_px);
  }
}

TEST(Link, BridgesGapsUpToLimitOnly) {
  std::vector<std::vector<Detection>> frames(12);
  for (int f : {0, 1, 2, 5, 6}) frames[static_cast<std::size_t>(f)] = {det(f, 10, 10 + 2.0 * f)};
  // Three empty frames before frame 10 exceed the gap limit.
  frames[10] = {det(10, 10, 30)};
  const auto tracks = link_detections(frames, {.gate_px = 25, .max_gap_frames = 2});
  ASSERT_EQ(tracks.size(), 2u);
  EXPECT_EQ(tracks[0].detections.size(), 5u);
  EXPECT_EQ(tracks[1].start_frame(), 10);
}

TEST(Link, GateRejectsFarDetections) {
  std::vector<std::vector<Detection>> frames = {{det(0, 10, 10)}, {det(1, 10, 40)}};
  EXPECT_EQ(link_detections(frames, {.gate_px = 25}).size(), 2u);
  EXPECT_EQ(link_detections(frames, {.gate_px = 30}).size(), 1u);
}

TEST(Link, EveryDetectionInExactlyOneTrackAndInputOrderIrrelevant) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0, 300);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<std::vector<Detection>> frames(25);
    std::size_t total = 0;
    for (int f = 0; f < 25; ++f) {
      const int n = static_cast<int>(rng() % 6);
      for (int i = 0; i < n; ++i) frames[static_cast<std::size_t>(f)].push_back(det(f, u(rng), u(rng)));
      total += static_cast<std::size_t>(n);
    }
    const auto tracks = link_detections(frames);
    std::set<std::tuple<int, double, double>> seen;
    std::size_t count = 0;
    for (const auto& t : tracks) {
      for (std::size_t i = 1; i < t.detections.size(); ++i)
        ASSERT_LT(t.detections[i - 1].frame_index, t.detections[i].frame_index);
      for (const auto& d : t.detections) {
        seen.emplace(d.frame_index, d.centroid_x_px, d.centroid_y_px);
        ++count;
      }
    }
    EXPECT_EQ(count, total);
    EXPECT_EQ(seen.size(), total);

    auto shuffled = frames;
    for (auto& f : shuffled) std::shuffle(f.begin(), f.end(), rng);
    const auto again = link_detections(shuffled);
    ASSERT_EQ(again.size(), tracks.size());
    for (std::size_t i = 0; i < tracks.size(); ++i) {
      EXPECT_EQ(again[i].track_id, tracks[i].track_id);
      EXPECT_EQ(again[i].detections, tracks[i].detections);
    }
  }
}

TEST(Measure, ReplayOfTenCentimetreFall) {
  // 100 fps, 100 um per pixel: 1000 px = 10 cm covered in 11 frames = 0.110 s.
  const Manifest m = manifest(100, 100.0);
  Track t;
  for (int f = 0; f <= 11; ++f) t.detections.push_back(det(f, 50, 2 + 1000.0 * f / 11));
  const auto out = measure_track(t, m, {.width = 100, .height = 1004, .frame_count = 40}, SedimentationModel{});
  EXPECT_TRUE(out.flags.has(TrackFlag::Complete));
  EXPECT_DOUBLE_EQ(out.fall_px, 1000);
  EXPECT_DOUBLE_EQ(out.fall_um, 1e5);
  EXPECT_DOUBLE_EQ(out.duration_s, 0.11);
  ASSERT_TRUE(out.radius_um_est);
  EXPECT_NEAR(*out.radius_um_est, 88, 1);
}

TEST(Measure, PredictedExitCountsAsComplete) {
  // Last centroid 10 px above the bottom, stepping 20 px per frame, lost early.
  const Manifest m = manifest(100, 10.0);
  Track t;
  for (int f = 0; f < 5; ++f) t.detections.push_back(det(f, 50, 109 + 20.0 * f));
  const auto out = measure_track(t, m, {.width = 100, .height = 200, .frame_count = 50}, SedimentationModel{});
  EXPECT_TRUE(out.flags.has(TrackFlag::Complete));
  EXPECT_TRUE(out.radius_um_est);
}

TEST(Measure, StillInViewIsOpen) {
  const Manifest m = manifest(100, 10.0);
  Track t;
  for (int f = 0; f < 5; ++f) t.detections.push_back(det(f, 50, 10 + 20.0 * f));
  const auto out = measure_track(t, m, {.width = 100, .height = 200, .frame_count = 5}, SedimentationModel{});
  EXPECT_FALSE(out.flags.has(TrackFlag::Complete));
  EXPECT_TRUE(out.flags.has(TrackFlag::Open));
  EXPECT_FALSE(out.radius_um_est);
}

TEST(Measure, ExitingLeftEdge) {
  const Manifest m = manifest(100, 10.0);
  Track t;
  for (int f = 0; f < 6; ++f) t.detections.push_back(det(f, 12 - 2.0 * f, 20 + 3.0 * f));
  const auto out = measure_track(t, m, {.width = 100, .height = 200, .frame_count = 50}, SedimentationModel{});
  EXPECT_TRUE(out.flags.has(TrackFlag::ExitedSide));
  EXPECT_FALSE(out.flags.has(TrackFlag::Complete));
  EXPECT_FALSE(out.radius_um_est);
  EXPECT_EQ(out.flags.to_string(), "exited_side");
}

TEST(Measure, StalledAndTooShort) {
  const Manifest m = manifest(100, 10.0);
  Track t;
  for (int f = 0; f < 4; ++f) t.detections.push_back(det(f, 50, 40));
  const auto out = measure_track(t, m, {.width = 100, .height = 200, .frame_count = 50}, SedimentationModel{});
  EXPECT_TRUE(out.flags.has(TrackFlag::Stalled));
  EXPECT_FALSE(out.radius_um_est);

  Track single;
  single.detections = {det(3, 50, 40)};
  EXPECT_EQ(code_of([&] { measure_track(single, m, {100, 200, 50}, SedimentationModel{}); }), ErrorCode::TooShort);
  const auto measured = measure_tracks({single}, m, {100, 200, 50}, SedimentationModel{});
  ASSERT_EQ(measured.size(), 1u);
  EXPECT_TRUE(measured[0].flags.has(TrackFlag::TooShort));
}

TEST(Measure, LongerDurationMeansSmallerRadius) {
  const Manifest m = manifest(100, 100.0);
  double previous = 1e9;
  for (int frames = 5; frames < 40; frames += 5) {
    Track t;
    for (int f = 0; f <= frames; ++f) t.detections.push_back(det(f, 50, 2 + 1000.0 * f / frames));
    const auto out = measure_track(t, m, {100, 1004, 100}, SedimentationModel{});
    ASSERT_TRUE(out.radius_um_est);
    EXPECT_LT(*out.radius_um_est, previous);
    previous = *out.radius_um_est;
  }
}

TEST(EndToEnd, TenDropletIdentities) {
  synth::RandomSceneParams params;
  params.seed = 7;
  const auto spec = synth::random_scene(params);
  const auto scene = synth::render_scene(spec);
  const auto result = track_stack(scene.stack, DetectOptions{}, LinkOptions{}, MeasureOptions{}, SedimentationModel{});
  ASSERT_EQ(result.tracks.size(), 10u);
  // Each track must follow a single generator droplet for its whole length.
  std::set<int> used;
  for (const auto& t : result.tracks) {
    std::map<int, int> votes;
    for (const auto& d : t.detections) {
      int best = -1;
      double best_dist = 1e9;
      for (const auto& truth : scene.truth.droplets)
        for (const auto& p : truth.path)
          if (p.frame == d.frame_index) {
            const double dist = std::hypot(p.x_px - d.centroid_x_px, p.y_px - d.centroid_y_px);
            if (dist < best_dist) {
              best_dist = dist;
              best = truth.droplet_id;
            }
          }
      ASSERT_LT(best_dist, 1.0);
      ++votes[best];
    }
    ASSERT_EQ(votes.size(), 1u) << "track " << t.track_id << " mixes droplets";
    EXPECT_TRUE(used.insert(votes.begin()->first).second);
    const auto& truth = scene.truth.droplets[static_cast<std::size_t>(votes.begin()->first)];
    EXPECT_EQ(t.start_frame(), truth.spawn_frame);
  }
}

TEST(EndToEnd, FortyMicronDropletWithinFivePercent) {
  synth::SceneSpec spec;
  spec.width = 120;
  spec.height = 240;
  spec.frame_count = 240;
  spec.manifest.frame_height_um = 240 * 100.0;  // about 8 px per frame
  spec.noise_amplitude = 3;
  spec.seed = 4;
  spec.droplets = {{.radius_um = 40, .spawn_frame = 5, .x0_px = 60, .y0_px = 8}};
  const auto scene = synth::render_scene(spec);
  ASSERT_LT(scene.truth.droplets[0].exit_frame, spec.frame_count);
  const auto result = track_stack(scene.stack, DetectOptions{}, LinkOptions{}, MeasureOptions{}, SedimentationModel{});
  ASSERT_EQ(result.tracks.size(), 1u);
  ASSERT_TRUE(result.tracks[0].radius_um_est);
  EXPECT_NEAR(*result.tracks[0].radius_um_est / 40.0, 1.0, 0.05);
}
