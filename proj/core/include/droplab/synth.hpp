#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "droplab/ingest.hpp"
#include "droplab/physics.hpp"

namespace droplab::synth {

// 64-bit linear congruential generator (Knuth MMIX constants). Outputs are
// taken from the high bits. Fully specified so noise is portable.
class Lcg64 {
 public:
  static constexpr std::uint64_t kMultiplier = 6364136223846793005ULL;
  static constexpr std::uint64_t kIncrement = 1442695040888963407ULL;

  explicit Lcg64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    state_ = state_ * kMultiplier + kIncrement;
    return state_;
  }
  std::uint32_t next_u32() noexcept { return static_cast<std::uint32_t>(next() >> 32); }
  // Uniform integer in [0, max_inclusive] by multiply-shift.
  std::uint32_t uniform_int(std::uint32_t max_inclusive) noexcept {
    return static_cast<std::uint32_t>((static_cast<std::uint64_t>(next_u32()) * (static_cast<std::uint64_t>(max_inclusive) + 1)) >> 32);
  }
  // Uniform double in [0, 1) from the top 53 bits.
  double uniform01() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform01(); }

 private:
  std::uint64_t state_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Seed of the per-frame noise generator: splitmix64(seed ^ frame_index).
inline std::uint64_t frame_noise_seed(std::uint64_t seed, int frame_index) noexcept {
  return splitmix64(seed ^ static_cast<std::uint64_t>(frame_index));
}

struct DropletSpec {
  double radius_um = 50.0;
  int spawn_frame = 0;
  double x0_px = 0.0;
  double y0_px = 0.0;
  double horizontal_velocity_um_s = 0.0;
};

struct Illumination {
  enum class Kind { Uniform, LinearGradient };
  Kind kind = Kind::Uniform;
  double top_gain = 1.0;
  double bottom_gain = 1.0;

  static Illumination uniform() { return {}; }
  static Illumination linear_gradient(double top, double bottom) { return {Kind::LinearGradient, top, bottom}; }

  // Gain at (possibly fractional) row y; linear between row 0 and row height-1.
  double gain(double y, int height) const noexcept;
};

inline Manifest default_manifest() {
  Manifest m;
  m.trial_id = "synthetic";
  return m;
}

struct SceneSpec {
  int width = 640;
  int height = 480;
  int frame_count = 240;
  Manifest manifest = default_manifest();
  std::vector<DropletSpec> droplets;
  Illumination illumination;
  double background_level = 0.0;  // scaled by the illumination gain of each row
  double transmission_factor = 1.0;
  int noise_amplitude = 0;  // uniform integer noise in [0, amplitude] per pixel
  std::uint64_t seed = 0;
};

enum class ExitKind { Bottom, Side };

std::string_view to_string(ExitKind kind) noexcept;

struct TruthPoint {
  int frame = 0;
  double x_px = 0.0;
  double y_px = 0.0;
};

struct DropletTruth {
  int droplet_id = 0;
  double radius_um = 0.0;
  int spawn_frame = 0;
  // First frame in which the droplet is no longer drawn. May lie beyond the
  // stack when the droplet is still in view at the end.
  int exit_frame = 0;
  ExitKind exit_kind = ExitKind::Bottom;
  double sigma_px = 1.0;
  double velocity_px_per_frame = 0.0;  // vertical
  std::vector<TruthPoint> path;        // centroid for every rendered frame

  bool exits_within(int frame_count) const noexcept { return exit_frame <= frame_count; }
};

struct TruthRecord {
  double truncation_sigmas = 3.0;
  double brightness_scale = 0.0;  // k in peak = k * R^2 * transmission * gain
  double um_per_pixel = 0.0;
  std::vector<DropletTruth> droplets;
};

struct RenderedScene {
  FrameStack stack;
  TruthRecord truth;
};

// Droplets fall at the Stokes terminal velocity from their spawn frame and
// drift sideways at their stated velocity. Each is drawn as an isotropic
// Gaussian, sigma = max(1, R / um_per_pixel), truncated at 3 sigma, with peak
// quantize(k R^2 T g(y)) where k makes a 100 um droplet peak at 255. The
// field is quantized (round half up) before noise is added. Frames are
// independent, so `threads` never changes the output. Throws SpecViolation.
RenderedScene render_scene(const SceneSpec& spec, const SedimentationModel& model = SedimentationModel{},
                           int threads = 1);

// k = 255 / (100 um)^2.
double brightness_scale() noexcept;

struct RandomSceneParams {
  int droplet_count = 10;
  double radius_min_um = 20.0;
  double radius_max_um = 100.0;
  int width = 640;
  int height = 480;
  int frame_count = 240;
  double fps = Manifest::kDefaultFps;
  double frame_height_um = Manifest::kDefaultFrameHeightUm;
  int spawn_frame = 5;          // earlier frames stay droplet-free
  int exit_margin_frames = 8;   // droplets leave this many frames before the end
  double top_margin_px = 6.0;
  int noise_amplitude = 0;
  double transmission_factor = 1.0;
  std::uint64_t seed = 1;
  std::string trial_id = "synthetic";
  std::optional<std::string> mask_label;
};

// Droplets in evenly spaced columns with seeded uniform radii. Spawn heights
// are chosen so that every droplet falls out through the bottom before the
// stack ends.
SceneSpec random_scene(const RandomSceneParams& params, const SedimentationModel& model = SedimentationModel{});

SceneSpec scene_from_json(const nlohmann::json& j);
nlohmann::json scene_to_json(const SceneSpec& spec);
nlohmann::json truth_to_json(const TruthRecord& truth);

}  // namespace droplab::synth
