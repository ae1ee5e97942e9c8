#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "droplab/imageproc.hpp"
#include "droplab/output.hpp"
#include "droplab/photometry.hpp"
#include "droplab/pipeline.hpp"
#include "droplab/synth.hpp"
#include "droplab/tracking.hpp"

namespace droplab::cli {

// Global flags shared by every subcommand.
struct Context {
  std::filesystem::path out_dir = ".";
  bool out_given = false;
  int threads = 1;
  std::optional<std::uint64_t> seed;
  std::ostream* out = nullptr;  // stdout-style sink
};

struct SeriesOptions {
  std::filesystem::path stack_dir;
  Region region = Region::Full;
  double decay_fraction = SeriesMetrics::kDefaultDecayFraction;
  int baseline_frames = BrightnessSeries::kDefaultBaselineFrames;
};

struct MontageOptions {
  std::filesystem::path stack_dir;
  std::optional<int> stride_frames;
  std::optional<double> interval_ms;
  std::optional<int> columns;
  double saturation_fraction = kDefaultSaturationFraction;
};

struct TrackOptions {
  std::filesystem::path stack_dir;
  DetectOptions detect;
  bool threshold_defaulted = true;
  LinkOptions link;
  MeasureOptions measure;
};

struct MasksOptions {
  std::vector<std::filesystem::path> trial_dirs;
  std::string control_label = "none";
  bool require_efficiency = true;
  double decay_fraction = SeriesMetrics::kDefaultDecayFraction;
  bool track_radii = false;
  TrackOptions tracking;  // stack_dir unused
};

struct PhysicsTableOptions {
  std::vector<double> radii_um;
  std::vector<double> heights_um;
};

struct SynthOptions {
  std::optional<std::filesystem::path> scene_file;
  synth::RandomSceneParams random;
};

// Stride for a montage: explicit, or round(interval_ms * fps / 1000), at least 1.
int montage_stride(const MontageOptions& options, double fps);

void cmd_series(const Context& ctx, const SeriesOptions& options);
void cmd_montage(const Context& ctx, const MontageOptions& options);
void cmd_track(const Context& ctx, const TrackOptions& options);
void cmd_masks(const Context& ctx, const MasksOptions& options);
void cmd_physics_table(const Context& ctx, const PhysicsTableOptions& options);
void cmd_physics_radius(const Context& ctx, double height_um, double time_s);
void cmd_physics_floor(const Context& ctx, double height_um, double max_time_s);
void cmd_synth(const Context& ctx, const SynthOptions& options);

}  // namespace droplab::cli
