#include "cli.hpp"

#include <CLI11.hpp>

#include <ostream>

#include "commands.hpp"
#include "droplab/error.hpp"

namespace droplab::cli {

namespace {

std::string exit_code_table() {
  std::string out = "Exit codes:\n  0  success\n  1  unexpected failure\n  2  usage error\n";
  for (int i = 0; i <= static_cast<int>(ErrorCode::InvalidArgument); ++i) {
    const auto code = static_cast<ErrorCode>(i);
    out += "  " + std::to_string(exit_code(code)) + " " + std::string(to_string(code)) + "\n";
  }
  return out;
}

void add_tracking_flags(CLI::App* cmd, TrackOptions& o, std::string& method, std::optional<int>& level,
                        int& connectivity) {
  cmd->add_option("--threshold", method, "Threshold method")->check(CLI::IsMember({"fixed", "otsu"}));
  cmd->add_option("--level", level, "Fixed threshold level; pixel > level is foreground (default 4)")
      ->check(CLI::Range(0, 255));
  cmd->add_option("--min-area", o.detect.min_area, "Smallest component kept, in pixels")->check(CLI::PositiveNumber);
  cmd->add_option("--connectivity", connectivity, "Pixel connectivity")->check(CLI::IsMember({4, 8}));
  cmd->add_option("--flat-field", o.detect.flat_field_background_frames,
                  "Flat-field correct using this many leading droplet-free frames")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--gate", o.link.gate_px, "Linking gate in pixels")->check(CLI::PositiveNumber);
  cmd->add_option("--max-gap", o.link.max_gap_frames, "Frames a track may go unmatched")->check(CLI::NonNegativeNumber);
  cmd->add_option("--margin", o.measure.margin_px, "Bottom/side margin in pixels")->check(CLI::NonNegativeNumber);
}

void resolve_tracking(TrackOptions& o, const std::string& method, const std::optional<int>& level, int connectivity) {
  o.threshold_defaulted = method.empty() && !level;
  if (method == "otsu") {
    if (level) throw Error(ErrorCode::InvalidArgument, "--level applies to the fixed method only");
    o.detect.method = ThresholdMethod::otsu();
  } else {
    o.detect.method = ThresholdMethod::fixed(level.value_or(o.detect.method.level));
  }
  o.detect.connectivity = connectivity == 4 ? Connectivity::Four : Connectivity::Eight;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"droplab: analysis of fluorescent droplet frame stacks"};
  app.footer(exit_code_table());
  app.require_subcommand(1);
  app.fallthrough();

  Context ctx;
  ctx.out = &out;
  std::string out_dir;
  std::uint64_t seed = 0;
  app.add_option("--out", out_dir, "Output directory (default: current directory)");
  app.add_option("--threads", ctx.threads, "Worker threads")->check(CLI::Range(1, 256));
  auto* seed_opt = app.add_option("--seed", seed, "Seed for synthetic scenes");

  SeriesOptions series;
  std::string region = "full";
  auto* series_cmd = app.add_subcommand("series", "Brightness series, metrics and plot for one stack");
  series_cmd->add_option("stack_dir", series.stack_dir, "Frame directory")->required();
  series_cmd->add_option("--region", region, "Frame region")->check(CLI::IsMember({"full", "top", "bottom"}));
  series_cmd->add_option("--decay-fraction", series.decay_fraction, "Dissipation threshold above baseline")
      ->check(CLI::Range(0.0, 1.0));
  series_cmd->add_option("--baseline-frames", series.baseline_frames, "Leading frames averaged for the baseline")
      ->check(CLI::PositiveNumber);

  MontageOptions montage;
  auto* montage_cmd = app.add_subcommand("montage", "Grid of histogram-stretched frames");
  montage_cmd->add_option("stack_dir", montage.stack_dir, "Frame directory")->required();
  auto* stride_opt = montage_cmd->add_option("--stride", montage.stride_frames, "Frames between panels");
  auto* interval_opt = montage_cmd->add_option("--interval-ms", montage.interval_ms, "Milliseconds between panels");
  stride_opt->excludes(interval_opt);
  montage_cmd->add_option("--columns", montage.columns, "Panels per row")->check(CLI::PositiveNumber);
  montage_cmd->add_option("--saturation", montage.saturation_fraction, "Histogram clip fraction per tail")
      ->check(CLI::Range(0.0, 0.499999));

  TrackOptions track;
  std::string track_method;
  std::optional<int> track_level;
  int track_conn = 8;
  auto* track_cmd = app.add_subcommand("track", "Detect, link and measure falling droplets");
  track_cmd->add_option("stack_dir", track.stack_dir, "Frame directory")->required();
  add_tracking_flags(track_cmd, track, track_method, track_level, track_conn);

  MasksOptions masks;
  std::vector<std::string> trial_dirs;
  std::string masks_method;
  std::optional<int> masks_level;
  int masks_conn = 8;
  bool no_efficiency = false;
  auto* masks_cmd = app.add_subcommand("masks", "Compare masks across trial recordings");
  masks_cmd->add_option("trial_dirs", trial_dirs, "Trial frame directories")->required();
  masks_cmd->add_option("--control", masks.control_label, "Mask label of the unmasked control");
  masks_cmd->add_flag("--no-efficiency", no_efficiency, "Do not require a control group");
  masks_cmd->add_option("--decay-fraction", masks.decay_fraction, "Dissipation threshold above baseline")
      ->check(CLI::Range(0.0, 1.0));
  masks_cmd->add_flag("--track-radii", masks.track_radii, "Also report per-mask droplet radii from tracking");
  add_tracking_flags(masks_cmd, masks.tracking, masks_method, masks_level, masks_conn);

  auto* physics_cmd = app.add_subcommand("physics", "Stokes sedimentation calculations");
  physics_cmd->require_subcommand(1);
  PhysicsTableOptions table;
  auto* table_cmd = physics_cmd->add_subcommand("table", "Settling time for every radius/height pair (CSV)");
  table_cmd->add_option("--radii-um", table.radii_um, "Droplet radii in micrometres")->delimiter(',');
  table_cmd->add_option("--heights-um", table.heights_um, "Fall heights in micrometres")->delimiter(',');
  double radius_height = 0.0;
  double radius_time = 0.0;
  auto* radius_cmd = physics_cmd->add_subcommand("radius", "Radius from an observed fall");
  radius_cmd->add_option("--height-um", radius_height, "Fall height")->required();
  radius_cmd->add_option("--time-s", radius_time, "Fall time")->required();
  double floor_height = 0.0;
  double floor_time = 0.0;
  auto* floor_cmd = physics_cmd->add_subcommand("floor", "Smallest radius that falls through within a time window");
  floor_cmd->add_option("--height-um", floor_height, "Fall height")->required();
  floor_cmd->add_option("--max-time-s", floor_time, "Longest observable track")->required();

  SynthOptions synth;
  std::string scene_file;
  auto& rp = synth.random;
  auto* synth_cmd = app.add_subcommand("synth", "Render a synthetic frame directory with ground truth");
  synth_cmd->add_option("--scene", scene_file, "Scene JSON; otherwise a random scene is generated");
  synth_cmd->add_option("--droplets", rp.droplet_count, "Random scene: droplet count")->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("--radius-min", rp.radius_min_um, "Random scene: smallest radius (um)");
  synth_cmd->add_option("--radius-max", rp.radius_max_um, "Random scene: largest radius (um)");
  synth_cmd->add_option("--width", rp.width, "Frame width (px)")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--height", rp.height, "Frame height (px)")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--frames", rp.frame_count, "Frame count")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--fps", rp.fps, "Frames per second")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--frame-height-um", rp.frame_height_um, "Field height (um)")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--noise", rp.noise_amplitude, "Uniform noise amplitude")->check(CLI::Range(0, 255));
  synth_cmd->add_option("--transmission", rp.transmission_factor, "Mask transmission factor")->check(CLI::Range(0.0, 1.0));
  synth_cmd->add_option("--spawn-frame", rp.spawn_frame, "Frame at which droplets appear")->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("--trial-id", rp.trial_id, "Manifest trial_id");
  synth_cmd->add_option("--mask-label", rp.mask_label, "Manifest mask_label");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (!out_dir.empty()) {
      ctx.out_dir = out_dir;
      ctx.out_given = true;
    }
    if (seed_opt->count() > 0) ctx.seed = seed;

    if (*series_cmd) {
      series.region = region == "top" ? Region::TopHalf : region == "bottom" ? Region::BottomHalf : Region::Full;
      if (!(series.decay_fraction > 0.0 && series.decay_fraction < 1.0))
        throw Error(ErrorCode::InvalidArgument, "--decay-fraction must be in (0, 1)");
      cmd_series(ctx, series);
    } else if (*montage_cmd) {
      cmd_montage(ctx, montage);
    } else if (*track_cmd) {
      resolve_tracking(track, track_method, track_level, track_conn);
      cmd_track(ctx, track);
    } else if (*masks_cmd) {
      for (const auto& d : trial_dirs) masks.trial_dirs.emplace_back(d);
      masks.require_efficiency = !no_efficiency;
      if (!(masks.decay_fraction > 0.0 && masks.decay_fraction < 1.0))
        throw Error(ErrorCode::InvalidArgument, "--decay-fraction must be in (0, 1)");
      resolve_tracking(masks.tracking, masks_method, masks_level, masks_conn);
      cmd_masks(ctx, masks);
    } else if (*physics_cmd) {
      if (*table_cmd) cmd_physics_table(ctx, table);
      if (*radius_cmd) cmd_physics_radius(ctx, radius_height, radius_time);
      if (*floor_cmd) cmd_physics_floor(ctx, floor_height, floor_time);
    } else if (*synth_cmd) {
      if (!scene_file.empty()) synth.scene_file = scene_file;
      cmd_synth(ctx, synth);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace droplab::cli
