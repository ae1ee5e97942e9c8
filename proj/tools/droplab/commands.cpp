#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "droplab/efficacy.hpp"
#include "droplab/error.hpp"
#include "droplab/image_io.hpp"
#include "droplab/ingest.hpp"
#include "droplab/parallel.hpp"

namespace droplab::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";

fs::path prepare_out_dir(const Context& ctx) {
  std::error_code ec;
  fs::create_directories(ctx.out_dir, ec);
  if (ec || !fs::is_directory(ctx.out_dir))
    throw Error(ErrorCode::UnwritableOutput, "cannot create output directory " + ctx.out_dir.string());
  return ctx.out_dir;
}

ConfigEcho base_config(const Context& ctx, const std::string& command) {
  ConfigEcho c{{"droplab_version", kVersion}, {"command", command}};
  if (ctx.seed) c.emplace_back("seed", std::to_string(*ctx.seed));
  return c;
}

std::string region_name(Region r) {
  switch (r) {
    case Region::Full: return "full";
    case Region::TopHalf: return "top";
    case Region::BottomHalf: return "bottom";
  }
  return "full";
}

std::string method_name(const ThresholdMethod& m) { return m.kind == ThresholdMethod::Kind::Otsu ? "otsu" : "fixed"; }

std::vector<std::pair<std::string, std::string>> png_text(const ConfigEcho& config) {
  std::string body;
  for (const auto& [k, v] : config) body += k + "=" + v + "\n";
  return {{"droplab-config", body}};
}

void add_tracking_config(ConfigEcho& c, const TrackOptions& o) {
  c.emplace_back("threshold", method_name(o.detect.method));
  if (o.detect.method.kind == ThresholdMethod::Kind::Fixed) c.emplace_back("level", std::to_string(o.detect.method.level));
  c.emplace_back("threshold_source", o.threshold_defaulted ? "default" : "user");
  c.emplace_back("min_area", std::to_string(o.detect.min_area));
  c.emplace_back("connectivity", std::to_string(static_cast<int>(o.detect.connectivity)));
  c.emplace_back("flat_field_background_frames",
                 o.detect.flat_field_background_frames ? std::to_string(*o.detect.flat_field_background_frames) : "off");
  c.emplace_back("gate_px", format_number(o.link.gate_px));
  c.emplace_back("max_gap_frames", std::to_string(o.link.max_gap_frames));
  c.emplace_back("margin_px", format_number(o.measure.margin_px));
}

// Bresenham segment.
void draw_line(GrayImage& img, int x0, int y0, int x1, int y1, std::uint8_t value) {
  const int dx = std::abs(x1 - x0);
  const int dy = -std::abs(y1 - y0);
  const int sx = x0 < x1 ? 1 : -1;
  const int sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  while (true) {
    if (x0 >= 0 && y0 >= 0 && x0 < img.width() && y0 < img.height()) img(x0, y0) = value;
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

int pixel(double v) { return static_cast<int>(round_half_up(v)); }

}  // namespace

void cmd_series(const Context& ctx, const SeriesOptions& o) {
  const FrameStack stack = load_stack(o.stack_dir, {ctx.threads});
  const fs::path dir = prepare_out_dir(ctx);
  const BrightnessSeries series = brightness_series(stack, o.region, o.baseline_frames, ctx.threads);
  const SeriesMetrics metrics = series_metrics(series, o.decay_fraction);

  ConfigEcho config = base_config(ctx, "series");
  config.emplace_back("input", o.stack_dir.string());
  config.emplace_back("trial_id", stack.manifest().trial_id);
  config.emplace_back("fps", format_number(stack.fps()));
  config.emplace_back("region", region_name(o.region));
  config.emplace_back("baseline_frames", std::to_string(series.baseline_frames));
  config.emplace_back("decay_fraction", format_number(o.decay_fraction));

  std::string csv = csv_preamble(config) + "trial_id,frame_index,time_s,mean_brightness\n";
  for (const auto& s : series.samples) {
    csv += series.trial_id + "," + std::to_string(s.frame_index) + "," + format_number(s.time_s) + "," +
           format_number(s.mean_brightness) + "\n";
  }
  write_file_atomic(dir / "series.csv", csv);

  std::string mcsv = csv_preamble(config) + "trial_id,peak_value,peak_frame,peak_time_s,dissipation_s,baseline,flags\n";
  mcsv += series.trial_id + "," + format_number(metrics.peak_value) + "," + std::to_string(metrics.peak_frame) + "," +
          format_number(metrics.peak_time_s) + "," + format_number(metrics.dissipation_s) + "," +
          format_number(metrics.baseline) + "," + metrics.flags() + "\n";
  write_file_atomic(dir / "metrics.csv", mcsv);

  svg::LinePlot plot;
  plot.title = "Mean brightness: " + series.trial_id;
  plot.x_label = "time (s)";
  plot.y_label = "mean brightness";
  for (const auto& s : series.samples) {
    plot.x.push_back(s.time_s);
    plot.y.push_back(s.mean_brightness);
  }
  plot.marker = static_cast<std::size_t>(metrics.peak_frame);
  write_file_atomic(dir / "series.svg", svg::render(plot, config));
}

int montage_stride(const MontageOptions& o, double fps) {
  if (o.stride_frames) {
    if (*o.stride_frames < 1) throw Error(ErrorCode::InvalidArgument, "stride must be at least 1");
    return *o.stride_frames;
  }
  if (o.interval_ms) {
    if (!(*o.interval_ms > 0.0)) throw Error(ErrorCode::InvalidArgument, "interval must be positive");
    return std::max(1, static_cast<int>(round_half_up(*o.interval_ms * fps / 1000.0)));
  }
  throw Error(ErrorCode::InvalidArgument, "montage needs --stride or --interval-ms");
}

void cmd_montage(const Context& ctx, const MontageOptions& o) {
  const FrameStack stack = load_stack(o.stack_dir, {ctx.threads});
  const int stride = montage_stride(o, stack.fps());
  if (static_cast<std::size_t>(stride) > stack.size())
    throw Error(ErrorCode::StrideExceedsStack,
                "stride " + std::to_string(stride) + " exceeds " + std::to_string(stack.size()) + " frames");
  const fs::path dir = prepare_out_dir(ctx);

  std::vector<std::size_t> picks;
  for (std::size_t i = 0; i < stack.size(); i += static_cast<std::size_t>(stride)) picks.push_back(i);
  const int panels = static_cast<int>(picks.size());
  const int columns = o.columns ? std::clamp(*o.columns, 1, panels)
                                : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(panels))));
  const int rows = (panels + columns - 1) / columns;
  constexpr int kGap = 2;
  const int w = stack.width();
  const int h = stack.height();
  GrayImage canvas(columns * w + (columns - 1) * kGap, rows * h + (rows - 1) * kGap, 128);

  std::vector<GrayImage> stretched(picks.size());
  parallel_for(picks.size(), ctx.threads,
               [&](std::size_t p) { stretched[p] = histogram_stretch(stack.frame(picks[p]), o.saturation_fraction); });
  for (int p = 0; p < panels; ++p) {
    const int ox = (p % columns) * (w + kGap);
    const int oy = (p / columns) * (h + kGap);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) canvas(ox + x, oy + y) = stretched[static_cast<std::size_t>(p)](x, y);
    }
  }

  ConfigEcho config = base_config(ctx, "montage");
  config.emplace_back("input", o.stack_dir.string());
  config.emplace_back("trial_id", stack.manifest().trial_id);
  config.emplace_back("stride_frames", std::to_string(stride));
  if (o.interval_ms) config.emplace_back("interval_ms", format_number(*o.interval_ms));
  config.emplace_back("panels", std::to_string(panels));
  config.emplace_back("columns", std::to_string(columns));
  config.emplace_back("gap_px", std::to_string(kGap));
  config.emplace_back("saturation_fraction", format_number(o.saturation_fraction));
  std::string frames;
  for (std::size_t p : picks) frames += (frames.empty() ? "" : " ") + std::to_string(p);
  config.emplace_back("frames", frames);
  write_file_atomic(dir / "montage.png", io::encode_png(canvas, png_text(config)));
  if (ctx.out != nullptr) *ctx.out << "montage: " << panels << " panels, stride " << stride << "\n";
}

void cmd_track(const Context& ctx, const TrackOptions& o) {
  const FrameStack stack = load_stack(o.stack_dir, {ctx.threads});
  const fs::path dir = prepare_out_dir(ctx);
  const SedimentationModel model;
  const TrackingResult result = track_stack(stack, o.detect, o.link, o.measure, model, ctx.threads);
  const std::string& trial = stack.manifest().trial_id;

  ConfigEcho config = base_config(ctx, "track");
  config.emplace_back("input", o.stack_dir.string());
  config.emplace_back("trial_id", trial);
  config.emplace_back("fps", format_number(stack.fps()));
  config.emplace_back("um_per_pixel", format_number(stack.um_per_pixel()));
  add_tracking_config(config, o);
  if (result.degenerate_frames > 0) config.emplace_back("degenerate_threshold_frames", std::to_string(result.degenerate_frames));

  std::string dcsv = csv_preamble(config) + "trial_id,frame_index,x_px,y_px,area_px,mean_intensity,peak_intensity\n";
  for (const auto& frame : result.detections) {
    for (const auto& d : frame) {
      dcsv += trial + "," + std::to_string(d.frame_index) + "," + format_number(d.centroid_x_px) + "," +
              format_number(d.centroid_y_px) + "," + std::to_string(d.area_px) + "," +
              format_number(d.mean_intensity) + "," + std::to_string(d.peak_intensity) + "\n";
    }
  }
  write_file_atomic(dir / "detections.csv", dcsv);

  std::string tcsv = csv_preamble(config) +
                     "trial_id,track_id,start_frame,end_frame,fall_px,fall_um,duration_s,radius_um_est,flags\n";
  for (const auto& t : result.tracks) {
    tcsv += trial + "," + std::to_string(t.track_id) + "," + std::to_string(t.start_frame()) + "," +
            std::to_string(t.end_frame()) + "," + format_number(t.fall_px) + "," + format_number(t.fall_um) + "," +
            format_number(t.duration_s) + "," + format_number(t.radius_um_est) + "," + t.flags.to_string() + "\n";
  }
  write_file_atomic(dir / "tracks.csv", tcsv);

  GrayImage overlay = stack.frame(stack.size() - 1);
  for (const auto& t : result.tracks) {
    const auto& ds = t.detections;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      const std::size_t j = i + 1 < ds.size() ? i + 1 : i;
      draw_line(overlay, pixel(ds[i].centroid_x_px), pixel(ds[i].centroid_y_px), pixel(ds[j].centroid_x_px),
                pixel(ds[j].centroid_y_px), 255);
    }
  }
  write_file_atomic(dir / "overlay.png", io::encode_png(overlay, png_text(config)));

  if (ctx.out != nullptr) {
    const auto complete = std::count_if(result.tracks.begin(), result.tracks.end(),
                                        [](const Track& t) { return t.flags.has(TrackFlag::Complete); });
    *ctx.out << "track: " << result.tracks.size() << " tracks, " << complete << " complete\n";
  }
}

void cmd_masks(const Context& ctx, const MasksOptions& o) {
  if (o.trial_dirs.empty()) throw Error(ErrorCode::EmptyInput, "no trial directories given");
  const SedimentationModel model;
  std::vector<TrialRecord> trials;
  std::map<std::string, std::vector<double>> radii;
  for (const auto& path : o.trial_dirs) {
    const FrameStack stack = load_stack(path, {ctx.threads});
    const Manifest& m = stack.manifest();
    if (!m.mask_label) throw Error(ErrorCode::InvalidField, "manifest of " + path.string() + " has no mask_label");
    const BrightnessSeries series = brightness_series(stack, Region::Full, BrightnessSeries::kDefaultBaselineFrames, ctx.threads);
    trials.push_back({m.trial_id, *m.mask_label, series_metrics(series, o.decay_fraction), m.loudness_db});
    if (o.track_radii) {
      const auto result = track_stack(stack, o.tracking.detect, o.tracking.link, o.tracking.measure, model, ctx.threads);
      auto& bucket = radii[*m.mask_label];
      for (const auto& t : result.tracks) {
        if (t.radius_um_est) bucket.push_back(*t.radius_um_est);
      }
    }
  }
  EfficacyReport report = build_report(trials, {o.control_label, o.require_efficiency});
  for (auto& mask : report.masks) {
    auto it = radii.find(mask.label);
    if (it == radii.end()) continue;
    mask.track_radii_um = it->second;
    std::sort(mask.track_radii_um.begin(), mask.track_radii_um.end());
  }
  const fs::path dir = prepare_out_dir(ctx);

  ConfigEcho config = base_config(ctx, "masks");
  std::vector<std::string> sorted_inputs;
  for (const auto& p : o.trial_dirs) sorted_inputs.push_back(p.string());
  std::sort(sorted_inputs.begin(), sorted_inputs.end());
  std::string inputs;
  for (const auto& p : sorted_inputs) inputs += (inputs.empty() ? "" : " ") + p;
  config.emplace_back("inputs", inputs);
  config.emplace_back("control_label", o.control_label);
  config.emplace_back("efficiency", o.require_efficiency ? "required" : "optional");
  config.emplace_back("decay_fraction", format_number(o.decay_fraction));
  config.emplace_back("baseline_frames", std::to_string(BrightnessSeries::kDefaultBaselineFrames));
  config.emplace_back("std_dev", "population");
  config.emplace_back("track_radii", o.track_radii ? "on" : "off");
  if (o.track_radii) add_tracking_config(config, o.tracking);

  std::string csv = csv_preamble(config) +
                    "mask_label,trials,mean_peak,stddev_peak,cv,mean_baseline,blocking_efficiency,rank,flags\n";
  for (std::size_t r = 0; r < report.ranking.size(); ++r) {
    const MaskSummary& m = report.mask(report.ranking[r]);
    std::string flags;
    if (m.clamped) flags = "clamped";
    if (m.degenerate_control) flags += flags.empty() ? "degenerate_control" : "|degenerate_control";
    csv += m.label + "," + std::to_string(m.trials) + "," + format_number(m.mean_peak) + "," +
           format_number(m.stddev_peak) + "," + format_number(m.cv) + "," + format_number(m.mean_baseline) + "," +
           format_number(m.blocking_efficiency) + "," + std::to_string(r + 1) + "," + flags + "\n";
  }
  write_file_atomic(dir / "report.csv", csv);

  nlohmann::json j;
  nlohmann::json jc = nlohmann::json::object();
  for (const auto& [k, v] : config) jc[k] = v;
  j["config"] = jc;
  j["report"] = report_to_json(report);
  std::vector<const TrialRecord*> ordered;
  for (const auto& t : trials) ordered.push_back(&t);
  std::sort(ordered.begin(), ordered.end(), [](auto* a, auto* b) { return a->trial_id < b->trial_id; });
  j["trials"] = nlohmann::json::array();
  for (const TrialRecord* t : ordered) {
    nlohmann::json row;
    row["trial_id"] = t->trial_id;
    row["mask_label"] = t->mask_label;
    row["peak_value"] = t->metrics.peak_value;
    row["peak_frame"] = t->metrics.peak_frame;
    row["baseline"] = t->metrics.baseline;
    row["dissipation_s"] = t->metrics.dissipation_s ? nlohmann::json(*t->metrics.dissipation_s) : nlohmann::json();
    row["loudness_db"] = t->loudness_db ? nlohmann::json(*t->loudness_db) : nlohmann::json();
    j["trials"].push_back(std::move(row));
  }
  write_file_atomic(dir / "report.json", j.dump(2) + "\n");

  svg::BarChart chart;
  chart.title = "Peak brightness by mask (ascending)";
  chart.y_label = "mean peak brightness";
  for (const auto& label : report.ranking) {
    const MaskSummary& m = report.mask(label);
    chart.labels.push_back(label);
    chart.values.push_back(m.mean_peak);
    chart.errors.push_back(m.stddev_peak);
  }
  write_file_atomic(dir / "ranking.svg", svg::render(chart, config));
}

void cmd_physics_table(const Context& ctx, const PhysicsTableOptions& o) {
  const SedimentationModel model;
  ConfigEcho config = base_config(ctx, "physics table");
  config.emplace_back("eta_g_per_um_s", format_number(model.eta()));
  config.emplace_back("rho_g_per_um3", format_number(model.rho()));
  config.emplace_back("g_um_per_s2", format_number(model.gravity()));
  config.emplace_back("phi_um_s", format_number(model.phi()));

  std::string csv = csv_preamble(config) + "radius_um,height_um,sedimentation_time_s,terminal_velocity_um_s\n";
  for (double r : o.radii_um) {
    for (double z : o.heights_um) {
      if (!(r > 0.0) || !(z > 0.0)) throw Error(ErrorCode::NonPositiveInput, "radii and heights must be positive");
      csv += format_number(r) + "," + format_number(z) + "," + format_number(sedimentation_time(model, r, z)) + "," +
             format_number(terminal_velocity(model, r)) + "\n";
    }
  }
  // Validate radii even when no heights were given.
  for (double r : o.radii_um) {
    if (!(r > 0.0)) throw Error(ErrorCode::NonPositiveInput, "radii must be positive");
  }
  if (ctx.out != nullptr) *ctx.out << csv;
  if (ctx.out_given) write_file_atomic(prepare_out_dir(ctx) / "physics.csv", csv);
}

void cmd_physics_radius(const Context& ctx, double height_um, double time_s) {
  const double r = estimate_radius(SedimentationModel{}, height_um, time_s);
  if (ctx.out != nullptr) *ctx.out << "height_um,time_s,radius_um\n" << format_number(height_um) << "," << format_number(time_s) << "," << format_number(r) << "\n";
}

void cmd_physics_floor(const Context& ctx, double height_um, double max_time_s) {
  const double r = min_detectable_radius(SedimentationModel{}, height_um, max_time_s);
  if (ctx.out != nullptr)
    *ctx.out << "height_um,max_track_time_s,min_radius_um\n" << format_number(height_um) << "," << format_number(max_time_s) << "," << format_number(r) << "\n";
}

void cmd_synth(const Context& ctx, const SynthOptions& o) {
  synth::SceneSpec spec;
  if (o.scene_file) {
    std::ifstream in(*o.scene_file);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + o.scene_file->string());
    const auto j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::SpecViolation, o.scene_file->string() + " is not valid JSON");
    spec = synth::scene_from_json(j);
    if (ctx.seed) spec.seed = *ctx.seed;
  } else {
    synth::RandomSceneParams params = o.random;
    if (ctx.seed) params.seed = *ctx.seed;
    spec = synth::random_scene(params);
  }
  const synth::RenderedScene scene = synth::render_scene(spec, SedimentationModel{}, ctx.threads);
  const fs::path dir = prepare_out_dir(ctx);
  save_stack(scene.stack, dir);

  ConfigEcho config = base_config(ctx, "synth");
  config.emplace_back("source", o.scene_file ? o.scene_file->string() : "random");
  nlohmann::json jc = nlohmann::json::object();
  for (const auto& [k, v] : config) jc[k] = v;

  nlohmann::json truth = synth::truth_to_json(scene.truth);
  truth["config"] = jc;
  write_file_atomic(dir / "truth.json", truth.dump(2) + "\n");
  nlohmann::json scene_json = synth::scene_to_json(spec);
  scene_json["config"] = jc;
  write_file_atomic(dir / "scene.json", scene_json.dump(2) + "\n");
  if (ctx.out != nullptr)
    *ctx.out << "synth: " << spec.frame_count << " frames, " << spec.droplets.size() << " droplets\n";
}

}  // namespace droplab::cli
