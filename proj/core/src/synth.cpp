#include "droplab/synth.hpp"

#include <algorithm>
#include <cmath>

#include "droplab/error.hpp"
#include "droplab/parallel.hpp"

namespace droplab::synth {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double Illumination::gain(double y, int height) const noexcept {
  if (kind == Kind::Uniform || height <= 1) return top_gain;
  const double t = std::clamp(y / (height - 1), 0.0, 1.0);
  return top_gain + (bottom_gain - top_gain) * t;
}

std::string_view to_string(ExitKind kind) noexcept { return kind == ExitKind::Bottom ? "bottom" : "side"; }

double brightness_scale() noexcept { return 255.0 / (100.0 * 100.0); }

namespace {

void validate(const SceneSpec& s) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::SpecViolation, what); };
  if (s.width <= 0 || s.height <= 0 || s.frame_count <= 0) fail("width, height and frame_count must be positive");
  if (!(s.manifest.fps > 0.0) || !(s.manifest.frame_height_um > 0.0)) fail("fps and frame_height_um must be positive");
  if (s.manifest.trial_id.empty()) fail("trial_id must be non-empty");
  if (!(s.transmission_factor >= 0.0 && s.transmission_factor <= 1.0)) fail("transmission_factor must be in [0, 1]");
  if (s.noise_amplitude < 0 || s.noise_amplitude > 255) fail("noise_amplitude must be in [0, 255]");
  if (!(s.background_level >= 0.0 && s.background_level <= 255.0)) fail("background_level must be in [0, 255]");
  if (!(s.illumination.top_gain >= 0.0) || !(s.illumination.bottom_gain >= 0.0)) fail("illumination gains must be non-negative");
  for (std::size_t i = 0; i < s.droplets.size(); ++i) {
    const auto& d = s.droplets[i];
    const std::string tag = "droplet " + std::to_string(i) + ": ";
    if (!(d.radius_um > 0.0)) fail(tag + "radius must be positive");
    if (!(d.x0_px >= 0.0 && d.x0_px < s.width && d.y0_px >= 0.0 && d.y0_px < s.height)) fail(tag + "spawn outside frame");
    if (d.spawn_frame < 0 || d.spawn_frame >= s.frame_count) fail(tag + "spawn frame outside stack");
    if (!std::isfinite(d.horizontal_velocity_um_s)) fail(tag + "velocity must be finite");
  }
}

struct Trajectory {
  double vx_pf = 0.0;
  double vy_pf = 0.0;
};

}  // namespace

RenderedScene render_scene(const SceneSpec& spec, const SedimentationModel& model, int threads) {
  validate(spec);
  const double fps = spec.manifest.fps;
  const double um_per_px = spec.manifest.scale_um_per_px(spec.height);
  const double k = brightness_scale();

  TruthRecord truth;
  truth.brightness_scale = k;
  truth.um_per_pixel = um_per_px;
  std::vector<Trajectory> motion;
  for (std::size_t i = 0; i < spec.droplets.size(); ++i) {
    const DropletSpec& d = spec.droplets[i];
    Trajectory m;
    m.vy_pf = terminal_velocity(model, d.radius_um) / (fps * um_per_px);
    m.vx_pf = d.horizontal_velocity_um_s / (fps * um_per_px);

    // Frames until the centre reaches the bottom edge: ceil(fps * tau_sed).
    const double remaining_um = (spec.height - d.y0_px) * um_per_px;
    const long bottom_steps = static_cast<long>(std::ceil(fps * sedimentation_time(model, d.radius_um, remaining_um)));
    long side_steps = -1;
    if (m.vx_pf > 0.0) side_steps = static_cast<long>(std::ceil((spec.width - d.x0_px) / m.vx_pf));
    if (m.vx_pf < 0.0) side_steps = static_cast<long>(std::floor(d.x0_px / -m.vx_pf)) + 1;

    DropletTruth t;
    t.droplet_id = static_cast<int>(i);
    t.radius_um = d.radius_um;
    t.spawn_frame = d.spawn_frame;
    t.sigma_px = std::max(1.0, d.radius_um / um_per_px);
    t.velocity_px_per_frame = m.vy_pf;
    long steps = bottom_steps;
    t.exit_kind = ExitKind::Bottom;
    if (side_steps >= 0 && side_steps < bottom_steps) {
      steps = side_steps;
      t.exit_kind = ExitKind::Side;
    }
    t.exit_frame = static_cast<int>(std::min<long>(d.spawn_frame + steps, 1L << 30));
    for (int f = d.spawn_frame; f < std::min(t.exit_frame, spec.frame_count); ++f) {
      const int n = f - d.spawn_frame;
      t.path.push_back({f, d.x0_px + m.vx_pf * n, d.y0_px + m.vy_pf * n});
    }
    truth.droplets.push_back(std::move(t));
    motion.push_back(m);
  }

  const int w = spec.width;
  const int h = spec.height;
  std::vector<double> background(static_cast<std::size_t>(h));
  for (int y = 0; y < h; ++y) background[static_cast<std::size_t>(y)] = spec.background_level * spec.illumination.gain(y, h);

  std::vector<GrayImage> frames(static_cast<std::size_t>(spec.frame_count));
  parallel_for(frames.size(), threads, [&](std::size_t fi) {
    const int frame = static_cast<int>(fi);
    std::vector<double> field(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y) {
      std::fill_n(field.begin() + static_cast<std::ptrdiff_t>(y) * w, w, background[static_cast<std::size_t>(y)]);
    }
    for (const DropletTruth& t : truth.droplets) {
      if (frame < t.spawn_frame || frame >= t.exit_frame) continue;
      const TruthPoint& p = t.path[static_cast<std::size_t>(frame - t.spawn_frame)];
      const double peak = quantize_u8(k * t.radius_um * t.radius_um * spec.transmission_factor *
                                      spec.illumination.gain(p.y_px, h));
      if (peak <= 0.0) continue;
      const double sigma = t.sigma_px;
      const double reach = truth.truncation_sigmas * sigma;
      const double reach_sq = reach * reach;
      const int x_lo = std::max(0, static_cast<int>(std::ceil(p.x_px - reach)));
      const int x_hi = std::min(w - 1, static_cast<int>(std::floor(p.x_px + reach)));
      const int y_lo = std::max(0, static_cast<int>(std::ceil(p.y_px - reach)));
      const int y_hi = std::min(h - 1, static_cast<int>(std::floor(p.y_px + reach)));
      const double inv_two_sigma_sq = 1.0 / (2.0 * sigma * sigma);
      for (int y = y_lo; y <= y_hi; ++y) {
        const double dy = y - p.y_px;
        for (int x = x_lo; x <= x_hi; ++x) {
          const double dx = x - p.x_px;
          const double r_sq = dx * dx + dy * dy;
          if (r_sq > reach_sq) continue;
          field[static_cast<std::size_t>(y) * w + x] += peak * std::exp(-r_sq * inv_two_sigma_sq);
        }
      }
    }

    GrayImage image(w, h);
    auto out = image.pixels();
    if (spec.noise_amplitude > 0) {
      Lcg64 rng(frame_noise_seed(spec.seed, frame));
      const auto amplitude = static_cast<std::uint32_t>(spec.noise_amplitude);
      for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = quantize_u8(round_half_up(field[i]) + rng.uniform_int(amplitude));
    } else {
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = quantize_u8(field[i]);
    }
    frames[fi] = std::move(image);
  });

  Manifest manifest = spec.manifest;
  return RenderedScene{FrameStack(std::move(frames), std::move(manifest)), std::move(truth)};
}

SceneSpec random_scene(const RandomSceneParams& p, const SedimentationModel& model) {
  if (p.droplet_count < 0) throw Error(ErrorCode::SpecViolation, "droplet_count must be non-negative");
  if (!(p.radius_min_um > 0.0) || p.radius_max_um < p.radius_min_um)
    throw Error(ErrorCode::SpecViolation, "radius range must be positive and ordered");
  if (p.spawn_frame < 0 || p.spawn_frame >= p.frame_count)
    throw Error(ErrorCode::SpecViolation, "spawn_frame outside stack");

  SceneSpec spec;
  spec.width = p.width;
  spec.height = p.height;
  spec.frame_count = p.frame_count;
  spec.manifest.trial_id = p.trial_id;
  spec.manifest.fps = p.fps;
  spec.manifest.frame_height_um = p.frame_height_um;
  spec.manifest.mask_label = p.mask_label;
  spec.noise_amplitude = p.noise_amplitude;
  spec.transmission_factor = p.transmission_factor;
  spec.seed = p.seed;

  Lcg64 rng(splitmix64(p.seed));
  const double um_per_px = p.frame_height_um / p.height;
  const int available = std::max(1, p.frame_count - p.exit_margin_frames - p.spawn_frame);
  for (int i = 0; i < p.droplet_count; ++i) {
    DropletSpec d;
    d.radius_um = rng.uniform(p.radius_min_um, p.radius_max_um);
    d.spawn_frame = p.spawn_frame;
    d.x0_px = (i + 0.5) * p.width / p.droplet_count;
    const double step_px = terminal_velocity(model, d.radius_um) / (p.fps * um_per_px);
    // Fall at most 90% of what the remaining frames allow.
    const double fall_px = 0.9 * step_px * available;
    d.y0_px = std::clamp(p.height - fall_px, p.top_margin_px, static_cast<double>(p.height - 1));
    spec.droplets.push_back(d);
  }
  return spec;
}

namespace {

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::SpecViolation, std::string("bad value for '") + key + "'");
  }
}

}  // namespace

SceneSpec scene_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::SpecViolation, "scene must be a JSON object");
  SceneSpec s;
  s.width = get_or(j, "width", s.width);
  s.height = get_or(j, "height", s.height);
  s.frame_count = get_or(j, "frame_count", s.frame_count);
  if (j.contains("manifest")) {
    s.manifest = validate_manifest(j.at("manifest"));
  }
  s.background_level = get_or(j, "background_level", s.background_level);
  s.transmission_factor = get_or(j, "transmission_factor", s.transmission_factor);
  s.noise_amplitude = get_or(j, "noise_amplitude", s.noise_amplitude);
  s.seed = get_or<std::uint64_t>(j, "seed", s.seed);
  if (j.contains("illumination")) {
    const auto& il = j.at("illumination");
    const std::string kind = get_or<std::string>(il, "kind", "uniform");
    if (kind == "uniform") {
      s.illumination = Illumination::uniform();
      s.illumination.top_gain = s.illumination.bottom_gain = get_or(il, "gain", 1.0);
    } else if (kind == "linear_gradient") {
      s.illumination = Illumination::linear_gradient(get_or(il, "top_gain", 1.0), get_or(il, "bottom_gain", 1.0));
    } else {
      throw Error(ErrorCode::SpecViolation, "unknown illumination kind '" + kind + "'");
    }
  }
  if (j.contains("droplets")) {
    if (!j.at("droplets").is_array()) throw Error(ErrorCode::SpecViolation, "droplets must be an array");
    for (const auto& dj : j.at("droplets")) {
      DropletSpec d;
      d.radius_um = get_or(dj, "radius_um", d.radius_um);
      d.spawn_frame = get_or(dj, "spawn_frame", d.spawn_frame);
      d.x0_px = get_or(dj, "x0_px", d.x0_px);
      d.y0_px = get_or(dj, "y0_px", d.y0_px);
      d.horizontal_velocity_um_s = get_or(dj, "horizontal_velocity_um_s", d.horizontal_velocity_um_s);
      s.droplets.push_back(d);
    }
  }
  validate(s);
  return s;
}

nlohmann::json scene_to_json(const SceneSpec& s) {
  nlohmann::json j;
  j["width"] = s.width;
  j["height"] = s.height;
  j["frame_count"] = s.frame_count;
  j["manifest"] = manifest_to_json(s.manifest);
  if (s.illumination.kind == Illumination::Kind::Uniform) {
    j["illumination"] = {{"kind", "uniform"}, {"gain", s.illumination.top_gain}};
  } else {
    j["illumination"] = {{"kind", "linear_gradient"},
                         {"top_gain", s.illumination.top_gain},
                         {"bottom_gain", s.illumination.bottom_gain}};
  }
  j["background_level"] = s.background_level;
  j["transmission_factor"] = s.transmission_factor;
  j["noise_amplitude"] = s.noise_amplitude;
  j["seed"] = s.seed;
  j["droplets"] = nlohmann::json::array();
  for (const auto& d : s.droplets) {
    j["droplets"].push_back({{"radius_um", d.radius_um},
                             {"spawn_frame", d.spawn_frame},
                             {"x0_px", d.x0_px},
                             {"y0_px", d.y0_px},
                             {"horizontal_velocity_um_s", d.horizontal_velocity_um_s}});
  }
  return j;
}

nlohmann::json truth_to_json(const TruthRecord& truth) {
  nlohmann::json j;
  j["truncation_sigmas"] = truth.truncation_sigmas;
  j["brightness_scale"] = truth.brightness_scale;
  j["um_per_pixel"] = truth.um_per_pixel;
  j["droplets"] = nlohmann::json::array();
  for (const auto& d : truth.droplets) {
    nlohmann::json dj;
    dj["droplet_id"] = d.droplet_id;
    dj["radius_um"] = d.radius_um;
    dj["spawn_frame"] = d.spawn_frame;
    dj["exit_frame"] = d.exit_frame;
    dj["exit_kind"] = std::string(to_string(d.exit_kind));
    dj["sigma_px"] = d.sigma_px;
    dj["velocity_px_per_frame"] = d.velocity_px_per_frame;
    dj["path"] = nlohmann::json::array();
    for (const auto& p : d.path) dj["path"].push_back({p.frame, p.x_px, p.y_px});
    j["droplets"].push_back(std::move(dj));
  }
  return j;
}

}  // namespace droplab::synth
