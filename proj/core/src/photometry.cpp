#include "droplab/photometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>

#include "droplab/error.hpp"
#include "droplab/parallel.hpp"

namespace droplab {

double region_mean(const GrayImage& frame, Region region) {
  const int h = frame.height();
  int y0 = 0;
  int y1 = h;
  if (region == Region::TopHalf) y1 = h / 2;
  if (region == Region::BottomHalf) y0 = h / 2;
  if (y1 <= y0 || frame.width() == 0) return 0.0;
  std::uint64_t sum = 0;
  for (int y = y0; y < y1; ++y) {
    for (std::uint8_t v : frame.row(y)) sum += v;
  }
  return static_cast<double>(sum) / (static_cast<double>(y1 - y0) * frame.width());
}

namespace {

void assign_baseline(BrightnessSeries& series, int baseline_frames) {
  if (baseline_frames < 1) throw Error(ErrorCode::InvalidArgument, "baseline needs at least one frame");
  const auto k = std::min<std::size_t>(static_cast<std::size_t>(baseline_frames), series.samples.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += series.samples[i].mean_brightness;
  series.baseline_frames = static_cast<int>(k);
  series.baseline = k > 0 ? sum / static_cast<double>(k) : 0.0;
}

}  // namespace

BrightnessSeries brightness_series(const FrameStack& stack, Region region, int baseline_frames, int threads) {
  BrightnessSeries series;
  series.trial_id = stack.manifest().trial_id;
  series.fps = stack.fps();
  series.samples.resize(stack.size());
  parallel_for(stack.size(), threads, [&](std::size_t i) {
    series.samples[i] = {static_cast<int>(i), stack.timestamp(i), region_mean(stack.frame(i), region)};
  });
  assign_baseline(series, baseline_frames);
  return series;
}

BrightnessSeries make_series(std::string trial_id, double fps, std::span<const double> values, int baseline_frames) {
  if (!(fps > 0.0)) throw Error(ErrorCode::InvalidField, "fps must be positive");
  BrightnessSeries series;
  series.trial_id = std::move(trial_id);
  series.fps = fps;
  series.samples.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    series.samples.push_back({static_cast<int>(i), static_cast<double>(i) / fps, values[i]});
  assign_baseline(series, baseline_frames);
  return series;
}

std::string SeriesMetrics::flags() const {
  std::string out;
  if (degenerate) out = "degenerate";
  if (unresolved()) out += out.empty() ? "unresolved" : "|unresolved";
  return out;
}

SeriesMetrics series_metrics(const BrightnessSeries& series, double decay_fraction) {
  if (!(decay_fraction > 0.0 && decay_fraction < 1.0))
    throw Error(ErrorCode::InvalidArgument, "decay_fraction must be in (0, 1)");
  if (series.samples.empty()) throw Error(ErrorCode::EmptyInput, "series has no samples");

  SeriesMetrics m;
  m.baseline = series.baseline;
  m.decay_fraction = decay_fraction;

  const auto& s = series.samples;
  std::size_t peak = 0;
  bool constant = true;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i].mean_brightness != s[0].mean_brightness) constant = false;
    if (s[i].mean_brightness > s[peak].mean_brightness) peak = i;
  }
  if (constant) {
    m.degenerate = true;
    m.peak_value = s[0].mean_brightness;
    m.peak_frame = s[0].frame_index;
    m.peak_time_s = s[0].time_s;
    m.dissipation_s = 0.0;
    return m;
  }

  m.peak_value = s[peak].mean_brightness;
  m.peak_frame = s[peak].frame_index;
  m.peak_time_s = s[peak].time_s;
  const double level = m.baseline + decay_fraction * (m.peak_value - m.baseline);
  for (std::size_t i = peak; i < s.size(); ++i) {
    if (s[i].mean_brightness <= level) {
      m.dissipation_s = s[i].time_s - s[peak].time_s;
      break;
    }
  }
  return m;
}

BrightnessSeries normalize_series(const BrightnessSeries& series) {
  if (series.samples.empty()) throw Error(ErrorCode::ConstantSeries, "empty series");
  auto [lo, hi] = std::minmax_element(series.samples.begin(), series.samples.end(),
                                      [](const auto& a, const auto& b) { return a.mean_brightness < b.mean_brightness; });
  const double min = lo->mean_brightness;
  const double max = hi->mean_brightness;
  if (!(max > min)) throw Error(ErrorCode::ConstantSeries, "cannot normalise a constant series");
  const double span = max - min;
  BrightnessSeries out = series;
  for (auto& sample : out.samples) {
    // Exact endpoints regardless of rounding in the division.
    if (sample.mean_brightness == min) {
      sample.mean_brightness = 0.0;
    } else if (sample.mean_brightness == max) {
      sample.mean_brightness = 1.0;
    } else {
      sample.mean_brightness = (sample.mean_brightness - min) / span;
    }
  }
  out.baseline = (series.baseline - min) / span;
  return out;
}

double uniformity_ratio(const FrameStack& stack) {
  if (stack.height() < 2) throw Error(ErrorCode::InvalidArgument, "uniformity ratio needs at least two rows");
  double top = 0.0;
  double bottom = 0.0;
  for (const auto& frame : stack.frames()) {
    top += region_mean(frame, Region::TopHalf);
    bottom += region_mean(frame, Region::BottomHalf);
  }
  const auto n = static_cast<double>(stack.size());
  return (bottom / n) / std::max(top / n, 1e-6);
}

const GroupStats& ConditionComparison::group(const std::string& label) const {
  for (const auto& g : groups) {
    if (g.label == label) return g;
  }
  throw Error(ErrorCode::UnknownLabel, "no condition '" + label + "'");
}

double ConditionComparison::ratio(const std::string& numerator, const std::string& denominator) const {
  for (const auto& r : ratios) {
    if (r.numerator == numerator && r.denominator == denominator) return r.ratio;
  }
  throw Error(ErrorCode::UnknownLabel, "no ratio " + numerator + "/" + denominator);
}

ConditionComparison compare_conditions(const std::map<std::string, std::vector<SeriesMetrics>>& groups) {
  if (groups.empty()) throw Error(ErrorCode::EmptyInput, "no condition groups");
  ConditionComparison out;
  for (const auto& [label, trials] : groups) {
    if (trials.empty()) throw Error(ErrorCode::EmptyGroup, "condition '" + label + "' has no trials");
    GroupStats g;
    g.label = label;
    g.trials = static_cast<int>(trials.size());
    double sum = 0.0;
    for (const auto& t : trials) sum += t.peak_value;
    g.mean_peak = sum / g.trials;
    double sq = 0.0;
    for (const auto& t : trials) sq += (t.peak_value - g.mean_peak) * (t.peak_value - g.mean_peak);
    g.stddev_peak = std::sqrt(sq / g.trials);
    g.cv = g.mean_peak != 0.0 ? g.stddev_peak / g.mean_peak : (g.stddev_peak == 0.0 ? 0.0 : std::nan(""));
    out.groups.push_back(std::move(g));
  }
  for (const auto& num : out.groups) {
    for (const auto& den : out.groups) {
      if (num.label == den.label) continue;
      out.ratios.push_back({num.label, den.label, num.mean_peak / den.mean_peak});
    }
  }
  return out;
}

CorrelationResult loudness_correlation(std::span<const LoudnessPeak> trials) {
  if (trials.size() < 3) throw Error(ErrorCode::InsufficientData, "need at least 3 trials");
  std::set<double> levels;
  for (const auto& t : trials) levels.insert(t.loudness_db);
  if (levels.size() < 2) throw Error(ErrorCode::InsufficientData, "need at least 2 distinct loudness values");

  const auto n = static_cast<double>(trials.size());
  double mx = 0.0;
  double my = 0.0;
  for (const auto& t : trials) {
    mx += t.loudness_db;
    my += t.peak_value;
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (const auto& t : trials) {
    const double dx = t.loudness_db - mx;
    const double dy = t.peak_value - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (!(syy > 0.0)) throw Error(ErrorCode::InsufficientData, "peak values are all equal");

  CorrelationResult result;
  result.n = static_cast<int>(trials.size());
  result.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);

  std::vector<LoudnessPeak> sorted(trials.begin(), trials.end());
  std::sort(sorted.begin(), sorted.end(), [](const LoudnessPeak& a, const LoudnessPeak& b) {
    return a.loudness_db != b.loudness_db ? a.loudness_db < b.loudness_db : a.peak_value < b.peak_value;
  });
  result.monotone_increasing = std::is_sorted(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return a.peak_value < b.peak_value;
  });
  return result;
}

}  // namespace droplab
