#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "droplab/image.hpp"
#include "droplab/ingest.hpp"

namespace droplab {

enum class Region { Full, TopHalf, BottomHalf };

// Top half is the first floor(H/2) rows; bottom half is the rest.
double region_mean(const GrayImage& frame, Region region);

struct BrightnessSample {
  int frame_index = 0;
  double time_s = 0.0;
  double mean_brightness = 0.0;
};

struct BrightnessSeries {
  static constexpr int kDefaultBaselineFrames = 5;

  std::string trial_id;
  double fps = Manifest::kDefaultFps;
  std::vector<BrightnessSample> samples;
  double baseline = 0.0;   // mean of the first baseline_frames samples
  int baseline_frames = 0;
};

BrightnessSeries brightness_series(const FrameStack& stack, Region region = Region::Full,
                                   int baseline_frames = BrightnessSeries::kDefaultBaselineFrames, int threads = 1);

// Builds a series from raw values (frame i at i / fps); baseline as above.
BrightnessSeries make_series(std::string trial_id, double fps, std::span<const double> values,
                             int baseline_frames = BrightnessSeries::kDefaultBaselineFrames);

struct SeriesMetrics {
  static constexpr double kDefaultDecayFraction = 0.1;

  double peak_value = 0.0;
  int peak_frame = 0;
  double peak_time_s = 0.0;
  std::optional<double> dissipation_s;  // nullopt: never decayed before the series ended
  double baseline = 0.0;
  double decay_fraction = kDefaultDecayFraction;
  bool degenerate = false;  // constant series

  bool unresolved() const noexcept { return !dissipation_s.has_value(); }
  // "degenerate", "unresolved", or "" (pipe-joined if several apply).
  std::string flags() const;
};

// Peak (earliest on ties) and the time from it until the series first falls
// to baseline + decay_fraction * (peak - baseline) or below.
SeriesMetrics series_metrics(const BrightnessSeries& series,
                             double decay_fraction = SeriesMetrics::kDefaultDecayFraction);

// Affine map of the series (and its baseline) onto [0, 1]. Throws ConstantSeries.
BrightnessSeries normalize_series(const BrightnessSeries& series);

// Temporal-mean bottom-half brightness over temporal-mean top-half
// brightness, with the divisor floored at 1e-6.
double uniformity_ratio(const FrameStack& stack);

struct GroupStats {
  std::string label;
  int trials = 0;
  double mean_peak = 0.0;
  double stddev_peak = 0.0;  // population standard deviation
  double cv = 0.0;           // stddev / mean
};

struct PairRatio {
  std::string numerator;
  std::string denominator;
  double ratio = 0.0;  // mean_peak(numerator) / mean_peak(denominator)
};

struct ConditionComparison {
  std::vector<GroupStats> groups;  // sorted by label
  std::vector<PairRatio> ratios;   // every ordered pair of distinct groups

  const GroupStats& group(const std::string& label) const;
  double ratio(const std::string& numerator, const std::string& denominator) const;
};

ConditionComparison compare_conditions(const std::map<std::string, std::vector<SeriesMetrics>>& groups);

struct LoudnessPeak {
  double loudness_db = 0.0;
  double peak_value = 0.0;
};

struct CorrelationResult {
  double r = 0.0;  // Pearson correlation
  bool monotone_increasing = false;
  int n = 0;
};

// Needs at least 3 trials, 2 distinct loudness values and non-constant peaks.
CorrelationResult loudness_correlation(std::span<const LoudnessPeak> trials);

}  // namespace droplab
