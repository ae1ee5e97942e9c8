#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "droplab/image.hpp"
#include "droplab/ingest.hpp"

namespace droplab {

// One segmented above-threshold component in one frame.
struct Detection {
  int frame_index = 0;
  double centroid_x_px = 0.0;  // intensity-weighted, pixel centres at integer coordinates
  double centroid_y_px = 0.0;
  int area_px = 0;
  double mean_intensity = 0.0;
  int peak_intensity = 0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

// Per-row illumination gain, max-normalised to 1 and floored.
struct IlluminationProfile {
  static constexpr double kDefaultFloor = 0.02;
  std::vector<double> gains;
};

using Histogram = std::array<std::uint64_t, 256>;

Histogram histogram(const GrayImage& frame);

inline constexpr double kDefaultSaturationFraction = 0.005;

// Linear stretch sending the saturation_fraction and (1 - saturation_fraction)
// quantiles to 0 and 255. A constant frame (or collapsed quantile range) maps
// to all zero. Requires 0 <= saturation_fraction < 0.5.
GrayImage histogram_stretch(const GrayImage& frame, double saturation_fraction = kDefaultSaturationFraction);

// Row means of the per-pixel temporal median over the first
// background_frame_count frames. Throws AllDarkBackground if every row is 0.
IlluminationProfile estimate_illumination_profile(const FrameStack& stack, int background_frame_count,
                                                  double floor = IlluminationProfile::kDefaultFloor);

// out(x, y) = quantize(in(x, y) / g(y)). Throws DimensionMismatch.
GrayImage flat_field_correct(const GrayImage& frame, const IlluminationProfile& profile);

struct ThresholdMethod {
  enum class Kind { Fixed, Otsu };
  Kind kind = Kind::Fixed;
  int level = 0;

  static ThresholdMethod fixed(int level) { return {Kind::Fixed, level}; }
  static ThresholdMethod otsu() { return {Kind::Otsu, 0}; }
};

struct ThresholdResult {
  BinaryMask mask;
  int level = 0;            // pixel is foreground iff value > level
  bool degenerate = false;  // Otsu on a single-valued histogram
};

// Otsu level maximising between-class variance over levels t where both
// classes {v <= t} and {v > t} are non-empty; lowest t wins ties. Returns
// nullopt when the histogram has fewer than two occupied bins.
std::optional<int> otsu_level(const Histogram& hist);

ThresholdResult threshold(const GrayImage& frame, ThresholdMethod method);

enum class Connectivity { Four = 4, Eight = 8 };

inline constexpr int kDefaultMinArea = 3;

// Connected components of the mask. Components smaller than min_area are
// dropped. Output is sorted by (centroid_y, centroid_x).
std::vector<Detection> segment(const BinaryMask& binary, const GrayImage& source, int frame_index,
                               int min_area = kDefaultMinArea, Connectivity connectivity = Connectivity::Eight);

}  // namespace droplab
