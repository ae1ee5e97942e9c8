#include "droplab/imageproc.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "droplab/error.hpp"
#include "wide_uint.hpp"

namespace droplab {

Histogram histogram(const GrayImage& frame) {
  Histogram hist{};
  for (std::uint8_t v : frame.pixels()) ++hist[v];
  return hist;
}

namespace {

// Value at position `rank` of the sorted pixel list.
int value_at_rank(const Histogram& hist, std::uint64_t rank) {
  std::uint64_t cumulative = 0;
  for (int v = 0; v < 256; ++v) {
    cumulative += hist[static_cast<std::size_t>(v)];
    if (cumulative > rank) return v;
  }
  return 255;
}

}  // namespace

GrayImage histogram_stretch(const GrayImage& frame, double saturation_fraction) {
  if (!(saturation_fraction >= 0.0 && saturation_fraction < 0.5))
    throw Error(ErrorCode::InvalidArgument, "saturation_fraction must be in [0, 0.5)");
  GrayImage out(frame.width(), frame.height(), 0);
  if (frame.empty()) return out;

  const Histogram hist = histogram(frame);
  const auto n = static_cast<std::uint64_t>(frame.size());
  const auto clip = static_cast<std::uint64_t>(std::floor(saturation_fraction * static_cast<double>(n)));
  const int lo = value_at_rank(hist, std::min(clip, n - 1));
  const int hi = value_at_rank(hist, n - 1 - std::min(clip, n - 1));
  if (hi <= lo) return out;

  // Integer round-half-up of (v - lo) * 255 / (hi - lo).
  std::array<std::uint8_t, 256> lut{};
  const int span = hi - lo;
  for (int v = 0; v < 256; ++v) {
    if (v <= lo) {
      lut[static_cast<std::size_t>(v)] = 0;
    } else if (v >= hi) {
      lut[static_cast<std::size_t>(v)] = 255;
    } else {
      lut[static_cast<std::size_t>(v)] = static_cast<std::uint8_t>((2 * (v - lo) * 255 + span) / (2 * span));
    }
  }
  auto dst = out.pixels();
  auto src = frame.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = lut[src[i]];
  return out;
}

IlluminationProfile estimate_illumination_profile(const FrameStack& stack, int background_frame_count, double floor) {
  if (background_frame_count < 1 || static_cast<std::size_t>(background_frame_count) > stack.size())
    throw Error(ErrorCode::InvalidArgument, "background_frame_count must be in [1, frame count]");
  if (!(floor > 0.0 && floor <= 1.0)) throw Error(ErrorCode::InvalidArgument, "profile floor must be in (0, 1]");

  const int w = stack.width();
  const int h = stack.height();
  const auto k = static_cast<std::size_t>(background_frame_count);
  std::vector<double> row_means(static_cast<std::size_t>(h), 0.0);
  std::vector<std::uint8_t> samples(k);
  for (int y = 0; y < h; ++y) {
    double row_sum = 0.0;
    for (int x = 0; x < w; ++x) {
      for (std::size_t f = 0; f < k; ++f) samples[f] = stack.frame(f)(x, y);
      std::sort(samples.begin(), samples.end());
      const double median = (k % 2 == 1) ? samples[k / 2] : 0.5 * (samples[k / 2 - 1] + samples[k / 2]);
      row_sum += median;
    }
    row_means[static_cast<std::size_t>(y)] = row_sum / w;
  }

  const double peak = *std::max_element(row_means.begin(), row_means.end());
  if (!(peak > 0.0)) throw Error(ErrorCode::AllDarkBackground, "every background row mean is zero");

  IlluminationProfile profile;
  profile.gains.reserve(row_means.size());
  for (double m : row_means) profile.gains.push_back(std::max(m / peak, floor));
  return profile;
}

GrayImage flat_field_correct(const GrayImage& frame, const IlluminationProfile& profile) {
  if (profile.gains.size() != static_cast<std::size_t>(frame.height()))
    throw Error(ErrorCode::DimensionMismatch, "profile has " + std::to_string(profile.gains.size()) +
                                                  " rows, frame has " + std::to_string(frame.height()));
  GrayImage out(frame.width(), frame.height());
  for (int y = 0; y < frame.height(); ++y) {
    const double gain = profile.gains[static_cast<std::size_t>(y)];
    if (!(gain > 0.0)) throw Error(ErrorCode::InvalidArgument, "profile gains must be positive");
    std::array<std::uint8_t, 256> lut{};
    for (int v = 0; v < 256; ++v) lut[static_cast<std::size_t>(v)] = quantize_u8(v / gain);
    for (int x = 0; x < frame.width(); ++x) out(x, y) = lut[frame(x, y)];
  }
  return out;
}

std::optional<int> otsu_level(const Histogram& hist) {
  using detail::i128;
  using detail::u128;
  using detail::U256;

  std::uint64_t n = 0;
  u128 total_sum = 0;
  for (int v = 0; v < 256; ++v) {
    n += hist[static_cast<std::size_t>(v)];
    total_sum += static_cast<u128>(v) * hist[static_cast<std::size_t>(v)];
  }

  // sigma_b^2(t) = (n*S0 - S*N0)^2 / (n^2 * N0 * N1). The n^2 factor is
  // common to every t, so candidates compare num/den exactly in integers.
  std::optional<int> best;
  U256 best_num;
  std::uint64_t best_den = 1;
  std::uint64_t below = 0;
  u128 below_sum = 0;
  for (int t = 0; t < 255; ++t) {
    below += hist[static_cast<std::size_t>(t)];
    below_sum += static_cast<u128>(t) * hist[static_cast<std::size_t>(t)];
    if (below == 0 || below == n) continue;
    const i128 diff = static_cast<i128>(static_cast<u128>(n) * below_sum) - static_cast<i128>(total_sum * below);
    const u128 magnitude = static_cast<u128>(diff < 0 ? -diff : diff);
    const U256 num = U256::from(magnitude) * U256::from(magnitude);
    const std::uint64_t den = below * (n - below);
    // num / den > best_num / best_den  <=>  num * best_den > best_num * den
    if (!best || best_num * U256::from(den) < num * U256::from(best_den)) {
      best = t;
      best_num = num;
      best_den = den;
    }
  }
  return best;
}

ThresholdResult threshold(const GrayImage& frame, ThresholdMethod method) {
  ThresholdResult result;
  if (method.kind == ThresholdMethod::Kind::Fixed) {
    if (method.level < 0 || method.level > 255) throw Error(ErrorCode::InvalidArgument, "fixed level must be in [0, 255]");
    result.level = method.level;
  } else {
    const Histogram hist = histogram(frame);
    if (const auto level = otsu_level(hist)) {
      result.level = *level;
    } else {
      result.degenerate = true;
      // Single occupied bin: report it; nothing lies strictly above it.
      const auto it = std::find_if(hist.begin(), hist.end(), [](std::uint64_t c) { return c > 0; });
      result.level = it == hist.end() ? 0 : static_cast<int>(it - hist.begin());
      result.mask = BinaryMask(frame.width(), frame.height(), 0);
      return result;
    }
  }
  result.mask = BinaryMask(frame.width(), frame.height(), 0);
  auto dst = result.mask.pixels();
  auto src = frame.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] > result.level ? 1 : 0;
  return result;
}

std::vector<Detection> segment(const BinaryMask& binary, const GrayImage& source, int frame_index, int min_area,
                               Connectivity connectivity) {
  if (!binary.same_shape(source)) throw Error(ErrorCode::DimensionMismatch, "mask and source differ in size");
  const int w = binary.width();
  const int h = binary.height();
  std::vector<std::uint8_t> visited(binary.size(), 0);
  std::vector<std::pair<int, int>> stack;
  std::vector<Detection> out;

  const bool eight = connectivity == Connectivity::Eight;
  for (int sy = 0; sy < h; ++sy) {
    for (int sx = 0; sx < w; ++sx) {
      const std::size_t seed = static_cast<std::size_t>(sy) * w + sx;
      if (binary(sx, sy) == 0 || visited[seed]) continue;

      int area = 0;
      int peak = 0;
      double weight = 0.0;
      double wx = 0.0;
      double wy = 0.0;
      double gx = 0.0;
      double gy = 0.0;
      visited[seed] = 1;
      stack.assign(1, {sx, sy});
      while (!stack.empty()) {
        const auto [x, y] = stack.back();
        stack.pop_back();
        const int v = source(x, y);
        ++area;
        peak = std::max(peak, v);
        weight += v;
        wx += static_cast<double>(v) * x;
        wy += static_cast<double>(v) * y;
        gx += x;
        gy += y;
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            if (!eight && dx != 0 && dy != 0) continue;
            const int nx = x + dx;
            const int ny = y + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            const std::size_t idx = static_cast<std::size_t>(ny) * w + nx;
            if (binary(nx, ny) == 0 || visited[idx]) continue;
            visited[idx] = 1;
            stack.emplace_back(nx, ny);
          }
        }
      }
      if (area < min_area) continue;

      Detection d;
      d.frame_index = frame_index;
      d.area_px = area;
      d.peak_intensity = peak;
      d.mean_intensity = weight / area;
      if (weight > 0.0) {
        d.centroid_x_px = wx / weight;
        d.centroid_y_px = wy / weight;
      } else {
        d.centroid_x_px = gx / area;
        d.centroid_y_px = gy / area;
      }
      out.push_back(d);
    }
  }
  std::sort(out.begin(), out.end(), [](const Detection& a, const Detection& b) {
    if (a.centroid_y_px != b.centroid_y_px) return a.centroid_y_px < b.centroid_y_px;
    return a.centroid_x_px < b.centroid_x_px;
  });
  return out;
}

}  // namespace droplab
