#include "droplab/pipeline.hpp"

#include "droplab/parallel.hpp"

namespace droplab {

namespace {

std::vector<FrameDetections> detect_with_profile(const FrameStack& stack, const DetectOptions& options,
                                                 const std::optional<IlluminationProfile>& profile, int threads) {
  std::vector<FrameDetections> out(stack.size());
  parallel_for(stack.size(), threads, [&](std::size_t i) {
    const GrayImage& raw = stack.frame(i);
    const GrayImage corrected = profile ? flat_field_correct(raw, *profile) : GrayImage{};
    const GrayImage& frame = profile ? corrected : raw;
    ThresholdResult t = threshold(frame, options.method);
    out[i].level = t.level;
    out[i].degenerate = t.degenerate;
    out[i].detections = segment(t.mask, frame, static_cast<int>(i), options.min_area, options.connectivity);
  });
  return out;
}

std::optional<IlluminationProfile> profile_for(const FrameStack& stack, const DetectOptions& options) {
  if (!options.flat_field_background_frames) return std::nullopt;
  return estimate_illumination_profile(stack, *options.flat_field_background_frames);
}

}  // namespace

std::vector<FrameDetections> detect_stack(const FrameStack& stack, const DetectOptions& options, int threads) {
  return detect_with_profile(stack, options, profile_for(stack, options), threads);
}

TrackingResult track_stack(const FrameStack& stack, const DetectOptions& detect, const LinkOptions& link,
                           const MeasureOptions& measure, const SedimentationModel& model, int threads) {
  TrackingResult result;
  result.profile = profile_for(stack, detect);
  auto frames = detect_with_profile(stack, detect, result.profile, threads);
  result.detections.reserve(frames.size());
  for (auto& f : frames) {
    if (f.degenerate) ++result.degenerate_frames;
    result.detections.push_back(std::move(f.detections));
  }
  const FieldGeometry geometry{stack.width(), stack.height(), static_cast<int>(stack.size())};
  result.tracks = measure_tracks(link_detections(result.detections, link), stack.manifest(), geometry, model, measure);
  return result;
}

}  // namespace droplab
