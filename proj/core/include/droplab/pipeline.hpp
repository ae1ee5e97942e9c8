#pragma once

#include <optional>
#include <vector>

#include "droplab/imageproc.hpp"
#include "droplab/ingest.hpp"
#include "droplab/physics.hpp"
#include "droplab/tracking.hpp"

namespace droplab {

struct DetectOptions {
  ThresholdMethod method = ThresholdMethod::fixed(4);
  int min_area = kDefaultMinArea;
  Connectivity connectivity = Connectivity::Eight;
  // When set, frames are flat-field corrected with a profile estimated from
  // this many leading frames before thresholding.
  std::optional<int> flat_field_background_frames;
};

struct FrameDetections {
  std::vector<Detection> detections;
  int level = 0;
  bool degenerate = false;
};

// threshold -> segment on every frame; results are indexed by frame.
std::vector<FrameDetections> detect_stack(const FrameStack& stack, const DetectOptions& options, int threads = 1);

struct TrackingResult {
  std::vector<std::vector<Detection>> detections;  // per frame
  std::vector<Track> tracks;                       // measured
  std::optional<IlluminationProfile> profile;
  int degenerate_frames = 0;
};

TrackingResult track_stack(const FrameStack& stack, const DetectOptions& detect, const LinkOptions& link,
                           const MeasureOptions& measure, const SedimentationModel& model, int threads = 1);

}  // namespace droplab
