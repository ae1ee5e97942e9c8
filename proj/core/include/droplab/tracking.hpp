#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "droplab/imageproc.hpp"
#include "droplab/ingest.hpp"
#include "droplab/physics.hpp"

namespace droplab {

enum class TrackFlag : std::uint8_t {
  Complete = 1 << 0,    // fell out through the bottom edge; radius estimated
  ExitedSide = 1 << 1,  // left through the left or right edge
  TooShort = 1 << 2,    // single detection
  Stalled = 1 << 3,     // no downward displacement
  Open = 1 << 4,        // still in view at the end of the stack, or lost mid-field
};

class TrackFlags {
 public:
  TrackFlags() = default;
  void set(TrackFlag flag) noexcept { bits_ |= static_cast<std::uint8_t>(flag); }
  bool has(TrackFlag flag) const noexcept { return (bits_ & static_cast<std::uint8_t>(flag)) != 0; }
  bool empty() const noexcept { return bits_ == 0; }
  // Pipe-joined names, e.g. "complete".
  std::string to_string() const;

  friend bool operator==(const TrackFlags&, const TrackFlags&) = default;

 private:
  std::uint8_t bits_ = 0;
};

struct Track {
  int track_id = 0;
  std::vector<Detection> detections;  // strictly increasing frame_index
  double fall_px = 0.0;               // last centroid y - first centroid y (down is positive)
  double fall_um = 0.0;
  double duration_s = 0.0;
  std::optional<double> radius_um_est;
  TrackFlags flags;

  int start_frame() const { return detections.front().frame_index; }
  int end_frame() const { return detections.back().frame_index; }
};

struct LinkOptions {
  double gate_px = 25.0;
  int max_gap_frames = 2;
};

// Greedy globally-nearest-neighbour linking. Per frame, all (open track tail,
// detection) pairs within the gate are accepted in order of (distance,
// track_id, detection rank) when both ends are still free; detection rank is
// the (y, x) order, so input order within a frame does not matter. A track
// with no match for more than max_gap_frames consecutive frames is closed.
// per_frame[i] holds the detections of frame i.
std::vector<Track> link_detections(std::span<const std::vector<Detection>> per_frame, const LinkOptions& options = {});

struct FieldGeometry {
  int width = 0;
  int height = 0;
  int frame_count = 0;
};

struct MeasureOptions {
  double margin_px = 3.0;
};

// Fills fall/duration and classifies how the track ended. A track counts as
// a bottom exit when its last centroid lies within margin_px of the bottom
// edge, or when the track ends before the last frame and its last observed
// per-frame step would carry it to that band. Complete tracks get
// radius_um_est = estimate_radius(fall_um, duration_s).
// Throws TooShort for fewer than two detections.
Track measure_track(Track track, const Manifest& manifest, const FieldGeometry& geometry,
                    const SedimentationModel& model, const MeasureOptions& options = {});

// measure_track over every track; single-detection tracks are flagged
// TooShort instead of throwing.
std::vector<Track> measure_tracks(std::vector<Track> tracks, const Manifest& manifest, const FieldGeometry& geometry,
                                  const SedimentationModel& model, const MeasureOptions& options = {});

}  // namespace droplab
