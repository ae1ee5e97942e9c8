#include "droplab/tracking.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "droplab/error.hpp"

namespace droplab {

std::string TrackFlags::to_string() const {
  static constexpr std::pair<TrackFlag, const char*> kNames[] = {
      {TrackFlag::Complete, "complete"}, {TrackFlag::ExitedSide, "exited_side"}, {TrackFlag::TooShort, "too_short"},
      {TrackFlag::Stalled, "stalled"},   {TrackFlag::Open, "open"},
  };
  std::string out;
  for (const auto& [flag, name] : kNames) {
    if (!has(flag)) continue;
    if (!out.empty()) out += '|';
    out += name;
  }
  return out;
}

namespace {

// Total order on detections within a frame, coordinates first.
bool rank_less(const Detection& a, const Detection& b) {
  return std::tie(a.centroid_y_px, a.centroid_x_px, a.area_px, a.peak_intensity, a.mean_intensity) <
         std::tie(b.centroid_y_px, b.centroid_x_px, b.area_px, b.peak_intensity, b.mean_intensity);
}

struct Candidate {
  double distance;
  int track_id;
  std::size_t detection;
};

}  // namespace

std::vector<Track> link_detections(std::span<const std::vector<Detection>> per_frame, const LinkOptions& options) {
  if (!(options.gate_px > 0.0)) throw Error(ErrorCode::InvalidArgument, "gate_px must be positive");
  if (options.max_gap_frames < 0) throw Error(ErrorCode::InvalidArgument, "max_gap_frames must be non-negative");

  std::vector<Track> tracks;
  std::vector<int> open;  // ids of tracks that may still be extended
  std::vector<Candidate> candidates;
  std::vector<std::uint8_t> track_taken;
  std::vector<std::uint8_t> detection_taken;

  for (std::size_t f = 0; f < per_frame.size(); ++f) {
    const int frame = static_cast<int>(f);
    std::vector<Detection> detections = per_frame[f];
    std::sort(detections.begin(), detections.end(), rank_less);
    for (auto& d : detections) d.frame_index = frame;

    candidates.clear();
    for (int id : open) {
      const Detection& tail = tracks[static_cast<std::size_t>(id)].detections.back();
      for (std::size_t j = 0; j < detections.size(); ++j) {
        const double distance = std::hypot(detections[j].centroid_x_px - tail.centroid_x_px,
                                           detections[j].centroid_y_px - tail.centroid_y_px);
        if (distance <= options.gate_px) candidates.push_back({distance, id, j});
      }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
      return std::tie(a.distance, a.track_id, a.detection) < std::tie(b.distance, b.track_id, b.detection);
    });

    track_taken.assign(tracks.size(), 0);
    detection_taken.assign(detections.size(), 0);
    for (const Candidate& c : candidates) {
      if (track_taken[static_cast<std::size_t>(c.track_id)] || detection_taken[c.detection]) continue;
      track_taken[static_cast<std::size_t>(c.track_id)] = 1;
      detection_taken[c.detection] = 1;
      tracks[static_cast<std::size_t>(c.track_id)].detections.push_back(detections[c.detection]);
    }

    std::erase_if(open, [&](int id) {
      const int last = tracks[static_cast<std::size_t>(id)].detections.back().frame_index;
      return frame - last > options.max_gap_frames;
    });

    for (std::size_t j = 0; j < detections.size(); ++j) {
      if (detection_taken[j]) continue;
      Track t;
      t.track_id = static_cast<int>(tracks.size());
      t.detections.push_back(detections[j]);
      open.push_back(t.track_id);
      tracks.push_back(std::move(t));
    }
  }
  return tracks;
}

Track measure_track(Track track, const Manifest& manifest, const FieldGeometry& geometry,
                    const SedimentationModel& model, const MeasureOptions& options) {
  if (track.detections.size() < 2)
    throw Error(ErrorCode::TooShort, "track " + std::to_string(track.track_id) + " has a single detection");
  if (geometry.height <= 0 || geometry.width <= 0)
    throw Error(ErrorCode::InvalidArgument, "field geometry must be non-empty");

  const Detection& first = track.detections.front();
  const Detection& last = track.detections.back();
  const Detection& prev = track.detections[track.detections.size() - 2];
  const double um_per_px = manifest.scale_um_per_px(geometry.height);

  track.fall_px = last.centroid_y_px - first.centroid_y_px;
  track.fall_um = track.fall_px * um_per_px;
  track.duration_s = static_cast<double>(last.frame_index - first.frame_index) / manifest.fps;
  track.radius_um_est.reset();
  track.flags = TrackFlags{};

  if (!(track.fall_px > 0.0)) {
    track.flags.set(TrackFlag::Stalled);
    return track;
  }

  const double steps = static_cast<double>(last.frame_index - prev.frame_index);
  const double next_x = last.centroid_x_px + (last.centroid_x_px - prev.centroid_x_px) / steps;
  const double next_y = last.centroid_y_px + (last.centroid_y_px - prev.centroid_y_px) / steps;
  const bool ended_early = last.frame_index < geometry.frame_count - 1;
  const double bottom_band = geometry.height - 1 - options.margin_px;
  const double right_band = geometry.width - 1 - options.margin_px;

  if (last.centroid_y_px >= bottom_band || (ended_early && next_y >= bottom_band)) {
    track.flags.set(TrackFlag::Complete);
    track.radius_um_est = estimate_radius(model, track.fall_um, track.duration_s);
  } else if (ended_early && (last.centroid_x_px <= options.margin_px || last.centroid_x_px >= right_band ||
                             next_x <= options.margin_px || next_x >= right_band)) {
    track.flags.set(TrackFlag::ExitedSide);
  } else {
    track.flags.set(TrackFlag::Open);
  }
  return track;
}

std::vector<Track> measure_tracks(std::vector<Track> tracks, const Manifest& manifest, const FieldGeometry& geometry,
                                  const SedimentationModel& model, const MeasureOptions& options) {
  for (auto& t : tracks) {
    if (t.detections.size() < 2) {
      t.fall_px = t.fall_um = t.duration_s = 0.0;
      t.radius_um_est.reset();
      t.flags = TrackFlags{};
      t.flags.set(TrackFlag::TooShort);
    } else {
      t = measure_track(std::move(t), manifest, geometry, model, options);
    }
  }
  return tracks;
}

}  // namespace droplab
