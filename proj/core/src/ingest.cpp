#include "droplab/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <regex>

#include "droplab/error.hpp"
#include "droplab/image_io.hpp"
#include "droplab/output.hpp"
#include "droplab/parallel.hpp"

namespace droplab {

namespace fs = std::filesystem;

std::string_view to_string(EventKind kind) noexcept {
  switch (kind) {
    case EventKind::Speech: return "speech";
    case EventKind::Cough: return "cough";
    case EventKind::Sneeze: return "sneeze";
    case EventKind::Spray: return "spray";
  }
  return "speech";
}

std::optional<EventKind> parse_event_kind(std::string_view text) noexcept {
  if (text == "speech") return EventKind::Speech;
  if (text == "cough") return EventKind::Cough;
  if (text == "sneeze") return EventKind::Sneeze;
  if (text == "spray") return EventKind::Spray;
  return std::nullopt;
}

double Manifest::scale_um_per_px(int height_px) const {
  if (um_per_pixel) return *um_per_pixel;
  return frame_height_um / static_cast<double>(height_px);
}

namespace {

double positive_number(const nlohmann::json& raw, const char* key, double fallback) {
  if (!raw.contains(key)) return fallback;
  const auto& value = raw.at(key);
  if (!value.is_number()) throw Error(ErrorCode::InvalidField, std::string(key) + " must be a number");
  const double number = value.get<double>();
  if (!(number > 0.0) || !std::isfinite(number))
    throw Error(ErrorCode::InvalidField, std::string(key) + " must be positive");
  return number;
}

}  // namespace

Manifest validate_manifest(const nlohmann::json& raw) {
  if (!raw.is_object()) throw Error(ErrorCode::InvalidField, "manifest must be a JSON object");

  Manifest m;
  if (!raw.contains("trial_id")) throw Error(ErrorCode::MissingTrialId, "manifest has no trial_id");
  const auto& id = raw.at("trial_id");
  if (!id.is_string() || id.get<std::string>().empty())
    throw Error(ErrorCode::MissingTrialId, "trial_id must be a non-empty string");
  m.trial_id = id.get<std::string>();

  m.fps = positive_number(raw, "fps", Manifest::kDefaultFps);
  m.frame_height_um = positive_number(raw, "frame_height_um", Manifest::kDefaultFrameHeightUm);
  if (raw.contains("um_per_pixel")) m.um_per_pixel = positive_number(raw, "um_per_pixel", 1.0);

  if (raw.contains("loudness_db") && !raw.at("loudness_db").is_null()) {
    const auto& v = raw.at("loudness_db");
    if (!v.is_number()) throw Error(ErrorCode::InvalidField, "loudness_db must be a number");
    m.loudness_db = v.get<double>();
  }
  if (raw.contains("mask_label") && !raw.at("mask_label").is_null()) {
    const auto& v = raw.at("mask_label");
    if (!v.is_string() || v.get<std::string>().empty())
      throw Error(ErrorCode::InvalidField, "mask_label must be a non-empty string");
    m.mask_label = v.get<std::string>();
  }
  if (raw.contains("event_kind") && !raw.at("event_kind").is_null()) {
    const auto& v = raw.at("event_kind");
    const auto kind = v.is_string() ? parse_event_kind(v.get<std::string>()) : std::nullopt;
    if (!kind) throw Error(ErrorCode::InvalidField, "event_kind must be one of speech, cough, sneeze, spray");
    m.event_kind = kind;
  }
  return m;
}

nlohmann::json manifest_to_json(const Manifest& m) {
  nlohmann::json j;
  j["trial_id"] = m.trial_id;
  j["fps"] = m.fps;
  j["frame_height_um"] = m.frame_height_um;
  if (m.um_per_pixel) j["um_per_pixel"] = *m.um_per_pixel;
  if (m.loudness_db) j["loudness_db"] = *m.loudness_db;
  if (m.mask_label) j["mask_label"] = *m.mask_label;
  if (m.event_kind) j["event_kind"] = std::string(to_string(*m.event_kind));
  return j;
}

FrameStack::FrameStack(std::vector<GrayImage> frames, Manifest manifest)
    : frames_(std::move(frames)), manifest_(std::move(manifest)) {
  if (frames_.empty()) throw Error(ErrorCode::EmptyInput, "frame stack needs at least one frame");
  const int w = frames_.front().width();
  const int h = frames_.front().height();
  if (w <= 0 || h <= 0) throw Error(ErrorCode::InconsistentDimensions, "frames must be non-empty");
  for (std::size_t i = 1; i < frames_.size(); ++i) {
    if (!frames_[i].same_shape(w, h))
      throw Error(ErrorCode::InconsistentDimensions,
                  "frame " + std::to_string(i) + " is " + std::to_string(frames_[i].width()) + "x" +
                      std::to_string(frames_[i].height()) + ", expected " + std::to_string(w) + "x" +
                      std::to_string(h));
  }
  if (!(manifest_.fps > 0.0)) throw Error(ErrorCode::InvalidField, "fps must be positive");
  // An explicit scale wins; the field height follows from it.
  if (manifest_.um_per_pixel) {
    manifest_.frame_height_um = *manifest_.um_per_pixel * h;
  } else {
    manifest_.um_per_pixel = manifest_.frame_height_um / h;
  }
  if (!(*manifest_.um_per_pixel > 0.0)) throw Error(ErrorCode::InvalidField, "um_per_pixel must be positive");
}

std::string frame_file_name(int ordinal, std::string_view extension) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "frame_%0*d.", kOrdinalDigits, ordinal);
  return std::string(buffer) + std::string(extension);
}

FrameStack load_stack(const fs::path& directory, const LoadOptions& options) {
  std::error_code ec;
  if (!fs::is_directory(directory, ec)) throw Error(ErrorCode::Io, directory.string() + " is not a directory");

  const fs::path manifest_path = directory / kManifestFileName;
  if (!fs::is_regular_file(manifest_path, ec))
    throw Error(ErrorCode::MissingManifest, "no " + std::string(kManifestFileName) + " in " + directory.string());

  nlohmann::json raw;
  {
    std::ifstream in(manifest_path);
    raw = nlohmann::json::parse(in, nullptr, false);
    if (raw.is_discarded()) throw Error(ErrorCode::InvalidField, "manifest.json is not valid JSON");
  }
  Manifest manifest = validate_manifest(raw);

  static const std::regex kFramePattern(R"(frame_(\d+)\.(pgm|png))", std::regex::icase);
  std::map<long, fs::path> by_ordinal;
  for (const auto& entry : fs::directory_iterator(directory)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.rfind("frame_", 0) != 0) continue;
    std::smatch match;
    if (!std::regex_match(name, match, kFramePattern)) {
      throw Error(ErrorCode::NonMonotonicOrdinals, "unrecognised frame file name " + name);
    }
    if (match[1].length() != kOrdinalDigits)
      throw Error(ErrorCode::NonMonotonicOrdinals, name + " is not zero-padded to 6 digits");
    const long ordinal = std::stol(match[1].str());
    if (!by_ordinal.emplace(ordinal, entry.path()).second)
      throw Error(ErrorCode::NonMonotonicOrdinals, "duplicate frame ordinal " + std::to_string(ordinal));
  }
  if (by_ordinal.empty()) throw Error(ErrorCode::EmptyInput, "no frame files in " + directory.string());

  std::vector<fs::path> paths;
  paths.reserve(by_ordinal.size());
  long expected = by_ordinal.begin()->first;
  for (const auto& [ordinal, path] : by_ordinal) {
    if (ordinal != expected)
      throw Error(ErrorCode::NonMonotonicOrdinals, "frame ordinal " + std::to_string(expected) + " is missing");
    paths.push_back(path);
    ++expected;
  }

  std::vector<GrayImage> frames(paths.size());
  parallel_for(paths.size(), options.threads, [&](std::size_t i) { frames[i] = io::load_image(paths[i]); });
  return FrameStack(std::move(frames), std::move(manifest));
}

void save_stack(const FrameStack& stack, const fs::path& directory, int first_ordinal) {
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) throw Error(ErrorCode::UnwritableOutput, "cannot create " + directory.string() + ": " + ec.message());
  write_file_atomic(directory / kManifestFileName, manifest_to_json(stack.manifest()).dump(2) + "\n");
  for (std::size_t i = 0; i < stack.size(); ++i) {
    const auto bytes = io::encode_pgm(stack.frame(i));
    write_file_atomic(directory / frame_file_name(first_ordinal + static_cast<int>(i)), bytes);
  }
}

}  // namespace droplab
