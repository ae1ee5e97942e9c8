#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "droplab/image.hpp"

namespace droplab {

enum class EventKind { Speech, Cough, Sneeze, Spray };

std::string_view to_string(EventKind kind) noexcept;
std::optional<EventKind> parse_event_kind(std::string_view text) noexcept;

// Per-recording metadata read from manifest.json.
struct Manifest {
  static constexpr double kDefaultFps = 240.0;
  static constexpr double kDefaultFrameHeightUm = 100000.0;  // 10 cm field of view

  std::string trial_id;
  double fps = kDefaultFps;
  double frame_height_um = kDefaultFrameHeightUm;
  // Explicit spatial scale. When absent it is derived from frame_height_um
  // and the frame height once frames are attached (see FrameStack).
  std::optional<double> um_per_pixel;
  std::optional<double> loudness_db;
  std::optional<std::string> mask_label;
  std::optional<EventKind> event_kind;

  // Scale for a frame `height_px` rows tall.
  double scale_um_per_px(int height_px) const;

  friend bool operator==(const Manifest&, const Manifest&) = default;
};

// Applies defaults and checks invariants. Unknown keys are ignored.
Manifest validate_manifest(const nlohmann::json& raw);
nlohmann::json manifest_to_json(const Manifest& manifest);

// Ordered, equally sized 8-bit frames plus their calibration. Immutable.
class FrameStack {
 public:
  // Throws EmptyInput for no frames and InconsistentDimensions for mixed
  // sizes. Resolves manifest.um_per_pixel and frame_height_um so that
  // um_per_pixel * height == frame_height_um.
  FrameStack(std::vector<GrayImage> frames, Manifest manifest);

  std::size_t size() const noexcept { return frames_.size(); }
  int width() const noexcept { return frames_.front().width(); }
  int height() const noexcept { return frames_.front().height(); }
  const GrayImage& frame(std::size_t index) const { return frames_.at(index); }
  const std::vector<GrayImage>& frames() const noexcept { return frames_; }
  const Manifest& manifest() const noexcept { return manifest_; }
  double fps() const noexcept { return manifest_.fps; }
  double um_per_pixel() const noexcept { return *manifest_.um_per_pixel; }

  // t = index / fps.
  double timestamp(std::size_t index) const noexcept { return static_cast<double>(index) / manifest_.fps; }

 private:
  std::vector<GrayImage> frames_;
  Manifest manifest_;
};

struct LoadOptions {
  int threads = 1;
};

inline constexpr std::string_view kManifestFileName = "manifest.json";
inline constexpr int kOrdinalDigits = 6;

// Loads manifest.json plus frame_NNNNNN.{pgm,png}. Ordinals must be
// consecutive; frame index 0 is the lowest ordinal present.
FrameStack load_stack(const std::filesystem::path& directory, const LoadOptions& options = {});

// Writes manifest.json and binary PGM frames numbered from first_ordinal.
void save_stack(const FrameStack& stack, const std::filesystem::path& directory, int first_ordinal = 1);

std::string frame_file_name(int ordinal, std::string_view extension = "pgm");

}  // namespace droplab
