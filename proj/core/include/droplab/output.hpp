#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace droplab {

// Resolved run configuration, echoed into every output file.
using ConfigEcho = std::vector<std::pair<std::string, std::string>>;

// Six significant digits, "%.6g". Missing values format as an empty field.
std::string format_number(double value);
std::string format_number(const std::optional<double>& value);

// "# key=value" lines placed ahead of a CSV header row.
std::string csv_preamble(const ConfigEcho& config);

// Writes via a sibling temp file and rename. Throws UnwritableOutput.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> contents);

namespace svg {

inline constexpr int kCanvasWidth = 960;
inline constexpr int kCanvasHeight = 540;

struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<double> x;
  std::vector<double> y;
  std::optional<std::size_t> marker;  // index of a highlighted point
};

struct BarChart {
  std::string title;
  std::string y_label;
  std::vector<std::string> labels;
  std::vector<double> values;
  std::vector<double> errors;  // optional, same length as values
};

std::string render(const LinePlot& plot, const ConfigEcho& config);
std::string render(const BarChart& chart, const ConfigEcho& config);

}  // namespace svg

}  // namespace droplab
