#include "droplab/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "droplab/error.hpp"

namespace droplab {

namespace fs = std::filesystem;

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";  // folds -0
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.6g", value);
  return buffer;
}

std::string format_number(const std::optional<double>& value) {
  return value ? format_number(*value) : std::string();
}

std::string csv_preamble(const ConfigEcho& config) {
  std::string out;
  for (const auto& [key, value] : config) out += "# " + key + "=" + value + "\n";
  return out;
}

void write_file_atomic(const fs::path& path, std::span<const std::uint8_t> contents) {
  const fs::path temp = path.string() + ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::UnwritableOutput, "cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(contents.data()), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(ErrorCode::UnwritableOutput, "short write to " + temp.string());
  }
  std::error_code ec;
  fs::rename(temp, path, ec);
  if (ec) {
    fs::remove(temp, ec);
    throw Error(ErrorCode::UnwritableOutput, "cannot rename into " + path.string());
  }
}

void write_file_atomic(const fs::path& path, std::string_view contents) {
  write_file_atomic(path, std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(contents.data()),
                                                        contents.size()));
}

namespace svg {

namespace {

constexpr double kLeft = 90.0;
constexpr double kRight = 30.0;
constexpr double kTop = 50.0;
constexpr double kBottom = 80.0;

std::string escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

// Config goes in an XML comment; "--" is not allowed inside one.
std::string config_comment(const ConfigEcho& config) {
  std::string body;
  for (const auto& [key, value] : config) body += "\n  " + key + "=" + value;
  std::string safe;
  for (char c : body) {
    if (c == '-' && !safe.empty() && safe.back() == '-') safe.push_back(' ');
    safe.push_back(c);
  }
  return "<!-- droplab config" + safe + "\n-->\n";
}

std::string coord(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.2f", v);
  return buffer;
}

std::pair<double, double> range_of(const std::vector<double>& values) {
  if (values.empty()) return {0.0, 1.0};
  auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  double a = *lo;
  double b = *hi;
  if (!(b > a)) {
    a -= 0.5;
    b += 0.5;
  }
  return {a, b};
}

void header(std::ostringstream& out, const std::string& title, const ConfigEcho& config) {
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kCanvasWidth << "\" height=\"" << kCanvasHeight
      << "\" viewBox=\"0 0 " << kCanvasWidth << ' ' << kCanvasHeight << "\">\n";
  out << config_comment(config);
  out << "<rect x=\"0\" y=\"0\" width=\"" << kCanvasWidth << "\" height=\"" << kCanvasHeight
      << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << kCanvasWidth / 2 << "\" y=\"30\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"18\">"
      << escape(title) << "</text>\n";
}

void axes(std::ostringstream& out, double x0, double x1, double y0, double y1) {
  out << "<line x1=\"" << coord(x0) << "\" y1=\"" << coord(y1) << "\" x2=\"" << coord(x1) << "\" y2=\"" << coord(y1)
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << coord(x0) << "\" y1=\"" << coord(y0) << "\" x2=\"" << coord(x0) << "\" y2=\"" << coord(y1)
      << "\" stroke=\"black\"/>\n";
}

void label(std::ostringstream& out, double x, double y, std::string_view anchor, std::string_view text,
           std::string_view transform = {}) {
  out << "<text x=\"" << coord(x) << "\" y=\"" << coord(y) << "\" text-anchor=\"" << anchor
      << "\" font-family=\"sans-serif\" font-size=\"13\"";
  if (!transform.empty()) out << " transform=\"" << transform << "\"";
  out << ">" << escape(text) << "</text>\n";
}

}  // namespace

std::string render(const LinePlot& plot, const ConfigEcho& config) {
  std::ostringstream out;
  header(out, plot.title, config);
  const double px0 = kLeft;
  const double px1 = kCanvasWidth - kRight;
  const double py0 = kTop;
  const double py1 = kCanvasHeight - kBottom;
  axes(out, px0, px1, py0, py1);

  const auto [xmin, xmax] = range_of(plot.x);
  const auto [ymin, ymax] = range_of(plot.y);
  auto sx = [&](double v) { return px0 + (v - xmin) / (xmax - xmin) * (px1 - px0); };
  auto sy = [&](double v) { return py1 - (v - ymin) / (ymax - ymin) * (py1 - py0); };

  label(out, px0, py1 + 20, "start", format_number(xmin));
  label(out, px1, py1 + 20, "end", format_number(xmax));
  label(out, px0 - 8, py1, "end", format_number(ymin));
  label(out, px0 - 8, py0 + 5, "end", format_number(ymax));
  label(out, (px0 + px1) / 2, py1 + 45, "middle", plot.x_label);
  label(out, 25, (py0 + py1) / 2, "middle", plot.y_label,
        "rotate(-90 25 " + coord((py0 + py1) / 2) + ")");

  const std::size_t n = std::min(plot.x.size(), plot.y.size());
  if (n > 0) {
    out << "<polyline fill=\"none\" stroke=\"#1f4fbf\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0) out << ' ';
      out << coord(sx(plot.x[i])) << ',' << coord(sy(plot.y[i]));
    }
    out << "\"/>\n";
  }
  if (plot.marker && *plot.marker < n) {
    const std::size_t i = *plot.marker;
    out << "<circle cx=\"" << coord(sx(plot.x[i])) << "\" cy=\"" << coord(sy(plot.y[i]))
        << "\" r=\"5\" fill=\"#d62728\"/>\n";
    label(out, sx(plot.x[i]) + 8, sy(plot.y[i]) - 8, "start", "peak " + format_number(plot.y[i]));
  }
  out << "</svg>\n";
  return out.str();
}

std::string render(const BarChart& chart, const ConfigEcho& config) {
  std::ostringstream out;
  header(out, chart.title, config);
  const double px0 = kLeft;
  const double px1 = kCanvasWidth - kRight;
  const double py0 = kTop;
  const double py1 = kCanvasHeight - kBottom;
  axes(out, px0, px1, py0, py1);

  double ymax = 0.0;
  for (std::size_t i = 0; i < chart.values.size(); ++i) {
    const double err = i < chart.errors.size() ? chart.errors[i] : 0.0;
    ymax = std::max(ymax, chart.values[i] + err);
  }
  if (!(ymax > 0.0)) ymax = 1.0;
  auto sy = [&](double v) { return py1 - std::max(v, 0.0) / ymax * (py1 - py0); };

  label(out, px0 - 8, py1, "end", "0");
  label(out, px0 - 8, py0 + 5, "end", format_number(ymax));
  label(out, 25, (py0 + py1) / 2, "middle", chart.y_label, "rotate(-90 25 " + coord((py0 + py1) / 2) + ")");

  const std::size_t n = chart.values.size();
  const double slot = n > 0 ? (px1 - px0) / static_cast<double>(n) : 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = px0 + slot * static_cast<double>(i) + slot * 0.15;
    const double w = slot * 0.7;
    const double top = sy(chart.values[i]);
    out << "<rect x=\"" << coord(x) << "\" y=\"" << coord(top) << "\" width=\"" << coord(w) << "\" height=\""
        << coord(py1 - top) << "\" fill=\"#4c72b0\"/>\n";
    if (i < chart.errors.size() && chart.errors[i] > 0.0) {
      const double cx = x + w / 2;
      out << "<line x1=\"" << coord(cx) << "\" y1=\"" << coord(sy(chart.values[i] + chart.errors[i])) << "\" x2=\""
          << coord(cx) << "\" y2=\"" << coord(sy(chart.values[i] - chart.errors[i]))
          << "\" stroke=\"black\"/>\n";
    }
    label(out, x + w / 2, py1 + 20, "middle", i < chart.labels.size() ? chart.labels[i] : std::string());
    label(out, x + w / 2, top - 6, "middle", format_number(chart.values[i]));
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace svg

}  // namespace droplab
