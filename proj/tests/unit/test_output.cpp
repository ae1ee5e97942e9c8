#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "droplab/output.hpp"
#include "expect_error.hpp"
#include "test_support.hpp"

using namespace droplab;
using droplab::testing::code_of;

TEST(Format, SixSignificantDigits) {
  EXPECT_EQ(format_number(128.112345), "128.112");
  EXPECT_EQ(format_number(12811.2449), "12811.2");
  EXPECT_EQ(format_number(0.0), "0");
  EXPECT_EQ(format_number(-0.0), "0");
  EXPECT_EQ(format_number(1e-7), "1e-07");
  EXPECT_EQ(format_number(std::optional<double>{}), "");
  EXPECT_EQ(format_number(std::optional<double>{2.5}), "2.5");
  EXPECT_EQ(format_number(std::numeric_limits<double>::quiet_NaN()), "nan");
  EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "inf");
}

TEST(Csv, PreambleLines) {
  EXPECT_EQ(csv_preamble({{"a", "1"}, {"b", "x y"}}), "# a=1\n# b=x y\n");
  EXPECT_EQ(csv_preamble({}), "");
}

TEST(AtomicWrite, WritesAndReplaces) {
  droplab::testing::TempDir dir;
  write_file_atomic(dir / "f.txt", std::string_view("one"));
  write_file_atomic(dir / "f.txt", std::string_view("two"));
  EXPECT_EQ(droplab::testing::read_text(dir / "f.txt"), "two");
  const std::vector<std::uint8_t> bytes = {1, 2, 3};
  write_file_atomic(dir / "b.bin", bytes);
  EXPECT_EQ(droplab::testing::read_text(dir / "b.bin"), std::string("\x01\x02\x03"));
  std::size_t count = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir.path())) ++count;
  EXPECT_EQ(count, 2u);
}

TEST(AtomicWrite, UnwritableDirectory) {
  EXPECT_EQ(code_of([] { write_file_atomic("/nonexistent-dir/x/y.txt", std::string_view("z")); }),
            ErrorCode::UnwritableOutput);
}

TEST(Svg, EmbedsConfigAndCanvas) {
  svg::LinePlot plot;
  plot.title = "series <a&b>";
  plot.x = {0, 1, 2};
  plot.y = {0, 5, 1};
  plot.marker = 1;
  const std::string s = svg::render(plot, {{"region", "full"}});
  EXPECT_NE(s.find("width=\"960\""), std::string::npos);
  EXPECT_NE(s.find("height=\"540\""), std::string::npos);
  EXPECT_NE(s.find("region=full"), std::string::npos);
  EXPECT_NE(s.find("&lt;a&amp;b&gt;"), std::string::npos);
  EXPECT_EQ(s, svg::render(plot, {{"region", "full"}}));

  svg::BarChart chart;
  chart.labels = {"a", "b"};
  chart.values = {1, 2};
  chart.errors = {0.1, 0.2};
  const std::string c = svg::render(chart, {});
  EXPECT_NE(c.find("<rect"), std::string::npos);
}

TEST(Svg, HandlesEmptyAndFlatData) {
  svg::LinePlot plot;
  EXPECT_NO_THROW(svg::render(plot, {}));
  plot.x = {0, 1};
  plot.y = {3, 3};
  const std::string s = svg::render(plot, {});
  EXPECT_EQ(s.find("nan"), std::string::npos);
}
