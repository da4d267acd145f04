#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "hwretail/error.hpp"
#include "hwretail/figure.hpp"

using namespace hwretail;

namespace {

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
  return n;
}

std::vector<PartitionCell> toy_cells() {
  std::vector<PartitionCell> c;
  for (double a : {1.2, 1.6})
    for (double p : {0.1, 0.3, 0.5, 0.7}) {
      const int m = p < 0.2 ? 36 : p < 0.4 ? 4 : p < 0.6 ? 2 : 1;
      c.push_back({p, a, {m}, m, -1.0});
    }
  return c;
}

}  // namespace

TEST_CASE("figure kinds") {
  CHECK(parse_figure_kind("bifurcation") == FigureKind::bifurcation);
  CHECK(parse_figure_kind("partition") == FigureKind::partition_heatmap);
  CHECK(parse_figure_kind("partition_heatmap") == FigureKind::partition_heatmap);
  CHECK(parse_figure_kind("ranges") == FigureKind::range_chart);
  CHECK(to_string(FigureKind::range_chart) == "range_chart");
  CHECK_THROWS_AS(parse_figure_kind("pie"), Error);
}

TEST_CASE("bifurcation diagram") {
  const auto b = bifurcation_2zone(1.2, make_range("0.01:0.99:0.01"));
  const auto svg = bifurcation_svg(b);
  CHECK(svg.rfind("<?xml", 0) == 0);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("version=\"1.1\"") != std::string::npos);
  CHECK(svg.find("stroke-dasharray") != std::string::npos);  // unstable dispersion branch
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg == bifurcation_svg(bifurcation_2zone(1.2, make_range("0.01:0.99:0.01"))));
}

TEST_CASE("partition heatmap") {
  const auto cells = toy_cells();
  CHECK(partition_legend_size(cells) == 4);
  const auto svg = partition_svg(cells, "toy");
  CHECK(svg == partition_svg(cells, "toy"));
  CHECK(svg.find("toy") != std::string::npos);
  // one rect per cell plus one legend swatch per winner size
  std::set<std::string> fills;
  for (auto p = svg.find("fill=\"#"); p != std::string::npos; p = svg.find("fill=\"#", p + 1))
    fills.insert(svg.substr(p + 6, 7));
  CHECK(fills.size() == 4);
  CHECK(count(svg, "class=\"legend\"") == 4);

  auto more = cells;
  more.push_back({0.9, 2.0, {9}, 9, -2.0});
  CHECK(partition_legend_size(more) == 5);
}

TEST_CASE("range chart") {
  StabilityRanges r{1.2, {0.1, 0.2}, {}};
  r.patterns.push_back({1, 1, {Verdict::stable, Verdict::stable}, {false, true}, {{0.1, 0.2}}, {{0.15, 0.2}}});
  r.patterns.push_back({2, 4, {Verdict::stable, Verdict::unstable}, {true, false}, {{0.1, 0.14}}, {{0.1, 0.15}}});
  const auto svg = range_chart_svg(r, "ranges");
  CHECK(svg == range_chart_svg(r, "ranges"));
  CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("file output") {
  const auto dir = std::filesystem::temp_directory_path() / "hw_figure_test";
  std::filesystem::create_directories(dir);
  write_text_file(dir / "a.svg", "<svg/>");
  std::ifstream in(dir / "a.svg");
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == "<svg/>");
  CHECK_THROWS_AS(write_text_file(dir / "missing" / "a.svg", "x"), IoError);
  std::filesystem::remove_all(dir);
}
