#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "iterlog/report.hpp"

using namespace iterlog;

namespace {

std::size_t occurrences(const std::string& text, const std::string& part) {
  std::size_t n = 0;
  for (auto pos = text.find(part); pos != std::string::npos; pos = text.find(part, pos + 1)) ++n;
  return n;
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "iterlog-unit";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream in(line);
  std::string field;
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

TEST_SUITE("report") {
  TEST_CASE("svg rendering") {
    PlotSpec spec;
    spec.title = "a < b & c";
    spec.series = {{"up", {1.0, 2.0, 3.0}, {0.5, 0.7, 0.9}}, {"single", {2.0}, {-0.5}}};
    spec.reference_lines = {1.0, -1.0};
    const std::string svg = render_svg(spec);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(mentions(svg, "</svg>"));
    CHECK(mentions(svg, "a &lt; b &amp; c"));
    CHECK(occurrences(svg, "<polyline") == 1);
    CHECK(occurrences(svg, "<circle") == 4);
    CHECK(mentions(svg, "data-y=\"1\""));
    CHECK(mentions(svg, "data-y=\"-1\""));
    CHECK(svg == render_svg(spec));
  }

  TEST_CASE("svg errors") {
    PlotSpec empty;
    CHECK(mentions(error_of([&] { render_svg(empty); }), "empty series"));
    empty.series = {{"none", {}, {}}};
    CHECK(mentions(error_of([&] { render_svg(empty); }), "empty series"));
    PlotSpec ragged;
    ragged.series = {{"bad", {1.0, 2.0}, {1.0}}};
    CHECK_THROWS_AS(render_svg(ragged), Error);
  }

  TEST_CASE("files") {
    const auto path = scratch("plot.svg");
    PlotSpec spec;
    spec.series = {{"s", {0.0, 1.0}, {0.0, 1.0}}};
    emit_plot(spec, path);
    std::ifstream in(path);
    std::stringstream text;
    text << in.rdbuf();
    CHECK(text.str() == render_svg(spec));
    CHECK_THROWS_AS(write_file("/nonexistent-dir/x.csv", "x"), OutputError);
    const auto empty_path = scratch("empty.svg");
    std::filesystem::remove(empty_path);
    CHECK_THROWS_AS(emit_plot(PlotSpec{}, empty_path), Error);
    CHECK_FALSE(std::filesystem::exists(empty_path));
  }

  TEST_CASE("cmj csv") {
    SimConfig config;
    config.xi = LatticeLaw::point_mass(1.0);
    config.max_generation = 2;
    config.horizon = 5.5;
    config.replicas = 2;
    const auto ensemble = monte_carlo(config);
    std::ostringstream out;
    write_cmj_csv(out, config, ensemble);
    std::istringstream lines(out.str());
    std::string line;
    std::getline(lines, line);
    CHECK(line == "replica,k,t,Y,clt_stat,lil_stat");
    std::getline(lines, line);
    // Point mass has zero variance: no statistics.
    CHECK(line == "0,1,5.5,5,,");
    std::getline(lines, line);
    CHECK(line == "0,2,5.5,10,,");
    std::size_t rows = 2;
    while (std::getline(lines, line)) ++rows;
    CHECK(rows == 4);
  }

  TEST_CASE("cmj csv on a grid") {
    SimConfig config;
    config.xi = SmoothLaw::exponential(1.0);
    config.horizon = 10.0;
    config.grid = {1.0, 5.0, 10.0};
    config.replicas = 3;
    const auto ensemble = monte_carlo(config);
    std::ostringstream out;
    write_cmj_csv(out, config, ensemble);
    std::istringstream lines(out.str());
    std::string line;
    std::getline(lines, line);
    std::size_t rows = 0;
    while (std::getline(lines, line)) {
      ++rows;
      const auto fields = split_csv(line);
      REQUIRE(fields.size() == 6);
      CHECK_FALSE(fields[4].empty());
      CHECK(fields[5].empty() == (fields[2] == "1"));  // LIL needs t > e
    }
    CHECK(rows == 9);
    McOptions bare;
    bare.keep_outcomes = false;
    CHECK_THROWS_AS(write_cmj_csv(out, config, monte_carlo(config, bare)), Error);
  }

  TEST_CASE("rrt and gauss csv") {
    RngStream rng(1, 0);
    std::vector<ProfileTrace> traces{grow_discrete(10, 2, rng), grow_discrete(100, 2, rng)};
    std::ostringstream out;
    write_rrt_csv(out, traces);
    std::istringstream lines(out.str());
    std::string line;
    std::getline(lines, line);
    CHECK(line == "replica,n,k,X,statistic");
    std::getline(lines, line);
    CHECK(line.rfind("0,10,1,", 0) == 0);
    CHECK(line.back() == ',');
    std::getline(lines, line);
    std::getline(lines, line);
    CHECK(line.rfind("1,100,1,", 0) == 0);
    CHECK(line.back() != ',');

    std::ostringstream g;
    write_gauss_csv(g, {{0, 1.0, 0.5, -0.25}});
    CHECK(g.str() == "replica,t,B1k,B2k\n0,1,0.5,-0.25\n");
  }
}
