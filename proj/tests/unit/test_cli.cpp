#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "iterlog/cli.hpp"
#include "iterlog/error.hpp"
#include "json.hpp"

using iterlog::run;
using nlohmann::json;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "iterlog");
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "iterlog-cli-unit";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("moments") {
    const auto r = invoke({"moments", "--law", "exp:rate=1", "--K", "3"});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["mu"].get<double>() == doctest::Approx(1.0));
    CHECK(j["a"][1].get<double>() == doctest::Approx(std::sqrt(3.0)));
    CHECK(j["a"][2].get<double>() == doctest::Approx(2.0 * std::sqrt(5.0)));
    CHECK_FALSE(j.contains("C"));
    const auto lattice = json::parse(invoke({"moments", "--law", "geom:p=0.5"}).out);
    CHECK(lattice["d"].get<double>() == 1.0);
    CHECK(lattice["C"].size() == 3);
  }

  TEST_CASE("renewal table for the point mass is binomial") {
    const auto r = invoke({"renewal", "--law", "lattice:d=1;p=1", "--N", "6", "--K", "2",
                           "--format", "json"});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["levels"][1][6].get<double>() == doctest::Approx(15.0));
    CHECK(invoke({"renewal", "--law", "exp:rate=1"}).code == 2);
  }

  TEST_CASE("simulate") {
    const auto r = invoke({"simulate", "--law", "lattice:d=1;p=1", "--K", "2", "--t", "5.5"});
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out)["counts"] == json::array({5, 10}));
    const auto again = invoke({"simulate", "--law", "gamma:shape=2,rate=2", "--K", "2", "--t",
                               "20", "--seed", "3", "--replica", "4"});
    CHECK(again.out == invoke({"simulate", "--law", "gamma:shape=2,rate=2", "--K", "2", "--t",
                               "20", "--seed", "3", "--replica", "4"})
                           .out);
  }

  TEST_CASE("mc json and csv") {
    const auto r = invoke({"mc", "--law", "exp:rate=1", "--K", "2", "--t", "20", "--replicas",
                           "50", "--grid", "geometric:base=1.5,count=3"});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["generations"].size() == 2);
    CHECK(j["lil_extrema"]["times"].size() == 3);
    const auto csv = invoke({"mc", "--law", "exp:rate=1", "--K", "1", "--t", "20", "--replicas",
                             "3", "--format", "csv"});
    REQUIRE(csv.code == 0);
    CHECK(csv.out.rfind("replica,k,t,Y,clt_stat,lil_stat\n", 0) == 0);
    CHECK(invoke({"mc", "--format", "svg", "--out", scratch("x.svg").string()}).code == 2);
    CHECK(invoke({"mc", "--format", "svg"}).code == 2);
    CHECK(invoke({"mc", "--k", "4", "--K", "3", "--t", "5", "--replicas", "2"}).code == 2);
  }

  TEST_CASE("mc svg") {
    const auto path = scratch("extrema.svg");
    std::filesystem::remove(path);
    const auto r = invoke({"mc", "--t", "60", "--replicas", "20", "--grid",
                           "geometric:base=1.5,count=5", "--format", "svg", "--out",
                           path.string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream in(path);
    std::stringstream text;
    text << in.rdbuf();
    CHECK(mentions(text.str(), "data-y=\"1\""));
  }

  TEST_CASE("rrt") {
    const auto exact = invoke({"rrt", "--exact", "--N", "2", "--K", "2"});
    REQUIRE(exact.code == 0);
    const auto pmf = json::parse(exact.out)["pmf"];
    CHECK(pmf["2,0"].get<double>() == doctest::Approx(0.5));
    CHECK(pmf["1,1"].get<double>() == doctest::Approx(0.5));
    CHECK(invoke({"rrt", "--exact", "--N", "10"}).code == 2);
    const auto sim = invoke({"rrt", "--N", "100", "--K", "2", "--replicas", "20", "--format",
                             "json", "--grower", "discrete"});
    REQUIRE(sim.code == 0);
    CHECK(json::parse(sim.out)["levels"].size() == 2);
    CHECK(invoke({"rrt", "--grower", "other"}).code == 2);
  }

  TEST_CASE("gauss") {
    const auto r = invoke({"gauss", "--law", "geom:p=0.5", "--k", "2", "--t", "6", "--step",
                           "0.25", "--replicas", "10", "--format", "json"});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["B2k"]["target"].get<double>() == doctest::Approx(0.5));
    CHECK(j["B1k"]["target"].get<double>() == doctest::Approx(72.0));
    CHECK(invoke({"gauss", "--law", "geom:p=0.5", "--k", "2", "--t", "6", "--step", "0.3"})
              .code == 2);
  }

  TEST_CASE("usage errors exit with 2") {
    CHECK(invoke({}).code == 2);
    CHECK(invoke({"bogus"}).code == 2);
    CHECK(invoke({"mc", "--nope"}).code == 2);
    const auto bad_law = invoke({"moments", "--law", "weird:x=1"});
    CHECK(bad_law.code == 2);
    CHECK(mentions(bad_law.err, "iterlog: "));
    CHECK(invoke({"mc", "--t", "500", "--K", "6"}).code == 2);
    CHECK(invoke({"moments", "--out", "/nonexistent-dir/m.json"}).code == 2);
    CHECK(invoke({"moments", "--format", "csv"}).code == 2);
  }

  TEST_CASE("config files and overrides") {
    const auto path = scratch("config.json");
    {
      std::ofstream file(path);
      file << R"({"law": "geom:p=0.5", "K": 2, "t": 40, "seed": 9})";
    }
    const auto printed = invoke({"mc", "--config", path.string(), "--t", "30", "--print-config"});
    REQUIRE(printed.code == 0);
    const auto j = json::parse(printed.out);
    CHECK(j["law"] == "geom:p=0.5");
    CHECK(j["K"] == 2);
    CHECK(j["t"].get<double>() == 30.0);
    CHECK(j["seed"] == 9);
    CHECK(j["subcommand"] == "mc");

    const auto round = iterlog::config_from_json(j);
    CHECK(json(iterlog::to_json(round)) == j);

    const auto unknown = scratch("unknown.json");
    {
      std::ofstream file(unknown);
      file << R"({"lawz": "exp:rate=1"})";
    }
    CHECK(invoke({"mc", "--config", unknown.string()}).code == 2);
    CHECK(invoke({"mc", "--config", scratch("missing.json").string()}).code == 2);
  }

  TEST_CASE("grid parsing") {
    const auto grid = iterlog::parse_grid("geometric:base=2,count=3,start=1");
    CHECK(grid == std::vector<double>{1.0, 2.0, 4.0});
    CHECK(iterlog::parse_grid("geometric:base=1.5,count=1").front() ==
          doctest::Approx(std::exp(2.0)));
    CHECK_THROWS_AS(iterlog::parse_grid("linear:base=2,count=3"), iterlog::Error);
    CHECK_THROWS_AS(iterlog::parse_grid("geometric:base=2"), iterlog::Error);
    CHECK_THROWS_AS(iterlog::parse_grid("geometric:base=2x,count=3"), iterlog::Error);
    CHECK_THROWS_AS(iterlog::parse_grid("geometric:base=0.5,count=3"), iterlog::Error);
  }

  TEST_CASE("verify exit codes") {
    const auto ok = invoke({"verify", "--criterion", "1"});
    CHECK(ok.code == 0);
    const auto report = json::parse(ok.out);
    CHECK(report["suite"] == "fast");
    CHECK_FALSE(report["checks"].empty());
    CHECK(ok.out == invoke({"verify", "--criterion", "1"}).out);
    // The literal constant check of criterion 3 is gated and fails.
    CHECK(invoke({"verify", "--criterion", "3"}).code == 1);
    CHECK(invoke({"verify", "--criterion", "11"}).code == 2);
    CHECK(invoke({"verify", "--criterion", "1", "--out", "/nonexistent-dir/v.json"}).code == 2);
  }
}
