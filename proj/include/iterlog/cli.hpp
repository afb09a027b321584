#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

namespace iterlog {

/// Every knob of an iterlog invocation; mirrors the command-line flags.
struct ExperimentConfig {
  std::string subcommand = "mc";
  std::string law = "exp:rate=1";
  std::optional<std::string> eta;
  std::size_t k = 1;
  std::size_t K = 3;
  double t = 100.0;
  std::size_t N = 100;
  std::size_t replicas = 100;
  std::uint64_t seed = 0;
  /// geometric:base=B,count=C[,start=S]
  std::optional<std::string> grid;
  /// Empty means standard output.
  std::string out;
  /// csv, json or svg; empty picks the subcommand default.
  std::string format;
  std::string suite = "fast";
  /// formula or table centering.
  std::string mode = "formula";
  double step = 0.01;
  std::size_t replica = 0;
  /// rrt: yule or discrete.
  std::string grower = "yule";
  /// rrt: exact enumeration instead of simulation.
  bool exact = false;
  /// verify: restrict to these criteria.
  std::vector<int> criteria;
  /// verify: directory for report-only plots.
  std::string plots;
};

nlohmann::ordered_json to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);

/// Parses `geometric:base=1.5,count=26[,start=7.389]`; start defaults to e^2.
std::vector<double> parse_grid(const std::string& spec);

/// Runs the tool on argv-style arguments (args[0] is the program name).
/// Returns 0 on success, 1 when a gated check fails, 2 on usage or input errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace iterlog
