#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace iterlog {

struct Check {
  std::string name;
  /// Acceptance criterion number; 0 for supplementary checks.
  int criterion = 0;
  double target = 0.0;
  double computed = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  /// Report-only checks never affect the exit status.
  bool gated = true;
  /// formula, table or MC.
  std::string provenance;
  std::string note;
};

enum class Suite { fast, full };

Suite parse_suite(const std::string& name);
std::string suite_name(Suite suite);

struct VerifyOptions {
  Suite suite = Suite::fast;
  std::uint64_t seed = 0;
  /// Restrict to these criteria (empty: all in the suite).
  std::vector<int> criteria;
  /// Where to drop the running-extrema SVGs; none when unset.
  std::optional<std::filesystem::path> plot_dir;
};

struct VerificationReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::vector<Check> checks;

  /// False iff some gated check failed.
  bool passed() const;
};

/// Seed used for criterion `criterion` under master seed `seed`.
std::uint64_t criterion_seed(std::uint64_t seed, int criterion);

/// Checks for one criterion (0 = supplementary checks of the full suite).
std::vector<Check> verify_criterion(int criterion, const VerifyOptions& options);

VerificationReport run_verification(const VerifyOptions& options);

/// Deterministic JSON (no timings, fixed key order).
nlohmann::ordered_json to_json(const VerificationReport& report);

}  // namespace iterlog
