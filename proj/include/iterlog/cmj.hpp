#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "iterlog/dist.hpp"
#include "iterlog/renewal.hpp"

namespace iterlog {

/// Crump-Mode-Jagers population driven by an increasing walk (or by the
/// perturbed walk T_n = S_{n-1} + eta_n when `eta` is set).
struct SimConfig {
  Law xi = SmoothLaw::exponential(1.0);
  std::optional<Law> eta;
  std::size_t max_generation = 1;
  double horizon = 1.0;
  /// Optional increasing observation times; all must be <= horizon.
  std::vector<double> grid;
  std::uint64_t seed = 0;
  std::size_t replicas = 1;
  /// Keep generation-1 birth times and per-ancestor descendant counts.
  bool retain_first_generation = false;
  /// Cap on the expected number of births per replica, summed over k <= K.
  double population_cap = 1e7;
};

void validate(const SimConfig& config);

/// t^k / (k! mu^k), the expected generation-k population used for admission.
double expected_population(std::size_t k, double mu, double t);

struct SimOutcome {
  std::size_t replica = 0;
  double horizon = 0.0;
  /// counts[k - 1] = Y_k(horizon).
  std::vector<std::uint64_t> counts;
  /// path[j][k - 1] = Y_k(grid[j]).
  std::vector<std::vector<std::uint64_t>> path;
  bool retained = false;
  /// Generation-1 birth times S_r <= horizon, in birth order.
  std::vector<double> first_generation;
  /// descendants[r][j] = number of generation-(j + 2) individuals born by the
  /// horizon that descend from the r-th generation-1 individual.
  std::vector<std::vector<std::uint64_t>> descendants;

  std::uint64_t count(std::size_t k) const { return counts.at(k - 1); }
};

/// One replica, driven by RngStream(config.seed, replica).
SimOutcome simulate_generations(const SimConfig& config, std::size_t replica);

enum class Centering { formula, table };

/// Centering value for Y_k(t): t^k/(k! mu^k), or E Y_k(t) when `mode` is
/// table (exact lattice table; formula plus second-order term otherwise).
double centering_value(const SimConfig& config, std::size_t k, double t, Centering mode);

/// a_k (y_k - center) / t^(k - 1/2).
double clt_statistic(double yk, std::size_t k, double t, const Moments& xi, double center);

struct LilStatistic {
  std::size_t k = 1;
  double t = 0.0;
  double value = 0.0;
  Centering centering = Centering::formula;
};

/// a_k (y_k - center) / (2 t^(2k-1) log log t)^(1/2); requires t > e.
LilStatistic lil_statistic(double yk, std::size_t k, double t, const Moments& xi, double center,
                           Centering mode = Centering::formula);

struct GenerationSummary {
  std::size_t k = 1;
  double center = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  double standard_error = 0.0;
  std::vector<double> clt;
  /// Empty when the horizon is <= e.
  std::vector<double> lil;
};

struct EnsembleSummary {
  Moments moments;
  Centering centering = Centering::formula;
  double horizon = 0.0;
  std::vector<GenerationSummary> generations;
  std::vector<SimOutcome> outcomes;
};

struct McOptions {
  Centering centering = Centering::formula;
  bool keep_outcomes = true;
};

/// Runs config.replicas independent replicas (in parallel) and summarizes
/// them in replica order.
EnsembleSummary monte_carlo(const SimConfig& config, const McOptions& options = {});

/// Exact V_k(t): closed form for exponential laws, lattice table otherwise.
class RenewalFunction {
 public:
  static RenewalFunction poisson(double rate);
  static RenewalFunction lattice(RenewalTable table);
  /// Picks the exact representation for `law` up to horizon t and level K.
  static RenewalFunction exact(const Law& law, double horizon, std::size_t max_level);

  double operator()(std::size_t k, double t) const;

 private:
  RenewalFunction(double rate, std::optional<RenewalTable> table)
      : rate_(rate), table_(std::move(table)) {}

  double rate_;
  std::optional<RenewalTable> table_;
};

struct FluctuationParts {
  double i_part = 0.0;
  double j_part = 0.0;
  /// Y_k(t) - V_k(t).
  double total = 0.0;
};

/// Splits Y_k(t) - V_k(t) into I_k (descendant fluctuations) and J_k
/// (generation-1 fluctuation) at the outcome's horizon; k >= 2.
FluctuationParts decompose_fluctuation(const SimOutcome& outcome, std::size_t k,
                                       const RenewalFunction& renewal);

/// start * base^j for j = 0..count-1.
std::vector<double> geometric_grid(double start, double base, std::size_t count);

struct LilExtremaReport {
  std::size_t k = 1;
  std::vector<double> times;
  /// values[r][j]: LIL statistic of replica r at times[j].
  std::vector<std::vector<double>> values;
  /// Running maximum/minimum over j' <= j, medians across replicas.
  std::vector<double> running_max_median;
  std::vector<double> running_min_median;
  double overall_max = 0.0;
  double overall_min = 0.0;
};

/// Report-only running extrema of the LIL statistic along each replica path.
LilExtremaReport lil_running_extrema(const EnsembleSummary& ensemble,
                                     const std::vector<double>& grid, std::size_t k);

}  // namespace iterlog
