#include "iterlog/cmj.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <type_traits>

#include "iterlog/numeric.hpp"
#include "iterlog/parallel.hpp"
#include "iterlog/stats.hpp"

namespace iterlog {

double expected_population(std::size_t k, double mu, double t) { return leading_term(k, mu, t); }

void validate(const SimConfig& config) {
  if (!(config.horizon > 0.0) || !std::isfinite(config.horizon)) {
    throw Error("horizon t must be positive");
  }
  if (config.max_generation == 0) throw Error("max generation K must be at least 1");
  if (config.replicas == 0) throw Error("replica count R must be at least 1");
  for (std::size_t j = 0; j < config.grid.size(); ++j) {
    if (!(config.grid[j] >= 0.0) || config.grid[j] > config.horizon) {
      throw Error("grid points must lie in [0, horizon]");
    }
    if (j > 0 && !(config.grid[j] > config.grid[j - 1])) {
      throw Error("grid points must be strictly increasing");
    }
  }
  const double mu = moments(config.xi).mean;
  double total = 0.0;
  for (std::size_t k = 1; k <= config.max_generation; ++k) {
    total += expected_population(k, mu, config.horizon);
  }
  if (!(total <= config.population_cap)) throw Error("horizon/generation cap");
}

namespace {

template <class XiSampler>
struct StandardOffspring {
  static constexpr bool counts_in_bulk = std::is_same_v<XiSampler, ExponentialSampler>;
  const XiSampler& xi;

  // Exponential gaps make the number of offspring in a window Poisson, so the
  // last generation can be counted without drawing its birth times.
  std::uint64_t count(RngStream& rng, double origin, double horizon) const
    requires counts_in_bulk
  {
    return rng.poisson(xi.rate() * (horizon - origin));
  }

  template <class Emit>
  void operator()(RngStream& rng, double origin, double horizon, Emit&& emit) const {
    double position = origin + xi(rng);
    while (position <= horizon) {
      emit(position);
      position += xi(rng);
    }
  }
};

template <class XiSampler, class EtaSampler>
struct PerturbedOffspring {
  static constexpr bool counts_in_bulk = false;
  const XiSampler& xi;
  const EtaSampler& eta;

  // T_n = S_{n-1} + eta_n; the walk S bounds T from below, so stop once it
  // passes the horizon.
  template <class Emit>
  void operator()(RngStream& rng, double origin, double horizon, Emit&& emit) const {
    double walk = origin;
    while (walk <= horizon) {
      const double birth = walk + eta(rng);
      if (birth <= horizon) emit(birth);
      walk += xi(rng);
    }
  }
};

template <class Offspring>
SimOutcome run_replica(const SimConfig& config, std::size_t replica, const Offspring& offspring) {
  RngStream rng(config.seed, replica);
  const std::size_t generations = config.max_generation;
  const double horizon = config.horizon;
  const auto& grid = config.grid;
  const bool retain = config.retain_first_generation;
  // Runtime guard for unusually large realizations.
  const double hard_cap = 4.0 * config.population_cap + 1000.0;

  SimOutcome out;
  out.replica = replica;
  out.horizon = horizon;
  out.retained = retain;
  out.counts.assign(generations, 0);
  std::vector<std::vector<std::uint64_t>> hits;
  if (!grid.empty()) hits.assign(grid.size(), std::vector<std::uint64_t>(generations, 0));
  std::uint64_t births = 0;

  auto record = [&](std::size_t k, double birth, std::uint32_t root) {
    ++out.counts[k - 1];
    if (++births > hard_cap) throw Error("horizon/generation cap");
    if (!grid.empty()) {
      const auto j = static_cast<std::size_t>(
          std::lower_bound(grid.begin(), grid.end(), birth) - grid.begin());
      if (j < grid.size()) ++hits[j][k - 1];
    }
    if (retain && k >= 2) ++out.descendants[root][k - 2];
  };

  std::vector<double> current;
  std::vector<std::uint32_t> roots;
  offspring(rng, 0.0, horizon, [&](double birth) {
    const auto root = static_cast<std::uint32_t>(out.counts[0]);
    if (retain) {
      out.first_generation.push_back(birth);
      out.descendants.emplace_back(generations > 1 ? generations - 1 : 0, 0);
    }
    record(1, birth, root);
    if (generations > 1) {
      current.push_back(birth);
      roots.push_back(root);
    }
  });

  std::vector<double> next;
  std::vector<std::uint32_t> next_roots;
  for (std::size_t parent_level = 1; parent_level < generations; ++parent_level) {
    const std::size_t child_level = parent_level + 1;
    const bool store = child_level < generations;
    next.clear();
    next_roots.clear();
    if constexpr (Offspring::counts_in_bulk) {
      if (!store && grid.empty()) {
        for (std::size_t i = 0; i < current.size(); ++i) {
          const std::uint64_t n = offspring.count(rng, current[i], horizon);
          out.counts[child_level - 1] += n;
          births += n;
          if (births > hard_cap) throw Error("horizon/generation cap");
          if (retain) out.descendants[roots[i]][child_level - 2] += n;
        }
        continue;
      }
    }
    for (std::size_t i = 0; i < current.size(); ++i) {
      const std::uint32_t root = roots[i];
      offspring(rng, current[i], horizon, [&](double birth) {
        record(child_level, birth, root);
        if (store) {
          next.push_back(birth);
          next_roots.push_back(root);
        }
      });
    }
    current.swap(next);
    roots.swap(next_roots);
  }

  if (!grid.empty()) {
    out.path.assign(grid.size(), std::vector<std::uint64_t>(generations, 0));
    for (std::size_t j = 0; j < grid.size(); ++j) {
      for (std::size_t k = 0; k < generations; ++k) {
        out.path[j][k] = hits[j][k] + (j > 0 ? out.path[j - 1][k] : 0);
      }
    }
  }
  return out;
}

}  // namespace

SimOutcome simulate_generations(const SimConfig& config, std::size_t replica) {
  validate(config);
  const Sampler xi = make_sampler(config.xi);
  if (!config.eta) {
    return std::visit(
        [&](const auto& x) {
          using X = std::decay_t<decltype(x)>;
          return run_replica(config, replica, StandardOffspring<X>{x});
        },
        xi);
  }
  const Sampler eta = make_sampler(*config.eta);
  return std::visit(
      [&](const auto& x, const auto& e) {
        using X = std::decay_t<decltype(x)>;
        using E = std::decay_t<decltype(e)>;
        return run_replica(config, replica, PerturbedOffspring<X, E>{x, e});
      },
      xi, eta);
}

namespace {

// Centers for k = 1..K in one pass, so the exact lattice table is built once.
std::vector<double> centering_values(const SimConfig& config, std::size_t max_level, double t,
                                     Centering mode) {
  const Moments xi = moments(config.xi);
  std::vector<double> out(max_level);
  for (std::size_t k = 1; k <= max_level; ++k) out[k - 1] = leading_term(k, xi.mean, t);
  if (mode == Centering::formula) return out;

  const auto* xi_lattice = std::get_if<LatticeLaw>(&config.xi);
  const LatticeLaw* eta_lattice = config.eta ? std::get_if<LatticeLaw>(&*config.eta) : nullptr;
  if (xi_lattice != nullptr && (!config.eta || eta_lattice != nullptr)) {
    const double d = xi_lattice->span();
    const auto n = static_cast<std::size_t>(std::floor(t / d + 1e-9));
    const RenewalTable table = eta_lattice != nullptr
                                   ? exact_perturbed_table(*xi_lattice, *eta_lattice, n, max_level)
                                   : exact_table(*xi_lattice, n, max_level);
    for (std::size_t k = 1; k <= max_level; ++k) out[k - 1] = table.value(k, n);
    return out;
  }
  // Nonlattice: leading term plus k (E xi^2/(2 mu^2) - E eta/mu) t^(k-1)/((k-1)! mu^(k-1)).
  const double eta_mean = config.eta ? moments(*config.eta).mean : xi.mean;
  for (std::size_t k = 1; k <= max_level; ++k) {
    const double scale = power(t, k - 1) / (factorial(k - 1) * power(xi.mean, k - 1));
    out[k - 1] += lattice_offset(k, xi, eta_mean, 0.0) * scale;
  }
  return out;
}

}  // namespace

double centering_value(const SimConfig& config, std::size_t k, double t, Centering mode) {
  if (k == 0) throw Error("generation index must be at least 1");
  return centering_values(config, k, t, mode)[k - 1];
}

double clt_statistic(double yk, std::size_t k, double t, const Moments& xi, double center) {
  if (!(t > 0.0)) throw Error("CLT statistic needs t > 0");
  const double a = lil_constant(k, xi.mean, std::sqrt(xi.variance));
  return a * (yk - center) / std::pow(t, static_cast<double>(k) - 0.5);
}

LilStatistic lil_statistic(double yk, std::size_t k, double t, const Moments& xi, double center,
                           Centering mode) {
  if (!(t > std::numbers::e)) throw Error("LIL statistic undefined");
  const double a = lil_constant(k, xi.mean, std::sqrt(xi.variance));
  const double scale =
      std::sqrt(2.0 * std::pow(t, 2.0 * static_cast<double>(k) - 1.0) * std::log(std::log(t)));
  return {k, t, a * (yk - center) / scale, mode};
}

EnsembleSummary monte_carlo(const SimConfig& config, const McOptions& options) {
  validate(config);
  if (config.replicas < 2) throw Error("Monte Carlo needs at least two replicas");
  EnsembleSummary summary;
  summary.moments = moments(config.xi);
  summary.centering = options.centering;
  summary.horizon = config.horizon;

  std::vector<SimOutcome> outcomes(config.replicas);
  parallel_for(config.replicas,
               [&](std::size_t r) { outcomes[r] = simulate_generations(config, r); });

  const std::size_t generations = config.max_generation;
  const double t = config.horizon;
  const auto centers = centering_values(config, generations, t, options.centering);
  const bool degenerate = !(summary.moments.variance > 0.0);
  for (std::size_t k = 1; k <= generations; ++k) {
    GenerationSummary gen;
    gen.k = k;
    gen.center = centers[k - 1];
    std::vector<double> values(outcomes.size());
    for (std::size_t r = 0; r < outcomes.size(); ++r) {
      values[r] = static_cast<double>(outcomes[r].count(k));
    }
    gen.mean = sample_mean(values);
    gen.variance = sample_variance(values);
    gen.standard_error = std::sqrt(gen.variance / static_cast<double>(values.size()));
    if (!degenerate) {
      gen.clt.reserve(values.size());
      for (double y : values) {
        gen.clt.push_back(clt_statistic(y, k, t, summary.moments, gen.center));
      }
      if (t > std::numbers::e) {
        gen.lil.reserve(values.size());
        for (double y : values) {
          gen.lil.push_back(
              lil_statistic(y, k, t, summary.moments, gen.center, options.centering).value);
        }
      }
    }
    summary.generations.push_back(std::move(gen));
  }
  if (options.keep_outcomes) summary.outcomes = std::move(outcomes);
  return summary;
}

RenewalFunction RenewalFunction::poisson(double rate) {
  if (!(rate > 0.0)) throw Error("Poisson rate must be positive");
  return RenewalFunction(rate, std::nullopt);
}

RenewalFunction RenewalFunction::lattice(RenewalTable table) {
  return RenewalFunction(0.0, std::move(table));
}

RenewalFunction RenewalFunction::exact(const Law& law, double horizon, std::size_t max_level) {
  if (const auto* lattice_law = std::get_if<LatticeLaw>(&law)) {
    const auto n = static_cast<std::size_t>(std::floor(horizon / lattice_law->span() + 1e-9));
    return lattice(exact_table(*lattice_law, n, std::max<std::size_t>(max_level, 1)));
  }
  if (is_exponential(law)) return poisson(std::get<SmoothLaw>(law).rate());
  throw Error("no exact renewal function for this nonlattice law");
}

double RenewalFunction::operator()(std::size_t k, double t) const {
  if (t < 0.0) return 0.0;
  if (k == 0) return 1.0;
  if (table_) return table_->at(k, t);
  return power(rate_ * t, k) / factorial(k);
}

FluctuationParts decompose_fluctuation(const SimOutcome& outcome, std::size_t k,
                                       const RenewalFunction& renewal) {
  if (!outcome.retained) throw Error("missing retained birth times");
  if (k < 2) throw Error("fluctuation decomposition needs k >= 2");
  if (k > outcome.counts.size()) throw Error("generation k was not simulated");
  const double t = outcome.horizon;
  NeumaierSum first_generation_part;
  NeumaierSum descendant_part;
  for (std::size_t r = 0; r < outcome.first_generation.size(); ++r) {
    const double expected = renewal(k - 1, t - outcome.first_generation[r]);
    first_generation_part.add(expected);
    descendant_part.add(static_cast<double>(outcome.descendants[r][k - 2]));
    descendant_part.add(-expected);
  }
  const double vk = renewal(k, t);
  FluctuationParts parts;
  parts.j_part = first_generation_part.value() - vk;
  parts.i_part = descendant_part.value();
  parts.total = static_cast<double>(outcome.count(k)) - vk;
  return parts;
}

std::vector<double> geometric_grid(double start, double base, std::size_t count) {
  if (!(start > 0.0) || !(base > 1.0)) throw Error("geometric grid needs start > 0 and base > 1");
  std::vector<double> grid(count);
  for (std::size_t j = 0; j < count; ++j) {
    grid[j] = start * std::pow(base, static_cast<double>(j));
  }
  return grid;
}

LilExtremaReport lil_running_extrema(const EnsembleSummary& ensemble,
                                     const std::vector<double>& grid, std::size_t k) {
  if (ensemble.outcomes.empty()) throw Error("running extrema need retained outcomes");
  LilExtremaReport report;
  report.k = k;
  std::vector<std::size_t> columns;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (grid[j] > std::numbers::e) {
      columns.push_back(j);
      report.times.push_back(grid[j]);
    }
  }
  if (columns.empty()) throw Error("no grid point exceeds e");
  report.overall_max = -std::numeric_limits<double>::infinity();
  report.overall_min = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> running_max(columns.size());
  std::vector<std::vector<double>> running_min(columns.size());
  for (const auto& outcome : ensemble.outcomes) {
    if (outcome.path.size() != grid.size()) throw Error("outcome path does not match the grid");
    std::vector<double> row;
    double hi = -std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < columns.size(); ++c) {
      const double t = grid[columns[c]];
      const double y = static_cast<double>(outcome.path[columns[c]].at(k - 1));
      const double value =
          lil_statistic(y, k, t, ensemble.moments, leading_term(k, ensemble.moments.mean, t))
              .value;
      row.push_back(value);
      hi = std::max(hi, value);
      lo = std::min(lo, value);
      running_max[c].push_back(hi);
      running_min[c].push_back(lo);
    }
    report.overall_max = std::max(report.overall_max, hi);
    report.overall_min = std::min(report.overall_min, lo);
    report.values.push_back(std::move(row));
  }
  for (std::size_t c = 0; c < columns.size(); ++c) {
    report.running_max_median.push_back(median(running_max[c]));
    report.running_min_median.push_back(median(running_min[c]));
  }
  return report;
}

}  // namespace iterlog
