#include "iterlog/renewal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "iterlog/numeric.hpp"
#include "iterlog/stats.hpp"

namespace iterlog {

namespace {

void guard_entries(std::size_t entries, const TableLimits& limits) {
  if (entries > limits.max_entries) throw Error("horizon too large");
}

// Index n with t == n * span up to rounding; throws when t is off the grid.
std::size_t grid_index(double t, double span, const char* what) {
  const double ratio = t / span;
  const double nearest = std::round(ratio);
  if (!(t >= 0.0) || std::abs(ratio - nearest) > 1e-9 * std::max(1.0, ratio)) {
    throw Error(std::string(what) + " is off the table grid");
  }
  return static_cast<std::size_t>(nearest);
}

bool same_span(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(a, b); }

}  // namespace

RenewalSequence renewal_sequence(const LatticeLaw& law, std::size_t horizon,
                                 const TableLimits& limits) {
  if (horizon >= limits.max_entries) throw Error("horizon too large");
  RenewalSequence seq;
  seq.span = law.span();
  seq.u.assign(horizon + 1, 0.0);
  seq.u[0] = 1.0;
  const std::size_t support = law.max_index();
  for (std::size_t n = 1; n <= horizon; ++n) {
    NeumaierSum sum;
    const std::size_t top = std::min(n, support);
    for (std::size_t m = 1; m <= top; ++m) sum.add(law.mass(m) * seq.u[n - m]);
    seq.u[n] = sum.value();
  }
  return seq;
}

RenewalTable::RenewalTable(double span, std::vector<double> level_one, TableKind kind)
    : span_(span), kind_(kind) {
  if (!(span > 0.0)) throw Error("table span must be positive");
  if (level_one.empty()) throw Error("renewal table needs at least the point n = 0");
  levels_.push_back(std::move(level_one));
}

double RenewalTable::value(std::size_t k, std::size_t n) const {
  if (k == 0 || k > levels_.size()) throw Error("renewal table level out of range");
  if (n > horizon()) throw Error("renewal table index beyond the horizon");
  return levels_[k - 1][n];
}

double RenewalTable::at(std::size_t k, double t) const {
  if (t < 0.0) return 0.0;
  const auto n = static_cast<std::size_t>(std::floor(t / span_ + 1e-9));
  return value(k, n);
}

std::span<const double> RenewalTable::level(std::size_t k) const {
  if (k == 0 || k > levels_.size()) throw Error("renewal table level out of range");
  return levels_[k - 1];
}

void RenewalTable::append_level(std::vector<double> values) {
  if (values.size() != levels_.front().size()) throw Error("renewal table level size mismatch");
  levels_.push_back(std::move(values));
}

RenewalTable standard_table(const RenewalSequence& sequence) {
  std::vector<double> level(sequence.u.size(), 0.0);
  NeumaierSum running;
  for (std::size_t n = 1; n < sequence.u.size(); ++n) {
    running.add(sequence.u[n]);
    level[n] = running.value();
  }
  return RenewalTable(sequence.span, std::move(level), TableKind::standard);
}

namespace {

std::vector<double> increments(std::span<const double> level) {
  std::vector<double> out(level.size());
  out[0] = level[0];
  for (std::size_t n = 1; n < level.size(); ++n) out[n] = level[n] - level[n - 1];
  return out;
}

// values[n] = sum_{m=0..n} function[n - m] * measure[m]
std::vector<double> stieltjes(std::span<const double> function, std::span<const double> measure) {
  std::vector<double> out(function.size(), 0.0);
  for (std::size_t n = 0; n < function.size(); ++n) {
    NeumaierSum sum;
    for (std::size_t m = 0; m <= n; ++m) {
      if (measure[m] != 0.0) sum.add(function[n - m] * measure[m]);
    }
    out[n] = sum.value();
  }
  return out;
}

}  // namespace

RenewalTable convolve_levels(RenewalTable table, std::size_t max_level, ConvolutionOrder order,
                             const TableLimits& limits) {
  if (max_level == 0) throw Error("max level must be at least 1");
  guard_entries(max_level * (table.horizon() + 1), limits);
  RenewalTable out(table.span(), std::vector<double>(table.level(1).begin(), table.level(1).end()),
                   table.kind());
  const auto base = table.level(1);
  const auto base_measure = increments(base);
  for (std::size_t k = 2; k <= max_level; ++k) {
    const auto previous = out.level(k - 1);
    if (order == ConvolutionOrder::previous_by_base) {
      out.append_level(stieltjes(previous, base_measure));
    } else {
      out.append_level(stieltjes(base, increments(previous)));
    }
  }
  return out;
}

RenewalTable perturbed_table(const RenewalSequence& sequence, const LatticeLaw& eta) {
  if (!same_span(sequence.span, eta.span())) throw Error("incommensurable lattices");
  const std::size_t horizon = sequence.horizon();
  std::vector<double> cumulative(horizon + 1);
  NeumaierSum running;
  for (std::size_t n = 0; n <= horizon; ++n) {
    running.add(sequence.u[n]);
    cumulative[n] = running.value();
  }
  std::vector<double> level(horizon + 1, 0.0);
  for (std::size_t n = 1; n <= horizon; ++n) {
    NeumaierSum sum;
    const std::size_t top = std::min(n, eta.max_index());
    for (std::size_t m = 1; m <= top; ++m) sum.add(eta.mass(m) * cumulative[n - m]);
    level[n] = sum.value();
  }
  return RenewalTable(sequence.span, std::move(level), TableKind::perturbed);
}

RenewalTable exact_table(const LatticeLaw& xi, std::size_t horizon, std::size_t max_level,
                         const TableLimits& limits) {
  guard_entries(std::max<std::size_t>(max_level, 1) * (horizon + 1), limits);
  return convolve_levels(standard_table(renewal_sequence(xi, horizon, limits)), max_level,
                         ConvolutionOrder::previous_by_base, limits);
}

RenewalTable exact_perturbed_table(const LatticeLaw& xi, const LatticeLaw& eta,
                                   std::size_t horizon, std::size_t max_level,
                                   const TableLimits& limits) {
  guard_entries(std::max<std::size_t>(max_level, 1) * (horizon + 1), limits);
  return convolve_levels(perturbed_table(renewal_sequence(xi, horizon, limits), eta), max_level,
                         ConvolutionOrder::previous_by_base, limits);
}

double leading_term(std::size_t k, double mu, double t) {
  return power(t / mu, k) / factorial(k);
}

double increment_asymptote(std::size_t k, double mu, double h, double t,
                           std::optional<double> span) {
  if (k == 0) throw Error("generation index must be at least 1");
  if (span) {
    const double ratio = h / *span;
    const double nearest = std::round(ratio);
    if (nearest < 1.0 || std::abs(ratio - nearest) > 1e-9 * std::max(1.0, ratio)) {
      throw Error("increment not on lattice");
    }
  }
  return h * power(t, k - 1) / (factorial(k - 1) * power(mu, k));
}

double lil_constant(std::size_t k, double mu, double sigma) {
  if (k == 0) throw Error("generation index must be at least 1");
  if (!(sigma > 0.0)) throw Error("degenerate law has no LIL normalization");
  if (!(mu > 0.0)) throw Error("mean must be positive");
  return std::pow(mu, static_cast<double>(k) + 0.5) * factorial(k - 1) *
         std::sqrt(2.0 * static_cast<double>(k) - 1.0) / sigma;
}

double nonlattice_offset(const Moments& xi) {
  return xi.second_moment / (2.0 * xi.mean * xi.mean) - 1.0;
}

double lattice_offset(std::size_t k, const Moments& xi, double eta_mean, double span) {
  const double mu = xi.mean;
  return span / (2.0 * mu) +
         static_cast<double>(k) * (xi.second_moment / (2.0 * mu * mu) - eta_mean / mu);
}

double renewal_offset_limit(const Moments& xi, double span) {
  return span / (2.0 * xi.mean) + xi.second_moment / (2.0 * xi.mean * xi.mean);
}

AsymptoticConstants asymptotic_constants(std::size_t k, const Moments& xi,
                                         std::optional<double> eta_mean,
                                         std::optional<double> span) {
  if (k == 0) throw Error("generation index must be at least 1");
  AsymptoticConstants out;
  out.k = k;
  out.mu = xi.mean;
  out.variance = xi.variance;
  out.second_moment = xi.second_moment;
  out.eta_mean = eta_mean.value_or(xi.mean);
  out.span = span;
  if (xi.variance > 0.0) out.a_k = lil_constant(k, xi.mean, std::sqrt(xi.variance));
  out.b = nonlattice_offset(xi);
  if (span) {
    out.c_k = lattice_offset(k, xi, out.eta_mean, *span);
    out.d = renewal_offset_limit(xi, *span);
  }
  return out;
}

double second_order(std::size_t k, const AsymptoticConstants& constants, double t,
                    LatticeMode mode) {
  if (k == 0) throw Error("generation index must be at least 1");
  const double scale =
      power(t, k - 1) / (factorial(k - 1) * power(constants.mu, k - 1));
  if (mode == LatticeMode::nonlattice) return constants.b * static_cast<double>(k) * scale;
  if (!constants.span) throw Error("lattice mode needs a lattice span");
  const Moments xi{constants.mu, constants.second_moment, constants.variance};
  return lattice_offset(k, xi, constants.eta_mean, *constants.span) * scale;
}

SubadditivityResult check_subadditivity(const RenewalTable& table, std::size_t k, double x,
                                        double h) {
  const std::size_t xi = grid_index(x, table.span(), "x");
  const std::size_t hi = grid_index(h, table.span(), "h");
  if (xi + hi > table.horizon()) throw Error("x + h exceeds the table horizon");
  const double left = table.value(k, xi + hi) - table.value(k, xi);
  const double right = (table.value(1, hi) + 1.0) * power(table.value(1, xi + hi), k - 1);
  const double slack = right - left;
  return {slack >= -1e-9 * std::max(1.0, std::abs(right)), slack};
}

SubadditivitySweep subadditivity_sweep(const RenewalTable& table, std::size_t k,
                                       std::size_t max_index) {
  if (max_index > table.horizon()) throw Error("sweep range exceeds the table horizon");
  const auto vk = table.level(k);
  const auto v1 = table.level(1);
  std::vector<double> tail(max_index + 1);
  for (std::size_t n = 0; n <= max_index; ++n) tail[n] = power(v1[n], k - 1);
  SubadditivitySweep out;
  out.min_slack = std::numeric_limits<double>::infinity();
  for (std::size_t x = 0; x <= max_index; ++x) {
    for (std::size_t h = 0; x + h <= max_index; ++h) {
      const double left = vk[x + h] - vk[x];
      const double right = (v1[h] + 1.0) * tail[x + h];
      const double slack = right - left;
      ++out.pairs;
      if (slack < -1e-9 * std::max(1.0, std::abs(right))) ++out.violations;
      out.min_slack = std::min(out.min_slack, slack);
    }
  }
  return out;
}

void write_table_csv(const RenewalTable& table, std::ostream& out) {
  out << "n,t";
  for (std::size_t k = 1; k <= table.levels(); ++k) out << ",V" << k;
  out << '\n';
  for (std::size_t n = 0; n <= table.horizon(); ++n) {
    out << n << ',' << format_g17(static_cast<double>(n) * table.span());
    for (std::size_t k = 1; k <= table.levels(); ++k) out << ',' << format_g17(table.value(k, n));
    out << '\n';
  }
}

nlohmann::ordered_json to_json(const AsymptoticConstants& constants) {
  nlohmann::ordered_json j;
  j["k"] = constants.k;
  j["mu"] = constants.mu;
  j["var"] = constants.variance;
  j["m2"] = constants.second_moment;
  j["eta_mean"] = constants.eta_mean;
  j["span"] = constants.span ? nlohmann::ordered_json(*constants.span) : nullptr;
  j["a_k"] = constants.a_k ? nlohmann::ordered_json(*constants.a_k) : nullptr;
  j["b"] = constants.b;
  j["C_k"] = constants.c_k ? nlohmann::ordered_json(*constants.c_k) : nullptr;
  j["D"] = constants.d ? nlohmann::ordered_json(*constants.d) : nullptr;
  return j;
}

}  // namespace iterlog
