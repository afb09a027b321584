#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "json.hpp"

#include "iterlog/dist.hpp"

namespace iterlog {

/// Refuses tables whose total entry count would exceed `max_entries`.
struct TableLimits {
  std::size_t max_entries = 100'000'000;
};

/// Renewal masses u_n = expected number of walk points at site n d, with
/// u_0 = 1 for the point at the origin, so U(n d) = u_0 + ... + u_n.
struct RenewalSequence {
  double span = 1.0;
  std::vector<double> u;

  std::size_t horizon() const noexcept { return u.empty() ? 0 : u.size() - 1; }
};

RenewalSequence renewal_sequence(const LatticeLaw& law, std::size_t horizon,
                                 const TableLimits& limits = {});

enum class TableKind { standard, perturbed };

/// Grid values V_k(n d), n = 0..N, for levels k = 1..K.
class RenewalTable {
 public:
  RenewalTable(double span, std::vector<double> level_one, TableKind kind);

  double span() const noexcept { return span_; }
  std::size_t horizon() const noexcept { return levels_.front().size() - 1; }
  std::size_t levels() const noexcept { return levels_.size(); }
  TableKind kind() const noexcept { return kind_; }

  /// V_k(n d) for 1 <= k <= levels(), n <= horizon().
  double value(std::size_t k, std::size_t n) const;
  /// V_k(t) as a right-continuous step function of real t in [0, N d].
  double at(std::size_t k, double t) const;
  std::span<const double> level(std::size_t k) const;

  void append_level(std::vector<double> values);

 private:
  double span_;
  TableKind kind_;
  std::vector<std::vector<double>> levels_;
};

/// Level-one table V(n d) = U(n d) - 1.
RenewalTable standard_table(const RenewalSequence& sequence);

/// Which side of the Stieltjes convolution carries the measure:
/// V_k = V_{k-1} * dV (previous_by_base) or V_k = V * dV_{k-1} (base_by_previous).
enum class ConvolutionOrder { previous_by_base, base_by_previous };

/// Extends `table` to levels 1..K by repeated discrete Stieltjes convolution.
RenewalTable convolve_levels(RenewalTable table, std::size_t max_level,
                             ConvolutionOrder order = ConvolutionOrder::previous_by_base,
                             const TableLimits& limits = {});

/// Level-one table of the perturbed walk: V*(n d) = sum_m q_m U((n - m) d).
RenewalTable perturbed_table(const RenewalSequence& sequence, const LatticeLaw& eta);

/// Exact lattice table V_1..V_K on n = 0..N (standard walk).
RenewalTable exact_table(const LatticeLaw& xi, std::size_t horizon, std::size_t max_level,
                         const TableLimits& limits = {});
/// Exact lattice table V*_1..V*_K on n = 0..N (perturbed walk).
RenewalTable exact_perturbed_table(const LatticeLaw& xi, const LatticeLaw& eta,
                                   std::size_t horizon, std::size_t max_level,
                                   const TableLimits& limits = {});

/// t^k / (k! mu^k).
double leading_term(std::size_t k, double mu, double t);

/// h t^(k-1) / ((k-1)! mu^k). When `span` is given the law is lattice and h
/// must be a positive multiple of it.
double increment_asymptote(std::size_t k, double mu, double h, double t,
                           std::optional<double> span = std::nullopt);

/// sigma^(-1) mu^(k + 1/2) (k-1)! (2k-1)^(1/2).
double lil_constant(std::size_t k, double mu, double sigma);

struct AsymptoticConstants {
  std::size_t k = 1;
  double mu = 0.0;
  double variance = 0.0;
  double second_moment = 0.0;
  double eta_mean = 0.0;
  std::optional<double> span;
  std::optional<double> a_k;  // absent for degenerate laws
  double b = 0.0;
  std::optional<double> c_k;  // lattice only
  std::optional<double> d;    // lattice only
};

/// Eta defaults to xi (eta_mean = mu) when not given.
AsymptoticConstants asymptotic_constants(std::size_t k, const Moments& xi,
                                         std::optional<double> eta_mean = std::nullopt,
                                         std::optional<double> span = std::nullopt);

/// Nonlattice second-order constant b = E xi^2 / (2 mu^2) - 1.
double nonlattice_offset(const Moments& xi);
/// Lattice second-order constant of V*_k:
/// C_k = d / (2 mu) + k (E xi^2 / (2 mu^2) - E eta / mu).
double lattice_offset(std::size_t k, const Moments& xi, double eta_mean, double span);
/// Limit of U(n d) - n d / mu: D = d / (2 mu) + E xi^2 / (2 mu^2).
double renewal_offset_limit(const Moments& xi, double span);

enum class LatticeMode { nonlattice, lattice };

/// Second-order term of V_k(t) - t^k / (k! mu^k).
double second_order(std::size_t k, const AsymptoticConstants& constants, double t,
                    LatticeMode mode);

struct SubadditivityResult {
  bool holds = true;
  double slack = 0.0;  // right side minus left side
};

/// V_k(x + h) - V_k(x) <= (V(h) + 1) V(x + h)^(k-1) on grid points x, h.
SubadditivityResult check_subadditivity(const RenewalTable& table, std::size_t k, double x,
                                        double h);

struct SubadditivitySweep {
  std::size_t pairs = 0;
  std::size_t violations = 0;
  double min_slack = 0.0;
};

/// Checks every grid pair (x, h) with x + h <= max_index * d.
SubadditivitySweep subadditivity_sweep(const RenewalTable& table, std::size_t k,
                                       std::size_t max_index);

/// Columns n,t,V1,...,VK with 17 significant digits.
void write_table_csv(const RenewalTable& table, std::ostream& out);

nlohmann::ordered_json to_json(const AsymptoticConstants& constants);

}  // namespace iterlog
