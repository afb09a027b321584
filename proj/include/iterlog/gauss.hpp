#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "iterlog/dist.hpp"
#include "iterlog/renewal.hpp"
#include "iterlog/rng.hpp"

namespace iterlog {

/// Brownian motion sampled at W(j h), j = 0..T/h.
struct BmPath {
  double step = 0.0;
  double horizon = 0.0;
  std::vector<double> values;

  std::size_t cells() const noexcept { return values.empty() ? 0 : values.size() - 1; }
};

/// Cumulative sums of N(0, h) increments; T must be a multiple of h.
BmPath sample_bm(double horizon, double step, RngStream& rng);

/// Number of whole steps in t, rejecting t off the path grid.
std::size_t grid_index(const BmPath& path, double t);

/// Left-point sum of (t - x_j)^(k-1) over increments below t; k = 1 gives W(t).
double b1k(const BmPath& path, std::size_t k, double t);

/// f_k(x) = V_{k-1}(x) - x^(k-1)/((k-1)! mu^(k-1)), from an exact lattice
/// table or identically zero for exponential laws.
class FkTable {
 public:
  /// Picks the exact representation for `law` on [0, horizon].
  static FkTable exact(const Law& law, std::size_t k, double horizon);

  std::size_t k() const noexcept { return k_; }
  double mu() const noexcept { return mu_; }
  bool vanishes() const noexcept { return !table_.has_value(); }
  /// Lattice span; zero for the closed form.
  double span() const noexcept { return table_ ? table_->span() : 0.0; }
  double horizon() const noexcept { return horizon_; }

  double operator()(double x) const;
  /// f_k(m h) for m = 0..count; h must divide the lattice span.
  std::vector<double> on_grid(double h, std::size_t count) const;
  /// Integral of f_k^2 over [0, n]: exact cellwise Gauss-Legendre on the lattice.
  double squared_integral(double n) const;

 private:
  FkTable(std::size_t k, double mu, double horizon, std::optional<RenewalTable> table)
      : k_(k), mu_(mu), horizon_(horizon), table_(std::move(table)) {}

  std::size_t k_;
  double mu_;
  double horizon_;
  std::optional<RenewalTable> table_;
};

/// Left-point sum of f_k(t - x_j) over increments below t.
double b2k(const BmPath& path, const FkTable& fk, double t);

/// Var B_{2,k}(n) = integral of f_k^2 over [0, n].
double variance_b2k(const FkTable& fk, double n);

/// Sum over cells j below t of g((J - j) h) dW_j, where g(m h) = weights[m]
/// and J = t/h. Itô sum of a deterministic integrand evaluated at t - x_j.
double stochastic_sum(const BmPath& path, const std::vector<double>& weights, double t);

struct GaussSample {
  std::size_t replica = 0;
  double t = 0.0;
  double b1k = 0.0;
  double b2k = 0.0;
};

/// B_{1,k}(t) and B_{2,k}(t) on R independent paths, path r driven by
/// RngStream(seed, r).
std::vector<GaussSample> gauss_ensemble(const Law& law, std::size_t k, double t, double h,
                                        std::uint64_t seed, std::size_t replicas);

}  // namespace iterlog
