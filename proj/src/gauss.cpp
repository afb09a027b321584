#include "iterlog/gauss.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>

#include "iterlog/error.hpp"
#include "iterlog/numeric.hpp"
#include "iterlog/parallel.hpp"
#include "iterlog/stats.hpp"

namespace iterlog {

namespace {

constexpr std::size_t kQuadraturePoints = 10;

// Nearest integer to ratio when it is one up to rounding, else nullopt.
std::optional<std::size_t> whole_ratio(double numerator, double denominator) {
  const double ratio = numerator / denominator;
  const double nearest = std::round(ratio);
  if (nearest < 0.0 || std::abs(ratio - nearest) > 1e-9 * std::max(1.0, ratio)) {
    return std::nullopt;
  }
  return static_cast<std::size_t>(nearest);
}

}  // namespace

BmPath sample_bm(double horizon, double step, RngStream& rng) {
  if (!(step > 0.0)) throw Error("step h must be positive");
  if (!(horizon >= step)) throw Error("horizon T must be at least h");
  const auto cells = whole_ratio(horizon, step);
  if (!cells) throw Error("horizon T must be a multiple of h");
  BmPath path{step, horizon, std::vector<double>(*cells + 1, 0.0)};
  const double scale = std::sqrt(step);
  for (std::size_t j = 1; j <= *cells; ++j) {
    path.values[j] = path.values[j - 1] + scale * rng.normal();
  }
  return path;
}

std::size_t grid_index(const BmPath& path, double t) {
  if (t < 0.0) throw Error("time must be nonnegative");
  const auto index = whole_ratio(t, path.step);
  if (!index) throw Error("time is not on the path grid");
  if (*index > path.cells()) throw Error("time exceeds the path horizon");
  return *index;
}

double b1k(const BmPath& path, std::size_t k, double t) {
  if (k == 0) throw Error("k must be at least 1");
  const std::size_t cells = grid_index(path, t);
  if (k == 1) return path.values[cells];
  NeumaierSum sum;
  for (std::size_t j = 0; j < cells; ++j) {
    const double weight = power(static_cast<double>(cells - j) * path.step, k - 1);
    sum.add(weight * (path.values[j + 1] - path.values[j]));
  }
  return sum.value();
}

FkTable FkTable::exact(const Law& law, std::size_t k, double horizon) {
  if (k == 0) throw Error("k must be at least 1");
  if (k > kQuadraturePoints) throw Error("f_k supported for k <= 10");
  if (!(horizon >= 0.0)) throw Error("horizon must be nonnegative");
  const double mu = moments(law).mean;
  if (is_exponential(law) || k == 1) return FkTable(k, mu, horizon, std::nullopt);
  const auto* lattice = std::get_if<LatticeLaw>(&law);
  if (lattice == nullptr) throw Error("f_k is exact only for lattice or exponential laws");
  const auto n = static_cast<std::size_t>(std::floor(horizon / lattice->span() + 1e-9));
  return FkTable(k, mu, horizon, exact_table(*lattice, n + 1, k - 1));
}

double FkTable::operator()(double x) const {
  if (!table_ || x < 0.0) return 0.0;
  const double polynomial = power(x / mu_, k_ - 1) / factorial(k_ - 1);
  return table_->at(k_ - 1, x) - polynomial;
}

std::vector<double> FkTable::on_grid(double h, std::size_t count) const {
  std::vector<double> out(count + 1, 0.0);
  if (!table_) return out;
  const auto per_cell = whole_ratio(table_->span(), h);
  if (!per_cell || *per_cell == 0) throw Error("grid mismatch: h must divide the lattice span");
  if (count / *per_cell > table_->horizon()) throw Error("f_k table does not cover the grid");
  for (std::size_t m = 0; m <= count; ++m) {
    const double x = static_cast<double>(m) * h;
    out[m] = table_->value(k_ - 1, m / *per_cell) - power(x / mu_, k_ - 1) / factorial(k_ - 1);
  }
  return out;
}

double FkTable::squared_integral(double n) const {
  if (!(n >= 0.0)) throw Error("upper limit must be nonnegative");
  if (!table_) return 0.0;
  const double d = table_->span();
  if (n > horizon_ + 1e-9 * std::max(1.0, horizon_)) throw Error("f_k table does not cover [0, n]");
  using Rule = boost::math::quadrature::gauss<double, kQuadraturePoints>;
  // On [m d, (m + 1) d) the integrand is a polynomial of degree 2k - 2.
  NeumaierSum total;
  for (std::size_t m = 0; static_cast<double>(m) * d < n; ++m) {
    const double lo = static_cast<double>(m) * d;
    const double hi = std::min(lo + d, n);
    const double step_value = table_->value(k_ - 1, m);
    total.add(Rule::integrate(
        [&](double x) {
          const double f = step_value - power(x / mu_, k_ - 1) / factorial(k_ - 1);
          return f * f;
        },
        lo, hi));
  }
  return total.value();
}

double stochastic_sum(const BmPath& path, const std::vector<double>& weights, double t) {
  const std::size_t cells = grid_index(path, t);
  if (weights.size() <= cells) throw Error("integrand does not cover [0, t]");
  NeumaierSum sum;
  for (std::size_t j = 0; j < cells; ++j) {
    sum.add(weights[cells - j] * (path.values[j + 1] - path.values[j]));
  }
  return sum.value();
}

double b2k(const BmPath& path, const FkTable& fk, double t) {
  const std::size_t cells = grid_index(path, t);
  if (fk.vanishes()) return 0.0;
  if (t > fk.horizon() + 1e-9 * std::max(1.0, t)) throw Error("f_k table does not cover [0, t]");
  return stochastic_sum(path, fk.on_grid(path.step, cells), t);
}

std::vector<GaussSample> gauss_ensemble(const Law& law, std::size_t k, double t, double h,
                                        std::uint64_t seed, std::size_t replicas) {
  if (k == 0) throw Error("k must be at least 1");
  const FkTable fk = FkTable::exact(law, k, t);
  const auto cells = whole_ratio(t, h);
  if (!cells || *cells == 0) throw Error("t must be a positive multiple of h");
  std::vector<double> b1_weights(*cells + 1);
  for (std::size_t m = 0; m <= *cells; ++m) {
    b1_weights[m] = power(static_cast<double>(m) * h, k - 1);
  }
  const std::vector<double> b2_weights = fk.on_grid(h, *cells);
  std::vector<GaussSample> out(replicas);
  parallel_for(replicas, [&](std::size_t r) {
    RngStream rng(seed, r);
    const BmPath path = sample_bm(t, h, rng);
    GaussSample& sample = out[r];
    sample.replica = r;
    sample.t = t;
    sample.b1k = k == 1 ? path.values.back() : stochastic_sum(path, b1_weights, t);
    sample.b2k = fk.vanishes() ? 0.0 : stochastic_sum(path, b2_weights, t);
  });
  return out;
}

double variance_b2k(const FkTable& fk, double n) { return fk.squared_integral(n); }

}  // namespace iterlog
