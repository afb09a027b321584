#include "iterlog/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>

#include "iterlog/error.hpp"

namespace iterlog {

double compensated_sum(std::span<const double> xs) noexcept {
  NeumaierSum sum;
  for (double x : xs) sum.add(x);
  return sum.value();
}

double sample_mean(std::span<const double> xs) {
  if (xs.empty()) throw Error("mean of an empty sample");
  return compensated_sum(xs) / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) throw Error("variance needs at least two observations");
  const double mean = sample_mean(xs);
  NeumaierSum squares;
  for (double x : xs) squares.add((x - mean) * (x - mean));
  return squares.value() / static_cast<double>(xs.size() - 1);
}

double standard_error(std::span<const double> xs) {
  return std::sqrt(sample_variance(xs) / static_cast<double>(xs.size()));
}

double quantile(std::vector<double> xs, double q) {
  if (xs.empty()) throw Error("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw Error("quantile level must lie in [0, 1]");
  std::sort(xs.begin(), xs.end());
  const double position = q * static_cast<double>(xs.size() - 1);
  const auto lower = static_cast<std::size_t>(std::floor(position));
  const std::size_t upper = std::min(lower + 1, xs.size() - 1);
  const double weight = position - static_cast<double>(lower);
  return xs[lower] + weight * (xs[upper] - xs[lower]);
}

double median(std::vector<double> xs) { return quantile(std::move(xs), 0.5); }

ChiSquareResult chi_square_two_sample(std::span<const std::int64_t> a,
                                      std::span<const std::int64_t> b, std::size_t min_count) {
  if (a.empty() || b.empty()) throw Error("chi-square test needs two nonempty samples");
  std::map<std::int64_t, std::pair<double, double>> counts;
  for (auto x : a) counts[x].first += 1.0;
  for (auto x : b) counts[x].second += 1.0;

  // Pool adjacent values from the left, then fold an undersized tail into the
  // last full bin.
  std::vector<std::pair<double, double>> bins;
  std::pair<double, double> open{0.0, 0.0};
  for (const auto& [value, c] : counts) {
    open.first += c.first;
    open.second += c.second;
    if (open.first + open.second >= static_cast<double>(min_count)) {
      bins.push_back(open);
      open = {0.0, 0.0};
    }
  }
  if (open.first + open.second > 0.0) {
    if (bins.empty()) {
      bins.push_back(open);
    } else {
      bins.back().first += open.first;
      bins.back().second += open.second;
    }
  }

  ChiSquareResult result;
  result.bins = bins.size();
  if (bins.size() < 2) return result;
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double n = na + nb;
  NeumaierSum statistic;
  for (const auto& [ca, cb] : bins) {
    const double total = ca + cb;
    const double ea = total * na / n;
    const double eb = total * nb / n;
    statistic.add((ca - ea) * (ca - ea) / ea);
    statistic.add((cb - eb) * (cb - eb) / eb);
  }
  result.statistic = statistic.value();
  result.degrees_of_freedom = static_cast<double>(bins.size() - 1);
  const boost::math::chi_squared_distribution<double> reference(result.degrees_of_freedom);
  result.p_value = boost::math::cdf(boost::math::complement(reference, result.statistic));
  return result;
}

}  // namespace iterlog
