#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace iterlog {

/// Neumaier's improved Kahan summation.
class NeumaierSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      compensation_ += (sum_ - t) + x;
    } else {
      compensation_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

double compensated_sum(std::span<const double> xs) noexcept;
double sample_mean(std::span<const double> xs);
/// Unbiased (n - 1) sample variance, computed in two compensated passes.
double sample_variance(std::span<const double> xs);
double standard_error(std::span<const double> xs);
/// Linear-interpolation quantile (type 7); q in [0, 1].
double quantile(std::vector<double> xs, double q);
double median(std::vector<double> xs);

struct ChiSquareResult {
  double statistic = 0.0;
  double degrees_of_freedom = 0.0;
  double p_value = 1.0;
  std::size_t bins = 0;
};

/// Two-sample chi-square homogeneity test on integer-valued samples. Adjacent
/// values are pooled until every bin holds at least `min_count` observations
/// in total.
ChiSquareResult chi_square_two_sample(std::span<const std::int64_t> a,
                                      std::span<const std::int64_t> b,
                                      std::size_t min_count = 10);

/// Total-variation distance between two probability mass functions keyed by
/// the same outcome type; missing keys count as zero mass.
template <class Key>
double total_variation(const std::map<Key, double>& p, const std::map<Key, double>& q) {
  double sum = 0.0;
  for (const auto& [key, mass] : p) {
    const auto it = q.find(key);
    sum += std::abs(mass - (it == q.end() ? 0.0 : it->second));
  }
  for (const auto& [key, mass] : q) {
    if (!p.contains(key)) sum += mass;
  }
  return 0.5 * sum;
}

}  // namespace iterlog
