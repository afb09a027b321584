#include "iterlog/rrt.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "iterlog/error.hpp"
#include "iterlog/numeric.hpp"
#include "iterlog/parallel.hpp"

namespace iterlog {

namespace {

class ProfileBuilder {
 public:
  ProfileBuilder(std::size_t n, std::size_t max_level, bool keep_history) : depth_(n + 1, 0) {
    trace_.n = n;
    trace_.max_level = max_level;
    trace_.profile.assign(max_level, 0);
    if (keep_history) trace_.history.reserve(n);
    keep_history_ = keep_history;
  }

  void attach(std::size_t child, std::size_t parent) {
    const std::uint32_t level = depth_[parent] + 1;
    depth_[child] = level;
    if (level <= trace_.max_level) {
      ++trace_.profile[level - 1];
    } else {
      ++trace_.beyond;
    }
    if (keep_history_) trace_.history.push_back(trace_.profile);
  }

  ProfileTrace& trace() { return trace_; }

 private:
  ProfileTrace trace_;
  std::vector<std::uint32_t> depth_;
  bool keep_history_ = false;
};

void check_size(std::size_t n) {
  if (n == 0) throw Error("tree size n must be at least 1");
}

}  // namespace

ProfileTrace grow_discrete(std::size_t n, std::size_t max_level, RngStream& rng,
                           bool keep_history) {
  check_size(n);
  ProfileBuilder builder(n, max_level, keep_history);
  for (std::size_t j = 1; j <= n; ++j) {
    builder.attach(j, static_cast<std::size_t>(rng.below(j)));
  }
  return std::move(builder.trace());
}

ProfileTrace grow_yule(std::size_t n, std::size_t max_level, RngStream& rng, bool keep_history) {
  check_size(n);
  ProfileBuilder builder(n, max_level, keep_history);
  auto& epochs = builder.trace().epochs;
  epochs.reserve(n);
  double clock = 0.0;
  for (std::size_t j = 1; j <= n; ++j) {
    clock += rng.exponential(static_cast<double>(j));
    epochs.push_back(clock);
    builder.attach(j, static_cast<std::size_t>(rng.below(j)));
  }
  return std::move(builder.trace());
}

std::uint64_t bernoulli_level1(std::size_t n, RngStream& rng) {
  check_size(n);
  std::uint64_t total = 1;  // B_1 = 1
  for (std::size_t j = 2; j <= n; ++j) {
    total += rng.bernoulli(1.0 / static_cast<double>(j)) ? 1 : 0;
  }
  return total;
}

double rrt_lil_statistic(double xnk, std::size_t n, std::size_t k) {
  if (k == 0) throw Error("level k must be at least 1");
  if (!(static_cast<double>(n) > std::exp(std::numbers::e))) throw Error("statistic undefined");
  const double log_n = std::log(static_cast<double>(n));
  const double center = power(log_n, k) / factorial(k);
  const double scale = std::sqrt(2.0 * power(log_n, 2 * k - 1) * std::log(std::log(log_n)));
  return factorial(k - 1) * std::sqrt(2.0 * static_cast<double>(k) - 1.0) * (xnk - center) /
         scale;
}

double yule_limit_estimate(const ProfileTrace& trace) {
  if (trace.epochs.size() != trace.n || trace.n == 0) {
    throw Error("Yule limit needs the birth epochs of a continuous-time trace");
  }
  return std::exp(-trace.epochs.back()) * static_cast<double>(trace.n + 1);
}

ProfileLaw enumerate_profiles(std::size_t n, std::size_t max_level) {
  check_size(n);
  if (n > 9) throw Error("enumeration limited to n <= 9");
  std::map<Profile, std::uint64_t> tally;
  std::vector<std::uint32_t> depth(n + 1, 0);
  Profile profile(max_level, 0);
  // Depth-first over the parent choices of vertices 1..n.
  auto visit = [&](auto&& self, std::size_t j) -> void {
    if (j > n) {
      ++tally[profile];
      return;
    }
    for (std::size_t parent = 0; parent < j; ++parent) {
      depth[j] = depth[parent] + 1;
      const bool counted = depth[j] <= max_level;
      if (counted) ++profile[depth[j] - 1];
      self(self, j + 1);
      if (counted) --profile[depth[j] - 1];
    }
  };
  visit(visit, 1);
  const double total = factorial(n);
  ProfileLaw law;
  for (const auto& [key, count] : tally) law[key] = static_cast<double>(count) / total;
  return law;
}

ProfileLaw empirical_profile_law(const std::vector<ProfileTrace>& traces) {
  if (traces.empty()) throw Error("no traces");
  std::map<Profile, std::uint64_t> tally;
  for (const auto& trace : traces) ++tally[trace.profile];
  ProfileLaw law;
  for (const auto& [key, count] : tally) {
    law[key] = static_cast<double>(count) / static_cast<double>(traces.size());
  }
  return law;
}

nlohmann::ordered_json to_json(const ProfileLaw& law) {
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  for (const auto& [key, probability] : law) {
    std::string name;
    for (std::size_t i = 0; i < key.size(); ++i) {
      if (i > 0) name += ',';
      name += std::to_string(key[i]);
    }
    out[name] = probability;
  }
  return out;
}

std::vector<ProfileTrace> grow_ensemble(Grower grower, std::size_t n, std::size_t max_level,
                                        std::uint64_t seed, std::size_t replicas) {
  std::vector<ProfileTrace> traces(replicas);
  parallel_for(replicas, [&](std::size_t r) {
    RngStream rng(seed, r);
    traces[r] = grower == Grower::yule ? grow_yule(n, max_level, rng)
                                       : grow_discrete(n, max_level, rng);
  });
  return traces;
}

}  // namespace iterlog
