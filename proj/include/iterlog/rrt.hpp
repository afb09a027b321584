#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

#include "json.hpp"
#include "iterlog/rng.hpp"

namespace iterlog {

/// Profile of a random recursive tree with root 0 and non-root vertices
/// 1..n; vertex j is born at epoch tau_j, so the tree at tau_n has n + 1
/// vertices. profile[k - 1] = X_n(k) for k = 1..K; deeper vertices are
/// counted in `beyond`.
struct ProfileTrace {
  std::size_t n = 0;
  std::size_t max_level = 0;
  std::vector<std::uint64_t> profile;
  std::uint64_t beyond = 0;
  /// tau_1..tau_n (continuous-time growth only).
  std::vector<double> epochs;
  /// history[m - 1] = (X_m(1), ..., X_m(K)) when requested.
  std::vector<std::vector<std::uint64_t>> history;

  std::uint64_t level(std::size_t k) const { return profile.at(k - 1); }
};

/// Uniform attachment: vertex j picks its parent uniformly from 0..j-1.
ProfileTrace grow_discrete(std::size_t n, std::size_t max_level, RngStream& rng,
                           bool keep_history = false);

/// Yule embedding: with j vertices present the next birth comes after an
/// Exp(j) gap and its parent is uniform among them.
ProfileTrace grow_yule(std::size_t n, std::size_t max_level, RngStream& rng,
                       bool keep_history = false);

/// B_1 + ... + B_n with independent B_j ~ Bernoulli(1/j).
std::uint64_t bernoulli_level1(std::size_t n, RngStream& rng);

/// (k-1)! (2k-1)^(1/2) (x - (log n)^k/k!) / (2 (log n)^(2k-1) log log log n)^(1/2).
double rrt_lil_statistic(double xnk, std::size_t n, std::size_t k);

/// e^(-tau_n) (n + 1), the Yule martingale at the last epoch.
double yule_limit_estimate(const ProfileTrace& trace);

using Profile = std::vector<std::uint64_t>;
using ProfileLaw = std::map<Profile, double>;

/// Exact law of (X_n(1), ..., X_n(K)) over all n! attachment sequences; n <= 9.
ProfileLaw enumerate_profiles(std::size_t n, std::size_t max_level);

/// Empirical law of the profiles in `traces`.
ProfileLaw empirical_profile_law(const std::vector<ProfileTrace>& traces);

/// {"2,0": 0.5, "1,1": 0.5}
nlohmann::ordered_json to_json(const ProfileLaw& law);

enum class Grower { discrete, yule };

/// R trees grown in parallel, tree r from RngStream(seed, r).
std::vector<ProfileTrace> grow_ensemble(Grower grower, std::size_t n, std::size_t max_level,
                                        std::uint64_t seed, std::size_t replicas);

}  // namespace iterlog
