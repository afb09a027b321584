#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "iterlog/error.hpp"
#include "iterlog/rng.hpp"

namespace iterlog {

struct Moments {
  double mean = 0.0;
  double second_moment = 0.0;
  double variance = 0.0;
};

/// Law supported on the lattice {d, 2d, ..., Md} with maximal span d.
/// pmf()[m - 1] is P{xi = m d}.
class LatticeLaw {
 public:
  LatticeLaw(double span, std::vector<double> pmf);

  static LatticeLaw point_mass(double span = 1.0);
  /// Geometric law P{xi = m d} = p (1 - p)^(m - 1), truncated once the
  /// remaining tail mass drops below `tail` and renormalized.
  static LatticeLaw geometric(double p, double span = 1.0, double tail = 1e-15);

  double span() const noexcept { return span_; }
  std::span<const double> pmf() const noexcept { return pmf_; }
  std::size_t max_index() const noexcept { return pmf_.size(); }
  /// P{xi = m d}, zero outside the support.
  double mass(std::size_t m) const noexcept {
    return (m >= 1 && m <= pmf_.size()) ? pmf_[m - 1] : 0.0;
  }

 private:
  double span_;
  std::vector<double> pmf_;
};

enum class SmoothFamily { exponential, gamma, uniform };

/// Continuous law on (0, inf) from one of the parametric families.
class SmoothLaw {
 public:
  static SmoothLaw exponential(double rate);
  static SmoothLaw gamma(double shape, double rate);
  /// Uniform on [lo, hi] with 0 <= lo < hi.
  static SmoothLaw uniform(double lo, double hi);

  SmoothFamily family() const noexcept { return family_; }
  double first() const noexcept { return first_; }
  double second() const noexcept { return second_; }

  double rate() const noexcept { return family_ == SmoothFamily::uniform ? 0.0 : second_; }

 private:
  SmoothLaw(SmoothFamily family, double first, double second)
      : family_(family), first_(first), second_(second) {}

  SmoothFamily family_;
  // exponential: (unused, rate); gamma: (shape, rate); uniform: (lo, hi)
  double first_;
  double second_;
};

using Law = std::variant<LatticeLaw, SmoothLaw>;

Moments moments(const LatticeLaw& law);
Moments moments(const SmoothLaw& law);
Moments moments(const Law& law);

bool is_lattice(const Law& law) noexcept;
bool is_exponential(const Law& law) noexcept;

/// True iff gcd(support) == 1. Throws on an empty support.
bool lattice_span_check(std::span<const std::size_t> support);

class ExponentialSampler {
 public:
  explicit ExponentialSampler(double rate) : rate_(rate) {}
  double operator()(RngStream& rng) const noexcept { return rng.exponential(rate_); }
  double rate() const noexcept { return rate_; }

 private:
  double rate_;
};

class GammaSampler {
 public:
  GammaSampler(double shape, double rate);
  double operator()(RngStream& rng) const noexcept;

 private:
  double boost_;  // shape < 1 uses the shape + 1 draw times U^(1/shape)
  double d_;
  double c_;
  double inv_shape_;
  double inv_rate_;
};

class UniformSampler {
 public:
  UniformSampler(double lo, double hi) : lo_(lo), width_(hi - lo) {}
  double operator()(RngStream& rng) const noexcept { return lo_ + width_ * rng.uniform(); }

 private:
  double lo_;
  double width_;
};

/// Walker/Vose alias table over the lattice indices 1..M.
class LatticeSampler {
 public:
  explicit LatticeSampler(const LatticeLaw& law);
  std::size_t index(RngStream& rng) const noexcept {
    // Integer part of bits * M / 2^64 picks the slot, the fractional part is
    // the acceptance coin.
    const uint128_t scaled =
        static_cast<uint128_t>(rng.next_u64()) * cutoff_.size();
    const auto slot = static_cast<std::size_t>(scaled >> 64);
    const double coin = static_cast<double>(static_cast<std::uint64_t>(scaled)) * 0x1.0p-64;
    return coin < cutoff_[slot] ? slot + 1 : alias_[slot] + 1;
  }
  double operator()(RngStream& rng) const noexcept {
    return span_ * static_cast<double>(index(rng));
  }

 private:
  double span_;
  std::vector<double> cutoff_;
  std::vector<std::size_t> alias_;
};

using Sampler = std::variant<ExponentialSampler, GammaSampler, UniformSampler, LatticeSampler>;

Sampler make_sampler(const Law& law);

/// n i.i.d. draws of `law` from `rng`.
std::vector<double> sample(const Law& law, RngStream& rng, std::size_t n);

/// Parses `exp:rate=1`, `gamma:shape=2,rate=1`, `unif:lo=0.5,hi=1.5`,
/// `lattice:d=1;p=0.5,0.3,0.2` and the shorthand `geom:p=0.5[,d=1]`.
Law parse_law(std::string_view text);

/// Canonical text form accepted by parse_law.
std::string format_law(const Law& law);

}  // namespace iterlog
