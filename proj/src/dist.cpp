#include "iterlog/dist.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

#include "iterlog/stats.hpp"

namespace iterlog {

namespace {

constexpr double kMassTolerance = 1e-12;

std::string format_number(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

}  // namespace

LatticeLaw::LatticeLaw(double span, std::vector<double> pmf) : span_(span), pmf_(std::move(pmf)) {
  if (!(span_ > 0.0) || !std::isfinite(span_)) throw Error("lattice span must be positive");
  while (!pmf_.empty() && pmf_.back() == 0.0) pmf_.pop_back();
  if (pmf_.empty()) throw Error("empty law");
  NeumaierSum total;
  std::vector<std::size_t> support;
  for (std::size_t m = 0; m < pmf_.size(); ++m) {
    if (!(pmf_[m] >= 0.0) || !std::isfinite(pmf_[m])) {
      throw Error("lattice probabilities must be finite and nonnegative");
    }
    total.add(pmf_[m]);
    if (pmf_[m] > 0.0) support.push_back(m + 1);
  }
  if (std::abs(total.value() - 1.0) > kMassTolerance) {
    throw Error("lattice probabilities must sum to 1 (got " + format_number(total.value()) + ")");
  }
  if (!lattice_span_check(support)) {
    throw Error("lattice law is not span-maximal: gcd of the support exceeds 1");
  }
}

LatticeLaw LatticeLaw::point_mass(double span) { return LatticeLaw(span, {1.0}); }

LatticeLaw LatticeLaw::geometric(double p, double span, double tail) {
  if (!(p > 0.0 && p <= 1.0)) throw Error("geometric parameter must lie in (0, 1]");
  if (!(tail > 0.0)) throw Error("geometric truncation tail must be positive");
  std::vector<double> pmf;
  double remaining = 1.0;
  double term = p;
  while (remaining >= tail) {
    pmf.push_back(term);
    remaining *= 1.0 - p;
    term *= 1.0 - p;
  }
  NeumaierSum total;
  for (double value : pmf) total.add(value);
  const double norm = total.value();
  for (double& value : pmf) value /= norm;
  return LatticeLaw(span, std::move(pmf));
}

SmoothLaw SmoothLaw::exponential(double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw Error("exponential rate must be positive");
  return SmoothLaw(SmoothFamily::exponential, 0.0, rate);
}

SmoothLaw SmoothLaw::gamma(double shape, double rate) {
  if (!(shape > 0.0) || !std::isfinite(shape)) throw Error("gamma shape must be positive");
  if (!(rate > 0.0) || !std::isfinite(rate)) throw Error("gamma rate must be positive");
  return SmoothLaw(SmoothFamily::gamma, shape, rate);
}

SmoothLaw SmoothLaw::uniform(double lo, double hi) {
  if (!(lo >= 0.0) || !(hi > lo) || !std::isfinite(hi)) {
    throw Error("uniform law needs 0 <= lo < hi");
  }
  return SmoothLaw(SmoothFamily::uniform, lo, hi);
}

Moments moments(const LatticeLaw& law) {
  NeumaierSum first;
  NeumaierSum second;
  const double d = law.span();
  for (std::size_t m = 1; m <= law.max_index(); ++m) {
    const double x = d * static_cast<double>(m);
    first.add(law.mass(m) * x);
    second.add(law.mass(m) * x * x);
  }
  // Variance as a centered sum so that it is exactly zero for point masses.
  const double mean = first.value();
  NeumaierSum centered;
  for (std::size_t m = 1; m <= law.max_index(); ++m) {
    const double dev = d * static_cast<double>(m) - mean;
    centered.add(law.mass(m) * dev * dev);
  }
  return {mean, second.value(), centered.value()};
}

Moments moments(const SmoothLaw& law) {
  switch (law.family()) {
    case SmoothFamily::exponential: {
      const double rate = law.second();
      return {1.0 / rate, 2.0 / (rate * rate), 1.0 / (rate * rate)};
    }
    case SmoothFamily::gamma: {
      const double shape = law.first();
      const double rate = law.second();
      const double mean = shape / rate;
      const double variance = shape / (rate * rate);
      return {mean, variance + mean * mean, variance};
    }
    case SmoothFamily::uniform: {
      const double lo = law.first();
      const double hi = law.second();
      const double mean = 0.5 * (lo + hi);
      const double variance = (hi - lo) * (hi - lo) / 12.0;
      return {mean, variance + mean * mean, variance};
    }
  }
  throw Error("unknown smooth family");
}

Moments moments(const Law& law) {
  return std::visit([](const auto& l) { return moments(l); }, law);
}

bool is_lattice(const Law& law) noexcept { return std::holds_alternative<LatticeLaw>(law); }

bool is_exponential(const Law& law) noexcept {
  const auto* smooth = std::get_if<SmoothLaw>(&law);
  return smooth != nullptr && smooth->family() == SmoothFamily::exponential;
}

bool lattice_span_check(std::span<const std::size_t> support) {
  if (support.empty()) throw Error("empty law");
  std::size_t g = 0;
  for (std::size_t m : support) {
    if (m == 0) throw Error("lattice support indices start at 1");
    g = std::gcd(g, m);
  }
  return g == 1;
}

GammaSampler::GammaSampler(double shape, double rate)
    : boost_(shape < 1.0 ? 1.0 : 0.0),
      d_((shape < 1.0 ? shape + 1.0 : shape) - 1.0 / 3.0),
      c_(1.0 / std::sqrt(9.0 * d_)),
      inv_shape_(1.0 / shape),
      inv_rate_(1.0 / rate) {}

double GammaSampler::operator()(RngStream& rng) const noexcept {
  // Marsaglia-Tsang squeeze/rejection.
  double draw = 0.0;
  for (;;) {
    double x = 0.0;
    double v = 0.0;
    do {
      x = rng.normal();
      v = 1.0 + c_ * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x ||
        std::log(u) < 0.5 * x * x + d_ * (1.0 - v + std::log(v))) {
      draw = d_ * v;
      break;
    }
  }
  if (boost_ > 0.0) draw *= std::pow(rng.uniform(), inv_shape_);
  return draw * inv_rate_;
}

LatticeSampler::LatticeSampler(const LatticeLaw& law)
    : span_(law.span()), cutoff_(law.max_index()), alias_(law.max_index()) {
  const std::size_t size = law.max_index();
  std::vector<double> scaled(size);
  std::vector<std::size_t> small;
  std::vector<std::size_t> large;
  for (std::size_t i = 0; i < size; ++i) {
    scaled[i] = law.pmf()[i] * static_cast<double>(size);
    (scaled[i] < 1.0 ? small : large).push_back(i);
  }
  while (!small.empty() && !large.empty()) {
    const std::size_t s = small.back();
    small.pop_back();
    const std::size_t l = large.back();
    cutoff_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  for (std::size_t i : large) {
    cutoff_[i] = 1.0;
    alias_[i] = i;
  }
  // Leftovers in `small` only arise from rounding; their mass is ~1.
  for (std::size_t i : small) {
    cutoff_[i] = 1.0;
    alias_[i] = i;
  }
}

Sampler make_sampler(const Law& law) {
  if (const auto* lattice = std::get_if<LatticeLaw>(&law)) return LatticeSampler(*lattice);
  const auto& smooth = std::get<SmoothLaw>(law);
  switch (smooth.family()) {
    case SmoothFamily::exponential:
      return ExponentialSampler(smooth.second());
    case SmoothFamily::gamma:
      return GammaSampler(smooth.first(), smooth.second());
    case SmoothFamily::uniform:
      return UniformSampler(smooth.first(), smooth.second());
  }
  throw Error("unknown smooth family");
}

std::vector<double> sample(const Law& law, RngStream& rng, std::size_t n) {
  std::vector<double> out(n);
  std::visit(
      [&](const auto& sampler) {
        for (double& x : out) x = sampler(rng);
      },
      make_sampler(law));
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  for (;;) {
    const auto pos = s.find(sep);
    parts.push_back(trim(s.substr(0, pos)));
    if (pos == std::string_view::npos) break;
    s.remove_prefix(pos + 1);
  }
  return parts;
}

double parse_number(std::string_view text, std::string_view context) {
  text = trim(text);
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    throw Error("invalid number '" + std::string(text) + "' in law spec '" + std::string(context) +
                "'");
  }
  return value;
}

std::map<std::string, double, std::less<>> parse_params(std::string_view text,
                                                        std::string_view context) {
  std::map<std::string, double, std::less<>> params;
  if (trim(text).empty()) return params;
  for (auto item : split(text, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw Error("expected key=value in law spec '" + std::string(context) + "'");
    }
    params[std::string(trim(item.substr(0, eq)))] = parse_number(item.substr(eq + 1), context);
  }
  return params;
}

double take(std::map<std::string, double, std::less<>>& params, std::string_view key,
            std::string_view context) {
  const auto it = params.find(key);
  if (it == params.end()) {
    throw Error("missing parameter '" + std::string(key) + "' in law spec '" +
                std::string(context) + "'");
  }
  const double value = it->second;
  params.erase(it);
  return value;
}

void reject_extra(const std::map<std::string, double, std::less<>>& params,
                  std::string_view context) {
  if (!params.empty()) {
    throw Error("unknown parameter '" + params.begin()->first + "' in law spec '" +
                std::string(context) + "'");
  }
}

}  // namespace

Law parse_law(std::string_view text) {
  const std::string_view spec = trim(text);
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) {
    throw Error("law spec '" + std::string(spec) + "' lacks a family prefix");
  }
  const std::string_view family = trim(spec.substr(0, colon));
  const std::string_view body = spec.substr(colon + 1);

  if (family == "lattice") {
    // lattice:d=1;p=0.5,0.3,0.2
    double span = 1.0;
    std::vector<double> pmf;
    bool have_p = false;
    for (auto section : split(body, ';')) {
      if (section.empty()) continue;
      const auto eq = section.find('=');
      if (eq == std::string_view::npos) {
        throw Error("expected key=value in law spec '" + std::string(spec) + "'");
      }
      const auto key = trim(section.substr(0, eq));
      const auto value = section.substr(eq + 1);
      if (key == "d") {
        span = parse_number(value, spec);
      } else if (key == "p") {
        for (auto p : split(value, ',')) pmf.push_back(parse_number(p, spec));
        have_p = true;
      } else {
        throw Error("unknown parameter '" + std::string(key) + "' in law spec '" +
                    std::string(spec) + "'");
      }
    }
    if (!have_p) throw Error("missing parameter 'p' in law spec '" + std::string(spec) + "'");
    return LatticeLaw(span, std::move(pmf));
  }

  auto params = parse_params(body, spec);
  if (family == "exp") {
    const double rate = take(params, "rate", spec);
    reject_extra(params, spec);
    return SmoothLaw::exponential(rate);
  }
  if (family == "gamma") {
    const double shape = take(params, "shape", spec);
    const double rate = take(params, "rate", spec);
    reject_extra(params, spec);
    return SmoothLaw::gamma(shape, rate);
  }
  if (family == "unif") {
    const double lo = take(params, "lo", spec);
    const double hi = take(params, "hi", spec);
    reject_extra(params, spec);
    return SmoothLaw::uniform(lo, hi);
  }
  if (family == "geom") {
    const double p = take(params, "p", spec);
    double span = 1.0;
    if (params.contains("d")) span = take(params, "d", spec);
    reject_extra(params, spec);
    return LatticeLaw::geometric(p, span);
  }
  throw Error("unknown law family '" + std::string(family) + "'");
}

std::string format_law(const Law& law) {
  if (const auto* lattice = std::get_if<LatticeLaw>(&law)) {
    std::string out = "lattice:d=" + format_number(lattice->span()) + ";p=";
    for (std::size_t m = 1; m <= lattice->max_index(); ++m) {
      if (m > 1) out += ',';
      out += format_number(lattice->mass(m));
    }
    return out;
  }
  const auto& smooth = std::get<SmoothLaw>(law);
  switch (smooth.family()) {
    case SmoothFamily::exponential:
      return "exp:rate=" + format_number(smooth.second());
    case SmoothFamily::gamma:
      return "gamma:shape=" + format_number(smooth.first()) +
             ",rate=" + format_number(smooth.second());
    case SmoothFamily::uniform:
      return "unif:lo=" + format_number(smooth.first()) + ",hi=" + format_number(smooth.second());
  }
  throw Error("unknown smooth family");
}

}  // namespace iterlog
