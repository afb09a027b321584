#pragma once

#include <cstddef>
#include <cstdio>
#include <string>

namespace iterlog {

/// k! as a double (exact up to k = 22).
constexpr double factorial(std::size_t k) noexcept {
  double out = 1.0;
  for (std::size_t i = 2; i <= k; ++i) out *= static_cast<double>(i);
  return out;
}

/// x^k by repeated multiplication.
constexpr double power(double x, std::size_t k) noexcept {
  double out = 1.0;
  for (std::size_t i = 0; i < k; ++i) out *= x;
  return out;
}

/// Round-trip decimal rendering used by every CSV writer.
inline std::string format_g17(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

}  // namespace iterlog
