#include "iterlog/parallel.hpp"

#include <charconv>
#include <cstdlib>
#include <string>
#include <string_view>

#include "iterlog/error.hpp"

namespace iterlog {

std::size_t worker_count() {
  if (const char* env = std::getenv("ITERLOG_THREADS"); env != nullptr && *env != '\0') {
    const std::string_view text(env);
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || value == 0) {
      throw Error("ITERLOG_THREADS must be a positive integer, got '" + std::string(text) + "'");
    }
    return value;
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

}  // namespace iterlog
