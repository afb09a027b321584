#pragma once

#include <stdexcept>
#include <string>

namespace iterlog {

/// Raised for violated preconditions and invalid inputs across the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace iterlog
