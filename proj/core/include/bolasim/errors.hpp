#pragma once

#include <stdexcept>
#include <string>

namespace bolasim {

/// Raised when input data or configuration violates a documented invariant.
/// The message names the offending value (and source row, for file input).
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bolasim
