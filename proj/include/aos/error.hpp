#pragma once

#include <stdexcept>
#include <string>

namespace aos {

/// Invalid parameters or violated preconditions. Maps to CLI exit code 2 and
/// HTTP 422. `constraint()` carries the violated rule in human-readable form
/// (for example the feasible window range) when one applies.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& message, std::string constraint = {})
      : std::invalid_argument(message), constraint_(std::move(constraint)) {}

  const std::string& constraint() const noexcept { return constraint_; }

 private:
  std::string constraint_;
};

/// File system or codec failure. Maps to CLI exit code 3.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operation needs data the input does not carry (e.g. ground truth for an
/// imported stack).
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace aos
