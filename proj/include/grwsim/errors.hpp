#pragma once

#include <stdexcept>
#include <string>

namespace grwsim {

/// Bad parameter or config value; the message names the violated invariant.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A dense expansion or dense-oracle request exceeds the configured term cap.
class CapacityError : public std::runtime_error {
 public:
  explicit CapacityError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Mismatched rosters, unknown subsystems, or out-of-alphabet labels.
class ShapeError : public std::runtime_error {
 public:
  explicit ShapeError(const std::string& msg) : std::runtime_error(msg) {}
};

/// All-zero state where a normalizable one is required.
class DegenerateStateError : public std::runtime_error {
 public:
  explicit DegenerateStateError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Hit whose renormalization factor vanishes.
class DegenerateHitError : public std::runtime_error {
 public:
  explicit DegenerateHitError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Filesystem failure; the message carries the path.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace grwsim
