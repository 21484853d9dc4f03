#pragma once

#include <stdexcept>
#include <string>

namespace burstgt {

/// Raised when an input parameter violates its domain. `field()` names the
/// offending parameter so front ends can report it.
class ParameterError : public std::invalid_argument {
 public:
  ParameterError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Two structures that must agree in size do not.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline void require(bool ok, const char* field, const std::string& message) {
  if (!ok) throw ParameterError(field, message);
}

}  // namespace detail
}  // namespace burstgt
