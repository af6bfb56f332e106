#pragma once

#include <stdexcept>
#include <string>

namespace nrcsim {

/// Malformed network, trips, or scenario text. Carries the 1-based line number
/// of the offending line (0 when the problem is not tied to a line).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Scenario is structurally invalid (unknown edge in a closure, empty network, ...).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A physical invariant was violated during a simulation step (negative gap,
/// entry into a closed edge, broken route). Raised only in strict mode.
class IntegrityFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nrcsim
