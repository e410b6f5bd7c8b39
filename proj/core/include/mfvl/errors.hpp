#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>

namespace mfvl {

/// Bad input: malformed config, mismatched grids, violated preconditions.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A solver or linear-algebra routine produced an unusable result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A checked inequality (Gronwall-type bound, commutator bound) failed.
class InequalityViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ValidationError(message);
}

/// Non-fatal diagnostics go through a replaceable sink (stderr by default).
using WarningSink = std::function<void(const std::string&)>;
void set_warning_sink(WarningSink sink);
void warn(const std::string& message);
/// Number of warnings emitted since process start.
std::size_t warning_count();

}  // namespace mfvl
