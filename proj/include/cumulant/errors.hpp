#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cumulant {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Position or action does not match the game's n x d shape.
class DimensionError : public Error {
 public:
  using Error::Error;
};

class IllegalActionError : public Error {
 public:
  using Error::Error;
};

// A move, node, or depth budget ran out before the computation finished.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

// The input violates a documented precondition of the operation (e.g. a
// cumulation-dependent ruleset handed to the heap-size dynamic program).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class CycleError : public Error {
 public:
  using Error::Error;
};

// Schema violations in game/EFG documents. Carries every offending field path.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> fields)
      : Error(join(fields)), fields_(std::move(fields)) {}
  ValidationError(const std::string& field, const std::string& reason)
      : ValidationError(std::vector<std::string>{field + ": " + reason}) {}

  const std::vector<std::string>& fields() const noexcept { return fields_; }

 private:
  static std::string join(const std::vector<std::string>& fields) {
    std::string out = "invalid document";
    for (const auto& f : fields) out += "\n  " + f;
    return out;
  }
  std::vector<std::string> fields_;
};

}  // namespace cumulant
