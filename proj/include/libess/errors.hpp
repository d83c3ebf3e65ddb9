#pragma once

#include <stdexcept>
#include <string>

namespace ess {

// Error categories map one-to-one onto CLI exit codes.
enum class ErrorCategory {
  Config = 2,   // bad input files, bad flags, inconsistent parameters
  Solve = 3,    // solver failure, infeasible or unbounded model
  Audit = 4,    // replay simulation failed outright
  Io = 5,       // filesystem trouble
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory cat, const std::string& what)
      : std::runtime_error(what), cat_(cat) {}

  ErrorCategory category() const { return cat_; }
  int exit_code() const { return static_cast<int>(cat_); }

 private:
  ErrorCategory cat_;
};

inline Error config_error(const std::string& what) {
  return Error(ErrorCategory::Config, what);
}
inline Error solve_error(const std::string& what) {
  return Error(ErrorCategory::Solve, what);
}
inline Error audit_error(const std::string& what) {
  return Error(ErrorCategory::Audit, what);
}
inline Error io_error(const std::string& what) {
  return Error(ErrorCategory::Io, what);
}

}  // namespace ess
