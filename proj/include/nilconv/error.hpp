#pragma once

#include <stdexcept>
#include <string>

namespace nilconv {

/// Base error. Subclasses carry the process exit code the CLI maps them to.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what, int exit_code = 2)
      : std::runtime_error(what), exit_code_(exit_code) {}
  int exit_code() const noexcept { return exit_code_; }

 private:
  int exit_code_;
};

/// Invalid input: bad algebra, dimension mismatch, malformed config.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(what, 2) {}
};

/// A configured cost or memory budget would be exceeded.
class BudgetError : public Error {
 public:
  explicit BudgetError(const std::string& what) : Error(what, 2) {}
};

/// An iterative method failed to reach its tolerance.
class ConvergenceError : public Error {
 public:
  explicit ConvergenceError(const std::string& what) : Error(what, 3) {}
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ValidationError(msg);
}

}  // namespace nilconv
