#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace vodfog {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed text input. `line` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(std::string what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

// Input that parsed but breaks a domain invariant. Carries every problem found.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> problems)
      : Error(join(problems)), problems_(std::move(problems)) {}
  explicit ValidationError(const std::string& problem)
      : ValidationError(std::vector<std::string>{problem}) {}
  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  static std::string join(const std::vector<std::string>& p) {
    std::string out;
    for (const auto& s : p) {
      if (!out.empty()) out += "; ";
      out += s;
    }
    return out;
  }
  std::vector<std::string> problems_;
};

// A load exceeds what a data centre, OLT link or fibre can carry.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// No feasible placement exists (total demand above total capacity, ...).
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// Battery or solar bookkeeping violated at a given hour.
class EnergyError : public Error {
 public:
  EnergyError(const std::string& what, int hour)
      : Error("hour " + std::to_string(hour) + ": " + what), hour_(hour) {}
  int hour() const noexcept { return hour_; }

 private:
  int hour_;
};

// Brute-force enumeration would exceed its state budget.
class BudgetError : public Error {
 public:
  using Error::Error;
};

}  // namespace vodfog
