#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "vodfog/error.hpp"

namespace vodfog::milp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { le, ge, eq };

struct Variable {
  std::string name;
  double lb = 0;
  double ub = kInf;
  bool integer = false;
  double obj = 0;
};

struct Term {
  int var = 0;
  double coef = 0;
};

// sense/rhs as usual; `range` widens the row to an interval using the MPS
// RANGES convention.
struct Constraint {
  std::string name;
  std::vector<Term> terms;
  Sense sense = Sense::le;
  double rhs = 0;
  std::optional<double> range;
};

// Minimization model with named columns and rows.
class LinearModel {
 public:
  explicit LinearModel(std::string name = "MODEL", std::string objective = "COST")
      : name_(std::move(name)), objective_(std::move(objective)) {}

  int add_var(std::string name, double lb, double ub, bool integer, double obj = 0) {
    vars_.push_back({std::move(name), lb, ub, integer, obj});
    return static_cast<int>(vars_.size()) - 1;
  }
  int add_row(std::string name, std::vector<Term> terms, Sense sense, double rhs,
              std::optional<double> range = std::nullopt) {
    rows_.push_back({std::move(name), std::move(terms), sense, rhs, range});
    return static_cast<int>(rows_.size()) - 1;
  }
  void add_obj(int var, double coef) { vars_.at(var).obj += coef; }

  const std::string& name() const noexcept { return name_; }
  const std::string& objective_name() const noexcept { return objective_; }
  const std::vector<Variable>& vars() const noexcept { return vars_; }
  const std::vector<Constraint>& rows() const noexcept { return rows_; }
  std::vector<Variable>& vars() noexcept { return vars_; }
  int var_count() const noexcept { return static_cast<int>(vars_.size()); }
  int row_count() const noexcept { return static_cast<int>(rows_.size()); }
  int integer_count() const {
    int n = 0;
    for (const auto& v : vars_) n += v.integer ? 1 : 0;
    return n;
  }
  std::size_t nonzero_count() const {
    std::size_t n = 0;
    for (const auto& r : rows_)
      for (const auto& t : r.terms) n += t.coef != 0.0 ? 1 : 0;
    return n;
  }

  double objective_value(const std::vector<double>& x) const {
    double s = 0;
    for (std::size_t i = 0; i < vars_.size(); ++i) s += vars_[i].obj * x.at(i);
    return s;
  }

  // Every referenced column exists, names are unique, bounds are consistent.
  void validate() const {
    std::vector<std::string> problems;
    std::set<std::string> names;
    for (const auto& v : vars_) {
      if (v.name.empty()) problems.emplace_back("unnamed column");
      if (!names.insert(v.name).second) problems.push_back("duplicate column '" + v.name + "'");
      if (v.lb > v.ub) problems.push_back("empty bounds on '" + v.name + "'");
      if (!std::isfinite(v.obj)) problems.push_back("non-finite objective on '" + v.name + "'");
    }
    names.clear();
    names.insert(objective_);
    for (const auto& r : rows_) {
      if (!names.insert(r.name).second) problems.push_back("duplicate row '" + r.name + "'");
      for (const auto& t : r.terms)
        if (t.var < 0 || t.var >= var_count()) problems.push_back("row '" + r.name + "' references unknown column");
        else if (!std::isfinite(t.coef)) problems.push_back("non-finite coefficient in '" + r.name + "'");
      if (!std::isfinite(r.rhs)) problems.push_back("non-finite rhs in '" + r.name + "'");
    }
    if (!problems.empty()) throw ValidationError(std::move(problems));
  }

 private:
  std::string name_;
  std::string objective_;
  std::vector<Variable> vars_;
  std::vector<Constraint> rows_;
};

}  // namespace vodfog::milp
