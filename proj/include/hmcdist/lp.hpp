#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hmcdist/rational.hpp"

namespace hmcdist {

enum class Relation { LessEqual, GreaterEqual, Equal };

struct LinearTerm {
  std::size_t variable;
  Rat coefficient;
};

struct LpVariable {
  std::string name;
  std::optional<Rat> lower;
  std::optional<Rat> upper;
};

struct LpConstraint {
  std::vector<LinearTerm> terms;
  Relation relation;
  Rat rhs;
};

/// Minimisation LP with exact coefficients.
class LpProblem {
 public:
  /// Adds a variable (default bounds: x >= 0) and returns its index.
  std::size_t add_variable(std::string name, std::optional<Rat> lower = Rat(0),
                           std::optional<Rat> upper = std::nullopt);
  void add_constraint(std::vector<LinearTerm> terms, Relation relation, Rat rhs);
  void set_objective(std::vector<LinearTerm> terms);

  std::size_t variable_count() const noexcept { return variables_.size(); }
  const std::vector<LpVariable>& variables() const noexcept { return variables_; }
  const std::vector<LpConstraint>& constraints() const noexcept { return constraints_; }
  const std::vector<LinearTerm>& objective() const noexcept { return objective_; }

  /// Exact feasibility check of a full assignment (bounds and constraints).
  bool is_feasible(const RatVector& point) const;
  Rat objective_at(const RatVector& point) const;

 private:
  std::vector<LpVariable> variables_;
  std::vector<LpConstraint> constraints_;
  std::vector<LinearTerm> objective_;
};

struct LpOptimal {
  Rat value;
  RatVector point;
};
struct LpInfeasible {};
struct LpUnbounded {};

using LpOutcome = std::variant<LpOptimal, LpInfeasible, LpUnbounded>;

/// Two-phase primal simplex over exact rationals with Bland's pivot rule.
LpOutcome solve_lp(const LpProblem& problem);

}  // namespace hmcdist
