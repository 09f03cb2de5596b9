#include "hmcdist/lp.hpp"

#include <utility>

#include "hmcdist/errors.hpp"

namespace hmcdist {

std::size_t LpProblem::add_variable(std::string name, std::optional<Rat> lower, std::optional<Rat> upper) {
  if (lower) lower->canonicalize();
  if (upper) upper->canonicalize();
  variables_.push_back({std::move(name), std::move(lower), std::move(upper)});
  return variables_.size() - 1;
}

void LpProblem::add_constraint(std::vector<LinearTerm> terms, Relation relation, Rat rhs) {
  for (const LinearTerm& t : terms) {
    if (t.variable >= variables_.size()) throw DimensionError("constraint references unknown variable");
  }
  for (LinearTerm& t : terms) t.coefficient.canonicalize();
  rhs.canonicalize();
  constraints_.push_back({std::move(terms), relation, std::move(rhs)});
}

void LpProblem::set_objective(std::vector<LinearTerm> terms) {
  for (const LinearTerm& t : terms) {
    if (t.variable >= variables_.size()) throw DimensionError("objective references unknown variable");
  }
  for (LinearTerm& t : terms) t.coefficient.canonicalize();
  objective_ = std::move(terms);
}

bool LpProblem::is_feasible(const RatVector& point) const {
  if (point.size() != variables_.size()) return false;
  for (std::size_t j = 0; j < variables_.size(); ++j) {
    if (variables_[j].lower && point[j] < *variables_[j].lower) return false;
    if (variables_[j].upper && point[j] > *variables_[j].upper) return false;
  }
  for (const LpConstraint& c : constraints_) {
    Rat lhs = 0;
    for (const LinearTerm& t : c.terms) lhs += t.coefficient * point[t.variable];
    switch (c.relation) {
      case Relation::LessEqual:
        if (lhs > c.rhs) return false;
        break;
      case Relation::GreaterEqual:
        if (lhs < c.rhs) return false;
        break;
      case Relation::Equal:
        if (lhs != c.rhs) return false;
        break;
    }
  }
  return true;
}

Rat LpProblem::objective_at(const RatVector& point) const {
  Rat value = 0;
  for (const LinearTerm& t : objective_) value += t.coefficient * point.at(t.variable);
  return value;
}

namespace {

// x_j = offset + sum(sign * y_col) over the standard-form columns.
struct VariableMap {
  Rat offset;
  std::vector<std::pair<std::size_t, int>> columns;
};

class Tableau {
 public:
  Tableau(RatMatrix rows, RatVector rhs, std::vector<std::size_t> basis, std::size_t columns)
      : rows_(std::move(rows)), rhs_(std::move(rhs)), basis_(std::move(basis)), columns_(columns) {}

  // Loads a cost vector and prices out the current basis.
  void set_costs(const RatVector& costs) {
    reduced_ = costs;
    reduced_.resize(columns_, Rat(0));
    objective_ = 0;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const Rat cb = costs[basis_[i]];
      if (sgn(cb) == 0) continue;
      for (std::size_t j = 0; j < columns_; ++j) {
        if (sgn(rows_[i][j]) != 0) reduced_[j] -= cb * rows_[i][j];
      }
      objective_ += cb * rhs_[i];
    }
  }

  // Runs Bland's rule until optimal (true) or unbounded (false).
  bool optimise(std::size_t allowed_columns) {
    for (;;) {
      std::size_t entering = allowed_columns;
      for (std::size_t j = 0; j < allowed_columns; ++j) {
        if (sgn(reduced_[j]) < 0) {
          entering = j;
          break;
        }
      }
      if (entering == allowed_columns) return true;
      std::size_t leaving = rows_.size();
      Rat best_ratio;
      for (std::size_t i = 0; i < rows_.size(); ++i) {
        if (sgn(rows_[i][entering]) <= 0) continue;
        Rat ratio = rhs_[i] / rows_[i][entering];
        if (leaving == rows_.size() || ratio < best_ratio ||
            (ratio == best_ratio && basis_[i] < basis_[leaving])) {
          leaving = i;
          best_ratio = std::move(ratio);
        }
      }
      if (leaving == rows_.size()) return false;
      pivot(leaving, entering);
    }
  }

  void pivot(std::size_t r, std::size_t col) {
    const Rat inv = 1 / rows_[r][col];
    for (std::size_t j = 0; j < columns_; ++j) {
      if (sgn(rows_[r][j]) != 0) rows_[r][j] *= inv;
    }
    rhs_[r] *= inv;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (i == r || sgn(rows_[i][col]) == 0) continue;
      const Rat factor = rows_[i][col];
      for (std::size_t j = 0; j < columns_; ++j) {
        if (sgn(rows_[r][j]) != 0) rows_[i][j] -= factor * rows_[r][j];
      }
      rhs_[i] -= factor * rhs_[r];
    }
    if (sgn(reduced_[col]) != 0) {
      const Rat factor = reduced_[col];
      for (std::size_t j = 0; j < columns_; ++j) {
        if (sgn(rows_[r][j]) != 0) reduced_[j] -= factor * rows_[r][j];
      }
      objective_ += factor * rhs_[r];
    }
    basis_[r] = col;
  }

  void remove_row(std::size_t r) {
    rows_.erase(rows_.begin() + static_cast<std::ptrdiff_t>(r));
    rhs_.erase(rhs_.begin() + static_cast<std::ptrdiff_t>(r));
    basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
  }

  std::size_t row_count() const { return rows_.size(); }
  const RatVector& row(std::size_t i) const { return rows_[i]; }
  const Rat& rhs(std::size_t i) const { return rhs_[i]; }
  std::size_t basic(std::size_t i) const { return basis_[i]; }
  const Rat& objective() const { return objective_; }

 private:
  RatMatrix rows_;
  RatVector rhs_;
  std::vector<std::size_t> basis_;
  std::size_t columns_;
  RatVector reduced_;
  Rat objective_;
};

}  // namespace

LpOutcome solve_lp(const LpProblem& problem) {
  const auto& vars = problem.variables();
  std::vector<VariableMap> maps(vars.size());
  std::size_t structural = 0;
  struct BoundRow {
    std::size_t column;
    Rat limit;
  };
  std::vector<BoundRow> bound_rows;
  for (std::size_t j = 0; j < vars.size(); ++j) {
    const LpVariable& v = vars[j];
    if (v.lower) {
      maps[j].offset = *v.lower;
      maps[j].columns.push_back({structural, 1});
      if (v.upper) bound_rows.push_back({structural, *v.upper - *v.lower});
      ++structural;
    } else if (v.upper) {
      maps[j].offset = *v.upper;
      maps[j].columns.push_back({structural++, -1});
    } else {
      maps[j].offset = 0;
      maps[j].columns.push_back({structural++, 1});
      maps[j].columns.push_back({structural++, -1});
    }
  }

  struct Row {
    RatVector coeffs;
    Relation relation;
    Rat rhs;
  };
  std::vector<Row> rows;
  for (const LpConstraint& c : problem.constraints()) {
    Row row{RatVector(structural), c.relation, c.rhs};
    for (const LinearTerm& t : c.terms) {
      row.rhs -= t.coefficient * maps[t.variable].offset;
      for (auto [col, sign] : maps[t.variable].columns) row.coeffs[col] += sign * t.coefficient;
    }
    rows.push_back(std::move(row));
  }
  for (const BoundRow& b : bound_rows) {
    Row row{RatVector(structural), Relation::LessEqual, b.limit};
    row.coeffs[b.column] = 1;
    rows.push_back(std::move(row));
  }
  for (Row& row : rows) {
    if (sgn(row.rhs) < 0) {
      for (Rat& a : row.coeffs) a = -a;
      row.rhs = -row.rhs;
      if (row.relation == Relation::LessEqual) {
        row.relation = Relation::GreaterEqual;
      } else if (row.relation == Relation::GreaterEqual) {
        row.relation = Relation::LessEqual;
      }
    }
  }

  std::size_t slack_count = 0;
  std::size_t artificial_count = 0;
  for (const Row& row : rows) {
    if (row.relation != Relation::Equal) ++slack_count;
    if (row.relation != Relation::LessEqual) ++artificial_count;
  }
  const std::size_t first_artificial = structural + slack_count;
  const std::size_t columns = first_artificial + artificial_count;

  RatMatrix matrix(rows.size(), RatVector(columns));
  RatVector rhs(rows.size());
  std::vector<std::size_t> basis(rows.size());
  std::size_t next_slack = structural;
  std::size_t next_artificial = first_artificial;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < structural; ++j) matrix[i][j] = rows[i].coeffs[j];
    rhs[i] = rows[i].rhs;
    switch (rows[i].relation) {
      case Relation::LessEqual:
        matrix[i][next_slack] = 1;
        basis[i] = next_slack++;
        break;
      case Relation::GreaterEqual:
        matrix[i][next_slack++] = -1;
        matrix[i][next_artificial] = 1;
        basis[i] = next_artificial++;
        break;
      case Relation::Equal:
        matrix[i][next_artificial] = 1;
        basis[i] = next_artificial++;
        break;
    }
  }

  Tableau tableau(std::move(matrix), std::move(rhs), std::move(basis), columns);

  if (artificial_count > 0) {
    RatVector phase1(columns);
    for (std::size_t j = first_artificial; j < columns; ++j) phase1[j] = 1;
    tableau.set_costs(phase1);
    tableau.optimise(columns);  // bounded below by zero
    if (sgn(tableau.objective()) > 0) return LpInfeasible{};
    for (std::size_t i = 0; i < tableau.row_count();) {
      if (tableau.basic(i) < first_artificial) {
        ++i;
        continue;
      }
      std::size_t replacement = first_artificial;
      for (std::size_t j = 0; j < first_artificial; ++j) {
        if (sgn(tableau.row(i)[j]) != 0) {
          replacement = j;
          break;
        }
      }
      if (replacement == first_artificial) {
        tableau.remove_row(i);  // redundant equality
      } else {
        tableau.pivot(i, replacement);
        ++i;
      }
    }
  }

  RatVector costs(columns);
  for (const LinearTerm& t : problem.objective()) {
    for (auto [col, sign] : maps[t.variable].columns) costs[col] += sign * t.coefficient;
  }
  tableau.set_costs(costs);
  if (!tableau.optimise(first_artificial)) return LpUnbounded{};

  RatVector y(columns);
  for (std::size_t i = 0; i < tableau.row_count(); ++i) y[tableau.basic(i)] = tableau.rhs(i);
  RatVector point(vars.size());
  for (std::size_t j = 0; j < vars.size(); ++j) {
    point[j] = maps[j].offset;
    for (auto [col, sign] : maps[j].columns) point[j] += sign * y[col];
  }
  Rat value = problem.objective_at(point);
  return LpOptimal{std::move(value), std::move(point)};
}

}  // namespace hmcdist
