#pragma once

#include <cstddef>
#include <vector>

#include "hmcdist/rational.hpp"

namespace hmcdist {

/// Incrementally grown row basis over a fixed index set, kept in reduced
/// row-echelon form: every stored row has a unit entry at its pivot column and
/// zeros at the pivot columns of all other rows.
class Basis {
 public:
  explicit Basis(std::size_t dimension) : dimension_(dimension) {}

  /// Inserts v if it lies outside the current span. Returns whether the basis grew.
  /// Throws DimensionError if v has the wrong length.
  bool try_extend(const RatVector& v);

  bool in_span(const RatVector& v) const;

  /// v minus its projection along the stored rows (zero iff v is in the span).
  RatVector reduce(const RatVector& v) const;

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t rank() const noexcept { return rows_.size(); }
  const std::vector<RatVector>& rows() const noexcept { return rows_; }
  const std::vector<std::size_t>& pivots() const noexcept { return pivots_; }

 private:
  std::size_t dimension_;
  std::vector<RatVector> rows_;
  std::vector<std::size_t> pivots_;
};

/// Solves A x = b exactly by Gauss-Jordan elimination. A must be square and
/// nonsingular; throws DimensionError / SingularError otherwise.
RatVector solve_linear(const RatMatrix& a, const RatVector& b);

}  // namespace hmcdist
