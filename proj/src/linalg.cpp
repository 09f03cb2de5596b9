#include "hmcdist/linalg.hpp"

#include <utility>

#include "hmcdist/errors.hpp"

namespace hmcdist {

RatVector Basis::reduce(const RatVector& v) const {
  if (v.size() != dimension_) {
    throw DimensionError("vector of length " + std::to_string(v.size()) + " for basis of dimension " +
                         std::to_string(dimension_));
  }
  RatVector r = v;
  for (Rat& x : r) x.canonicalize();
  for (std::size_t k = 0; k < rows_.size(); ++k) {
    const Rat factor = r[pivots_[k]];
    if (sgn(factor) == 0) continue;
    const RatVector& row = rows_[k];
    for (std::size_t j = 0; j < dimension_; ++j) {
      if (sgn(row[j]) != 0) r[j] -= factor * row[j];
    }
  }
  return r;
}

bool Basis::in_span(const RatVector& v) const {
  const RatVector r = reduce(v);
  for (const Rat& x : r) {
    if (sgn(x) != 0) return false;
  }
  return true;
}

bool Basis::try_extend(const RatVector& v) {
  RatVector r = reduce(v);
  std::size_t pivot = dimension_;
  for (std::size_t j = 0; j < dimension_; ++j) {
    if (sgn(r[j]) != 0) {
      pivot = j;
      break;
    }
  }
  if (pivot == dimension_) return false;
  const Rat scale = r[pivot];
  for (Rat& x : r) x /= scale;
  // Keep the echelon form reduced: clear the new pivot column elsewhere.
  for (RatVector& row : rows_) {
    const Rat factor = row[pivot];
    if (sgn(factor) == 0) continue;
    for (std::size_t j = 0; j < dimension_; ++j) {
      if (sgn(r[j]) != 0) row[j] -= factor * r[j];
    }
  }
  rows_.push_back(std::move(r));
  pivots_.push_back(pivot);
  return true;
}

RatVector solve_linear(const RatMatrix& a, const RatVector& b) {
  const std::size_t n = a.size();
  if (b.size() != n) throw DimensionError("right-hand side length does not match matrix");
  RatMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i].size() != n) throw DimensionError("matrix is not square");
    m[i] = a[i];
    m[i].push_back(b[i]);
    for (Rat& x : m[i]) x.canonicalize();
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && sgn(m[pivot][col]) == 0) ++pivot;
    if (pivot == n) throw SingularError("singular linear system");
    std::swap(m[pivot], m[col]);
    const Rat inv = 1 / m[col][col];
    for (std::size_t j = col; j <= n; ++j) m[col][j] *= inv;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == col || sgn(m[i][col]) == 0) continue;
      const Rat factor = m[i][col];
      for (std::size_t j = col; j <= n; ++j) m[i][j] -= factor * m[col][j];
    }
  }
  RatVector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = m[i][n];
  return x;
}

}  // namespace hmcdist
