#pragma once

#include <optional>
#include <vector>

#include "r4/exact.hpp"

namespace r4 {

/// Small dense row-major matrix over exact rationals.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  ExactScalar& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const ExactScalar& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<ExactScalar> a_;
};

ExactScalar determinant(Matrix m);
Sign determinant_sign(const Matrix& m);

struct LinearSolution {
  enum class Kind { Unique, Inconsistent, Underdetermined };
  Kind kind = Kind::Inconsistent;
  std::size_t rank = 0;
  /// The unique solution, or a particular one (free variables at zero).
  std::vector<ExactScalar> x;
};

/// Gauss-Jordan elimination on A x = b; A may be non-square.
LinearSolution solve(Matrix a, std::vector<ExactScalar> b);

/// Exact phase-one simplex with Bland's rule: a vector x >= 0 with A x = b,
/// or nullopt when the system has no nonnegative solution. Deterministic for
/// a given (A, b).
std::optional<std::vector<ExactScalar>> nonnegative_solution(const Matrix& a,
                                                             const std::vector<ExactScalar>& b);

}  // namespace r4
