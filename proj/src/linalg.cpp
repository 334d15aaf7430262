#include "r4/linalg.hpp"

#include <stdexcept>

namespace r4 {

ExactScalar determinant(Matrix m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("determinant: matrix not square");
  const std::size_t n = m.rows();
  ExactScalar det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && m(p, c).is_zero()) ++p;
    if (p == n) return 0;
    if (p != c) {
      for (std::size_t j = c; j < n; ++j) std::swap(m(p, j), m(c, j));
      det = -det;
    }
    det *= m(c, c);
    for (std::size_t i = c + 1; i < n; ++i) {
      if (m(i, c).is_zero()) continue;
      const ExactScalar f = m(i, c) / m(c, c);
      for (std::size_t j = c; j < n; ++j) m(i, j) -= f * m(c, j);
    }
  }
  return det;
}

Sign determinant_sign(const Matrix& m) { return determinant(m).sign(); }

LinearSolution solve(Matrix a, std::vector<ExactScalar> b) {
  const std::size_t rows = a.rows();
  const std::size_t cols = a.cols();
  if (b.size() != rows) throw std::invalid_argument("solve: rhs size mismatch");
  std::vector<std::size_t> pivot_col;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && a(p, c).is_zero()) ++p;
    if (p == rows) continue;
    if (p != r) {
      for (std::size_t j = 0; j < cols; ++j) std::swap(a(p, j), a(r, j));
      std::swap(b[p], b[r]);
    }
    const ExactScalar inv = ExactScalar(1) / a(r, c);
    for (std::size_t j = c; j < cols; ++j) a(r, j) *= inv;
    b[r] *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || a(i, c).is_zero()) continue;
      const ExactScalar f = a(i, c);
      for (std::size_t j = c; j < cols; ++j) a(i, j) -= f * a(r, j);
      b[i] -= f * b[r];
    }
    pivot_col.push_back(c);
    ++r;
  }
  LinearSolution out;
  out.rank = r;
  for (std::size_t i = r; i < rows; ++i) {
    if (!b[i].is_zero()) {
      out.kind = LinearSolution::Kind::Inconsistent;
      return out;
    }
  }
  out.x.assign(cols, ExactScalar(0));
  for (std::size_t i = 0; i < r; ++i) out.x[pivot_col[i]] = b[i];
  out.kind = (r == cols) ? LinearSolution::Kind::Unique : LinearSolution::Kind::Underdetermined;
  return out;
}

std::optional<std::vector<ExactScalar>> nonnegative_solution(const Matrix& a,
                                                             const std::vector<ExactScalar>& b) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  // Tableau columns: n structural, m artificial, 1 rhs.
  const std::size_t width = n + m + 1;
  Matrix t(m + 1, width);
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    const bool flip = b[i].sign() == Sign::Neg;
    for (std::size_t j = 0; j < n; ++j) t(i, j) = flip ? -a(i, j) : a(i, j);
    t(i, n + i) = 1;
    t(i, n + m) = flip ? -b[i] : b[i];
    basis[i] = n + i;
  }
  // Objective row holds reduced costs of "minimize the sum of artificials".
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) t(m, j) -= t(i, j);
  }
  for (std::size_t i = 0; i < m; ++i) t(m, n + m) -= t(i, n + m);

  for (;;) {
    std::size_t enter = width;
    for (std::size_t j = 0; j + 1 < width; ++j) {
      if (t(m, j).sign() == Sign::Neg) {
        enter = j;
        break;
      }
    }
    if (enter == width) break;
    std::size_t leave = m;
    ExactScalar best;
    for (std::size_t i = 0; i < m; ++i) {
      if (t(i, enter).sign() != Sign::Pos) continue;
      const ExactScalar ratio = t(i, n + m) / t(i, enter);
      if (leave == m || ratio < best || (ratio == best && basis[i] < basis[leave])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave == m) break;  // unbounded direction; cannot happen for phase one
    const ExactScalar inv = ExactScalar(1) / t(leave, enter);
    for (std::size_t j = 0; j < width; ++j) t(leave, j) *= inv;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == leave || t(i, enter).is_zero()) continue;
      const ExactScalar f = t(i, enter);
      for (std::size_t j = 0; j < width; ++j) t(i, j) -= f * t(leave, j);
    }
    basis[leave] = enter;
  }
  if (!t(m, n + m).is_zero()) return std::nullopt;
  std::vector<ExactScalar> x(n, ExactScalar(0));
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < n) x[basis[i]] = t(i, n + m);
  }
  return x;
}

}  // namespace r4
