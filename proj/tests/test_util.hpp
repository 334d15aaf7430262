#pragma once

#include <random>

#include "r4/kernel.hpp"
#include "r4/linalg.hpp"

namespace r4test {

using r4::ExactScalar;
using r4::Point4;

inline Point4 random_point(std::mt19937_64& rng, int lo, int hi) {
  std::uniform_int_distribution<int> d(lo, hi);
  return Point4(d(rng), d(rng), d(rng), d(rng));
}

inline r4::Tetrahedron4 random_tetra(std::mt19937_64& rng, int range = 10) {
  for (;;) {
    r4::Tetrahedron4 t{random_point(rng, -range, range), random_point(rng, -range, range),
                       random_point(rng, -range, range), random_point(rng, -range, range)};
    try {
      r4::hyperplane_of(t);
      return t;
    } catch (const r4::DegenerateTetrahedron&) {
    }
  }
}

inline r4::Triangle4 random_triangle(std::mt19937_64& rng, int range = 10) {
  for (;;) {
    r4::Triangle4 t{random_point(rng, -range, range), random_point(rng, -range, range),
                    random_point(rng, -range, range)};
    r4::Matrix m(4, 2);
    for (std::size_t i = 0; i < 4; ++i) {
      m(i, 0) = t.q[i] - t.p[i];
      m(i, 1) = t.r[i] - t.p[i];
    }
    if (r4::solve(m, std::vector<ExactScalar>(4, ExactScalar(0))).rank == 2) return t;
  }
}

/// Segment through a random point near the centroid of `pts`, so that roughly
/// half of the generated pairs intersect.
inline r4::Segment4 segment_near(std::mt19937_64& rng, const std::vector<Point4>& pts,
                                 int range = 10) {
  Point4 c(0, 0, 0, 0);
  for (const auto& p : pts) c = c + p;
  c = ExactScalar(1, static_cast<long>(pts.size())) * c;
  for (;;) {
    const Point4 d = random_point(rng, -range, range);
    const Point4 off = random_point(rng, -2, 2);
    r4::Segment4 s{c + off - d, c + off + d};
    if (!(s.a == s.b)) return s;
  }
}

/// Reference 5x5 determinant with rows (p, 1), by plain elimination.
inline r4::Sign det5_sign(const Point4& a, const Point4& b, const Point4& c, const Point4& d,
                          const Point4& e) {
  r4::Matrix m(5, 5);
  const Point4* rows[5] = {&a, &b, &c, &d, &e};
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 4; ++j) m(i, j) = (*rows[i])[j];
    m(i, 4) = 1;
  }
  return r4::determinant_sign(m);
}

}  // namespace r4test
