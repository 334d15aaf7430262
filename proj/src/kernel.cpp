#include "r4/kernel.hpp"

#include <random>

#include "r4/linalg.hpp"

namespace r4 {

namespace {

constexpr std::array<std::array<int, 2>, 10> kPairs{{{0, 1}, {0, 2}, {0, 3}, {0, 4}, {1, 2},
                                                     {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}}};

std::array<int, 3> complement(int i, int j) {
  std::array<int, 3> out{};
  int k = 0;
  for (int c = 0; c < 5; ++c) {
    if (c != i && c != j) out[k++] = c;
  }
  return out;
}

mpz_class minor2(const Homog5& r0, const Homog5& r1, int i, int j) {
  return r0.big[i] * r1.big[j] - r0.big[j] * r1.big[i];
}

mpz_class minor3(const Homog5& r0, const Homog5& r1, const Homog5& r2, std::array<int, 3> c) {
  return r0.big[c[0]] * (r1.big[c[1]] * r2.big[c[2]] - r1.big[c[2]] * r2.big[c[1]]) -
         r0.big[c[1]] * (r1.big[c[0]] * r2.big[c[2]] - r1.big[c[2]] * r2.big[c[0]]) +
         r0.big[c[2]] * (r1.big[c[0]] * r2.big[c[1]] - r1.big[c[1]] * r2.big[c[0]]);
}

}  // namespace

bool in_tetra_on_plane(const Point4& x, const Tetrahedron4& t) {
  const auto v = t.vertices();
  for (std::size_t r = 0; r < 4; ++r) {
    bool below = true, above = true;
    for (const auto& p : v) {
      below = below && x[r] < p[r];
      above = above && x[r] > p[r];
    }
    if (below || above) return false;
  }
  Matrix m(4, 3);
  std::vector<ExactScalar> rhs(4);
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t k = 0; k < 3; ++k) m(r, k) = v[k + 1][r] - v[0][r];
    rhs[r] = x[r] - v[0][r];
  }
  const LinearSolution s = solve(m, rhs);
  if (s.kind != LinearSolution::Kind::Unique) return false;
  ExactScalar sum = 0;
  for (const auto& l : s.x) {
    if (l.sign() == Sign::Neg) return false;
    sum += l;
  }
  return sum <= ExactScalar(1);
}

namespace {

ExactScalar eval_plane(const Hyperplane4& h, const Point4& p) {
  ExactScalar v = -h.offset;
  for (std::size_t i = 0; i < 4; ++i) v += h.coeffs[i] * p[i];
  return v;
}

Point4 mat_apply(const std::array<std::array<long, 4>, 4>& m, const Point4& p) {
  Point4 out;
  for (std::size_t i = 0; i < 4; ++i) {
    ExactScalar v = 0;
    for (std::size_t j = 0; j < 4; ++j) {
      if (m[i][j] != 0) v += ExactScalar(m[i][j]) * p[j];
    }
    out[i] = v;
  }
  return out;
}

}  // namespace

std::string Point4::str() const {
  return "(" + c[0].str() + ", " + c[1].str() + ", " + c[2].str() + ", " + c[3].str() + ")";
}

Point4 operator+(const Point4& a, const Point4& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]};
}
Point4 operator-(const Point4& a, const Point4& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]};
}
Point4 operator*(const ExactScalar& s, const Point4& p) {
  return {s * p[0], s * p[1], s * p[2], s * p[3]};
}
ExactScalar dot(const Point4& a, const Point4& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

Triangle4 Tetrahedron4::facet(int k) const {
  switch (k) {
    case 0: return {v1, v2, v3};
    case 1: return {v0, v2, v3};
    case 2: return {v0, v1, v3};
    default: return {v0, v1, v2};
  }
}

std::array<Point4, 3> TwoPlaneParam::lifted() const {
  return {Point4(0, 0, v00.first, v00.second), Point4(0, 1, v01.first, v01.second),
          Point4(1, 1, v11.first, v11.second)};
}

Homog5 homogeneous(const Point4& p) {
  const mpz_class d = common_denominator(std::span<const ExactScalar>(p.c.data(), 4));
  Homog5 h;
  for (std::size_t i = 0; i < 4; ++i) h.big[i] = p[i].num() * (d / p[i].den());
  h.big[4] = d;
  h.refresh();
  return h;
}

Pluecker10 line_pluecker_raw(const Homog5& ha, const Homog5& hb) {
  Pluecker10 l;
  for (std::size_t k = 0; k < 10; ++k) l.big[k] = minor2(ha, hb, kPairs[k][0], kPairs[k][1]);
  l.refresh();
  return l;
}

Pluecker10 plane_dual_raw(const Homog5& hp, const Homog5& hq, const Homog5& hr) {
  Pluecker10 d;
  for (std::size_t k = 0; k < 10; ++k) {
    const int i = kPairs[k][0];
    const int j = kPairs[k][1];
    mpz_class m = minor3(hp, hq, hr, complement(i, j));
    if ((i + j + 1) % 2 != 0) m = -m;
    d.big[k] = m;
  }
  d.refresh();
  return d;
}

Pluecker10 line_pluecker(const Point4& a, const Point4& b) {
  Pluecker10 l = line_pluecker_raw(homogeneous(a), homogeneous(b));
  l.make_primitive();
  return l;
}

Pluecker10 plane_dual(const Point4& p, const Point4& q, const Point4& r) {
  Pluecker10 d = plane_dual_raw(homogeneous(p), homogeneous(q), homogeneous(r));
  d.make_primitive();
  return d;
}

Sign orient5(const Point4& u0, const Point4& u1, const Point4& v00, const Point4& v01,
             const Point4& v11) {
  return dot_sign(line_pluecker(u0, u1), plane_dual(v00, v01, v11));
}

Sign side_of_hyperplane(const Point4& p, const Hyperplane4& h) { return eval_plane(h, p).sign(); }

Sign det4_sign(const Point4& a, const Point4& b, const Point4& c, const Point4& d) {
  Matrix m(4, 4);
  const std::array<const Point4*, 4> rows{&a, &b, &c, &d};
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) m(i, j) = (*rows[i])[j];
  }
  return determinant_sign(m);
}

Hyperplane4 hyperplane_of(const Tetrahedron4& t) {
  const Point4 d1 = t.v1 - t.v0;
  const Point4 d2 = t.v2 - t.v0;
  const Point4 d3 = t.v3 - t.v0;
  // Generalized cross product: coefficient i is the signed 3x3 minor without column i.
  Hyperplane4 h;
  for (std::size_t i = 0; i < 4; ++i) {
    Matrix m(3, 3);
    std::size_t cc = 0;
    for (std::size_t j = 0; j < 4; ++j) {
      if (j == i) continue;
      m(0, cc) = d1[j];
      m(1, cc) = d2[j];
      m(2, cc) = d3[j];
      ++cc;
    }
    h.coeffs[i] = determinant(m);
    if (i % 2 == 1) h.coeffs[i] = -h.coeffs[i];
  }
  std::size_t lead = 0;
  while (lead < 4 && h.coeffs[lead].is_zero()) ++lead;
  if (lead == 4) throw DegenerateTetrahedron();
  const ExactScalar scale = h.coeffs[lead];
  for (auto& c : h.coeffs) c /= scale;
  h.offset = 0;
  for (std::size_t i = 0; i < 4; ++i) h.offset += h.coeffs[i] * t.v0[i];
  return h;
}

LineParam line_param(const Segment4& s) {
  const ExactScalar dw = s.b.w() - s.a.w();
  if (dw.is_zero()) throw DegenerateDirection("segment has constant w");
  const Point4 d = s.b - s.a;
  LineParam lp;
  lp.u0 = s.a + (-s.a.w() / dw) * d;
  lp.u1 = s.a + ((ExactScalar(1) - s.a.w()) / dw) * d;
  lp.u0[3] = 0;
  lp.u1[3] = 1;
  return lp;
}

TwoPlaneParam twoplane_param(const Point4& p, const Point4& q, const Point4& r) {
  const Point4 e1 = q - p;
  const Point4 e2 = r - p;
  const ExactScalar det = e1.x() * e2.y() - e2.x() * e1.y();
  if (det.is_zero()) throw DegenerateDirection("2-plane does not meet the anchor 2-planes in single points");
  auto anchor = [&](int ax, int ay) {
    const ExactScalar bx = ExactScalar(ax) - p.x();
    const ExactScalar by = ExactScalar(ay) - p.y();
    const ExactScalar s = (bx * e2.y() - e2.x() * by) / det;
    const ExactScalar t = (e1.x() * by - bx * e1.y()) / det;
    return std::make_pair(p.z() + s * e1.z() + t * e2.z(), p.w() + s * e1.w() + t * e2.w());
  };
  return {anchor(0, 0), anchor(0, 1), anchor(1, 1)};
}

TetraPrep prepare_tetra(const Tetrahedron4& t) {
  const Hyperplane4 h = hyperplane_of(t);
  TetraPrep out;
  std::array<ExactScalar, 5> form{h.coeffs[0], h.coeffs[1], h.coeffs[2], h.coeffs[3], -h.offset};
  const mpz_class d = common_denominator(std::span<const ExactScalar>(form.data(), 5));
  for (std::size_t i = 0; i < 5; ++i) out.plane.big[i] = form[i].num() * (d / form[i].den());
  out.plane.make_primitive();
  const Point4 normal(h.coeffs[0], h.coeffs[1], h.coeffs[2], h.coeffs[3]);
  const auto v = t.vertices();
  for (int k = 0; k < 4; ++k) {
    const Triangle4 f = t.facet(k);
    out.facet[k] = plane_dual(f.p, f.q, f.r);
    out.eps[k] = det4_sign(normal, f.p - v[k], f.q - f.p, f.r - f.p);
  }
  return out;
}

SegmentPrep prepare_segment(const Segment4& s) {
  return {homogeneous(s.a), homogeneous(s.b), line_pluecker(s.a, s.b)};
}

bool segment_tetra_predicate(const SegmentPrep& e, const TetraPrep& t) {
  const Sign sa = dot_sign(t.plane, e.a);
  const Sign sb = dot_sign(t.plane, e.b);
  if (sa == Sign::Zero || sb == Sign::Zero) throw DegeneratePosition("segment endpoint on hyperplane");
  if (sa == sb) return false;
  // Crossing from the negative to the positive side needs every facet test
  // positive, the other direction every test negative.
  const Sign want = sb;
  bool all = true;
  for (int k = 0; k < 4; ++k) {
    const Sign o = dot_sign(e.line, t.facet[k]);
    if (o == Sign::Zero) throw DegeneratePosition("line meets a facet 2-plane");
    if (o * t.eps[k] != want) all = false;
  }
  return all;
}

bool segment_tetra_predicate(const Segment4& e, const Tetrahedron4& t) {
  return segment_tetra_predicate(prepare_segment(e), prepare_tetra(t));
}

std::optional<Point4> segment_tetra_direct(const Segment4& e, const Tetrahedron4& t) {
  return segment_tetra_direct(e, t, hyperplane_of(t));
}

std::optional<Point4> segment_tetra_direct(const Segment4& e, const Tetrahedron4& t,
                                           const Hyperplane4& h) {
  const auto tv = t.vertices();
  for (std::size_t r = 0; r < 4; ++r) {
    const bool a_lo = e.a[r] < e.b[r];
    const ExactScalar& slo = a_lo ? e.a[r] : e.b[r];
    const ExactScalar& shi = a_lo ? e.b[r] : e.a[r];
    bool below = true, above = true;
    for (const auto& p : tv) {
      below = below && shi < p[r];
      above = above && slo > p[r];
    }
    if (below || above) return std::nullopt;
  }
  const ExactScalar fa = eval_plane(h, e.a);
  const ExactScalar fb = eval_plane(h, e.b);
  const Sign sa = fa.sign();
  const Sign sb = fb.sign();
  if (sa == sb && sa != Sign::Zero) return std::nullopt;
  if (sa != Sign::Zero && sb != Sign::Zero) {
    const ExactScalar tt = fa / (fa - fb);
    const Point4 x = e.a + tt * (e.b - e.a);
    if (in_tetra_on_plane(x, t)) return x;
    return std::nullopt;
  }
  if (sa == Sign::Zero && sb != Sign::Zero) {
    if (in_tetra_on_plane(e.a, t)) return e.a;
    return std::nullopt;
  }
  if (sb == Sign::Zero && sa != Sign::Zero) {
    if (in_tetra_on_plane(e.b, t)) return e.b;
    return std::nullopt;
  }
  const auto v = t.vertices();
  return convex_hulls_intersect({e.a, e.b}, std::vector<Point4>(v.begin(), v.end()));
}

TrianglePrep prepare_triangle(const Triangle4& t) {
  return {{line_pluecker(t.p, t.q), line_pluecker(t.q, t.r), line_pluecker(t.r, t.p)},
          plane_dual(t.p, t.q, t.r)};
}

bool tri_tri_signs(const TrianglePrep& a, const TrianglePrep& b) {
  Sign omega = Sign::Zero;
  bool same = true;
  auto check = [&](const Pluecker10& l, const Pluecker10& p) {
    const Sign s = dot_sign(l, p);
    if (s == Sign::Zero) throw DegeneratePosition("edge line meets the other 2-plane's boundary");
    if (omega == Sign::Zero) omega = s;
    if (s != omega) same = false;
  };
  for (const auto& e : a.edge) check(e, b.plane);
  for (const auto& e : b.edge) check(e, a.plane);
  return same;
}

bool tri_tri_predicate(const Triangle4& a, const Triangle4& b) {
  if (det4_sign(a.q - a.p, a.r - a.p, b.q - b.p, b.r - b.p) == Sign::Zero) {
    throw DegeneratePosition("2-planes do not meet in a single point");
  }
  return tri_tri_signs(prepare_triangle(a), prepare_triangle(b));
}

std::optional<Point4> tri_tri_direct(const Triangle4& a, const Triangle4& b) {
  Matrix m(4, 4);
  std::vector<ExactScalar> rhs(4);
  const Point4 a1 = a.q - a.p, a2 = a.r - a.p, b1 = b.q - b.p, b2 = b.r - b.p;
  for (std::size_t i = 0; i < 4; ++i) {
    m(i, 0) = a1[i];
    m(i, 1) = a2[i];
    m(i, 2) = -b1[i];
    m(i, 3) = -b2[i];
    rhs[i] = b.p[i] - a.p[i];
  }
  const LinearSolution s = solve(m, rhs);
  if (s.kind != LinearSolution::Kind::Unique) {
    throw DegeneratePosition("2-planes do not meet in a single point");
  }
  auto inside = [](const ExactScalar& u, const ExactScalar& v) {
    return u.sign() != Sign::Neg && v.sign() != Sign::Neg && u + v <= ExactScalar(1);
  };
  if (!inside(s.x[0], s.x[1]) || !inside(s.x[2], s.x[3])) return std::nullopt;
  return a.p + s.x[0] * a1 + s.x[1] * a2;
}

namespace {

/// Exact axis-box rejection for two finite point sets.
template <typename A, typename B>
bool boxes_apart(const A& a, const B& b) {
  for (std::size_t r = 0; r < 4; ++r) {
    const ExactScalar* alo = &a[0][r];
    const ExactScalar* ahi = alo;
    for (const auto& p : a) {
      if (p[r] < *alo) alo = &p[r];
      if (p[r] > *ahi) ahi = &p[r];
    }
    bool below = true, above = true;
    for (const auto& p : b) {
      below = below && *ahi < p[r];
      above = above && *alo > p[r];
    }
    if (below || above) return true;
  }
  return false;
}

}  // namespace

std::optional<Point4> tri_tri_witness(const Triangle4& a, const Triangle4& b) {
  if (boxes_apart(a.vertices(), b.vertices())) return std::nullopt;
  try {
    return tri_tri_direct(a, b);
  } catch (const DegeneratePosition&) {
    const auto va = a.vertices();
    const auto vb = b.vertices();
    return convex_hulls_intersect(std::vector<Point4>(va.begin(), va.end()),
                                  std::vector<Point4>(vb.begin(), vb.end()));
  }
}

std::optional<Point4> line_2flat_meet(const Segment4& line, const Triangle4& flat) {
  const Point4 d = line.b - line.a;
  const Point4 f1 = flat.q - flat.p;
  const Point4 f2 = flat.r - flat.p;
  if (d == Point4(0, 0, 0, 0)) throw DegenerateDirection("line has coincident points");
  // Generic case: five points spanning R^4 mean the line misses the flat.
  if (orient5(line.a, line.b, flat.p, flat.q, flat.r) != Sign::Zero) return std::nullopt;
  Matrix fm(4, 2);
  for (std::size_t i = 0; i < 4; ++i) {
    fm(i, 0) = f1[i];
    fm(i, 1) = f2[i];
  }
  if (solve(fm, std::vector<ExactScalar>(4, ExactScalar(0))).rank < 2) {
    throw DegenerateDirection("2-flat points are collinear");
  }
  Matrix m(4, 3);
  std::vector<ExactScalar> rhs(4);
  for (std::size_t i = 0; i < 4; ++i) {
    m(i, 0) = d[i];
    m(i, 1) = -f1[i];
    m(i, 2) = -f2[i];
    rhs[i] = flat.p[i] - line.a[i];
  }
  const LinearSolution s = solve(m, rhs);
  switch (s.kind) {
    case LinearSolution::Kind::Inconsistent: return std::nullopt;
    case LinearSolution::Kind::Underdetermined: throw Contained();
    case LinearSolution::Kind::Unique: break;
  }
  return line.a + s.x[0] * d;
}

std::optional<Point4> convex_hulls_intersect(const std::vector<Point4>& a,
                                             const std::vector<Point4>& b) {
  if (a.empty() || b.empty() || boxes_apart(a, b)) return std::nullopt;
  const std::size_t na = a.size();
  const std::size_t nb = b.size();
  Matrix m(6, na + nb);
  std::vector<ExactScalar> rhs(6, ExactScalar(0));
  for (std::size_t j = 0; j < na; ++j) {
    for (std::size_t i = 0; i < 4; ++i) m(i, j) = a[j][i];
    m(4, j) = 1;
  }
  for (std::size_t j = 0; j < nb; ++j) {
    for (std::size_t i = 0; i < 4; ++i) m(i, na + j) = -b[j][i];
    m(5, na + j) = 1;
  }
  rhs[4] = 1;
  rhs[5] = 1;
  const auto x = nonnegative_solution(m, rhs);
  if (!x) return std::nullopt;
  Point4 out(0, 0, 0, 0);
  for (std::size_t j = 0; j < na; ++j) {
    if (!(*x)[j].is_zero()) out = out + (*x)[j] * a[j];
  }
  return out;
}

std::optional<Point4> common_point(const std::vector<std::vector<Point4>>& sets) {
  const std::size_t k = sets.size();
  if (k == 0) return std::nullopt;
  std::size_t vars = 0;
  for (const auto& s : sets) vars += s.size();
  // Rows: one convexity row per set, 4 coordinate rows per set after the
  // first tying its combination to the first set's combination.
  Matrix m(k + 4 * (k - 1), vars);
  std::vector<ExactScalar> rhs(m.rows(), ExactScalar(0));
  std::size_t col = 0;
  for (std::size_t s = 0; s < k; ++s) {
    for (const auto& p : sets[s]) {
      m(s, col) = 1;
      for (std::size_t i = 0; i < 4; ++i) {
        if (s == 0) {
          for (std::size_t t = 1; t < k; ++t) m(k + 4 * (t - 1) + i, col) = p[i];
        } else {
          m(k + 4 * (s - 1) + i, col) = -p[i];
        }
      }
      ++col;
    }
    rhs[s] = 1;
  }
  const auto x = nonnegative_solution(m, rhs);
  if (!x) return std::nullopt;
  Point4 out(0, 0, 0, 0);
  for (std::size_t j = 0; j < sets[0].size(); ++j) {
    if (!(*x)[j].is_zero()) out = out + (*x)[j] * sets[0][j];
  }
  return out;
}

std::optional<Point4> simplex_meet(const std::vector<std::vector<Point4>>& simplices) {
  // Unknowns: the affine parameters of every simplex; equations: each
  // simplex's point equals the first simplex's point.
  std::size_t vars = 0;
  for (const auto& s : simplices) vars += s.size() - 1;
  const std::size_t eqs = 4 * (simplices.size() - 1);
  if (vars != eqs) throw std::invalid_argument("simplex_meet: codimensions must sum to 4");
  Matrix m(eqs, vars);
  std::vector<ExactScalar> rhs(eqs, ExactScalar(0));
  std::size_t col = 0;
  for (std::size_t s = 0; s < simplices.size(); ++s) {
    const auto& v = simplices[s];
    for (std::size_t k = 1; k < v.size(); ++k) {
      for (std::size_t i = 0; i < 4; ++i) {
        const ExactScalar d = v[k][i] - v[0][i];
        if (s == 0) {
          for (std::size_t t = 1; t < simplices.size(); ++t) m(4 * (t - 1) + i, col) = d;
        } else {
          m(4 * (s - 1) + i, col) = -d;
        }
      }
      ++col;
    }
    if (s > 0) {
      for (std::size_t i = 0; i < 4; ++i) rhs[4 * (s - 1) + i] = v[0][i] - simplices[0][0][i];
    }
  }
  const LinearSolution sol = solve(m, rhs);
  if (sol.kind != LinearSolution::Kind::Unique) {
    if (common_point(simplices)) throw DegeneratePosition("simplices meet non-transversally");
    return std::nullopt;
  }
  bool on_boundary = false;
  col = 0;
  for (const auto& v : simplices) {
    ExactScalar rest = 1;
    for (std::size_t k = 1; k < v.size(); ++k) {
      const Sign s = sol.x[col].sign();
      if (s == Sign::Neg) return std::nullopt;
      if (s == Sign::Zero) on_boundary = true;
      rest -= sol.x[col];
      ++col;
    }
    const Sign s = rest.sign();
    if (s == Sign::Neg) return std::nullopt;
    if (s == Sign::Zero) on_boundary = true;
  }
  if (on_boundary) throw DegeneratePosition("meet point lies on a simplex boundary");
  Point4 out = simplices[0][0];
  for (std::size_t k = 1; k < simplices[0].size(); ++k) {
    out = out + sol.x[k - 1] * (simplices[0][k] - simplices[0][0]);
  }
  return out;
}

Point4 ShearMap::apply(const Point4& p) const { return mat_apply(m, p); }
Point4 ShearMap::unapply(const Point4& p) const { return mat_apply(inv, p); }

ShearMap shear_map(std::uint64_t salt) {
  std::mt19937_64 rng(salt ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_int_distribution<int> dist(-2, 2);
  std::array<std::array<long, 4>, 4> lower{}, upper{};
  for (int i = 0; i < 4; ++i) {
    lower[i][i] = upper[i][i] = 1;
    for (int j = 0; j < i; ++j) lower[i][j] = dist(rng);
    for (int j = i + 1; j < 4; ++j) upper[i][j] = dist(rng);
  }
  ShearMap s;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      long v = 0;
      for (int k = 0; k < 4; ++k) v += lower[i][k] * upper[k][j];
      s.m[i][j] = v;
    }
  }
  // Determinant is 1, so the inverse is integral.
  for (std::size_t col = 0; col < 4; ++col) {
    Matrix a(4, 4);
    std::vector<ExactScalar> e(4, ExactScalar(0));
    e[col] = 1;
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = 0; j < 4; ++j) a(i, j) = s.m[i][j];
    }
    const LinearSolution sol = solve(a, e);
    for (std::size_t i = 0; i < 4; ++i) s.inv[i][col] = sol.x[i].num().get_si();
  }
  return s;
}

std::vector<Point4> generic_shear(const std::vector<Point4>& points, std::uint64_t salt) {
  const ShearMap s = shear_map(salt);
  std::vector<Point4> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(s.apply(p));
  return out;
}

std::vector<Point4> generic_unshear(const std::vector<Point4>& points, std::uint64_t salt) {
  const ShearMap s = shear_map(salt);
  std::vector<Point4> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(s.unapply(p));
  return out;
}

}  // namespace r4
