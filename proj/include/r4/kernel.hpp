#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "r4/exact.hpp"

namespace r4 {

// ---------------------------------------------------------------------------
// Errors

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class DegenerateTetrahedron : public GeometryError {
 public:
  DegenerateTetrahedron() : GeometryError("tetrahedron vertices are affinely dependent") {}
};
class DegenerateDirection : public GeometryError {
 public:
  explicit DegenerateDirection(const std::string& what) : GeometryError(what) {}
};
class DegeneratePosition : public GeometryError {
 public:
  explicit DegeneratePosition(const std::string& what) : GeometryError(what) {}
};
class Contained : public GeometryError {
 public:
  Contained() : GeometryError("line lies inside the 2-flat") {}
};
class EmptyIntersection : public GeometryError {
 public:
  EmptyIntersection() : GeometryError("intersection is empty") {}
};

// ---------------------------------------------------------------------------
// Value types

using Vec3 = std::array<ExactScalar, 3>;

struct Point4 {
  std::array<ExactScalar, 4> c{};

  Point4() = default;
  Point4(ExactScalar x, ExactScalar y, ExactScalar z, ExactScalar w)
      : c{std::move(x), std::move(y), std::move(z), std::move(w)} {}

  const ExactScalar& x() const { return c[0]; }
  const ExactScalar& y() const { return c[1]; }
  const ExactScalar& z() const { return c[2]; }
  const ExactScalar& w() const { return c[3]; }
  ExactScalar& operator[](std::size_t i) { return c[i]; }
  const ExactScalar& operator[](std::size_t i) const { return c[i]; }

  std::string str() const;

  friend bool operator==(const Point4&, const Point4&) = default;
  friend auto operator<=>(const Point4& a, const Point4& b) { return a.c <=> b.c; }
};

Point4 operator+(const Point4& a, const Point4& b);
Point4 operator-(const Point4& a, const Point4& b);
Point4 operator*(const ExactScalar& s, const Point4& p);
ExactScalar dot(const Point4& a, const Point4& b);

struct Segment4 {
  Point4 a, b;
};

struct Triangle4 {
  Point4 p, q, r;
  std::array<Point4, 3> vertices() const { return {p, q, r}; }
};

struct Tetrahedron4 {
  Point4 v0, v1, v2, v3;
  std::array<Point4, 4> vertices() const { return {v0, v1, v2, v3}; }
  /// Facet k is the triangle opposite vertex k, vertices in increasing index order.
  Triangle4 facet(int k) const;
};

/// coeffs · x = offset, first nonzero coefficient normalized to +1.
struct Hyperplane4 {
  std::array<ExactScalar, 4> coeffs{};
  ExactScalar offset;
  friend bool operator==(const Hyperplane4&, const Hyperplane4&) = default;
};

struct LineParam {
  Point4 u0;  // w = 0
  Point4 u1;  // w = 1
  std::array<ExactScalar, 6> point6() const {
    return {u0.x(), u0.y(), u0.z(), u1.x(), u1.y(), u1.z()};
  }
};

/// Anchors are the 2-plane's meets with {x=y=0}, {x=0,y=1}, {x=y=1}, each
/// stored as its (z, w) pair.
struct TwoPlaneParam {
  std::pair<ExactScalar, ExactScalar> v00, v01, v11;
  std::array<ExactScalar, 6> point6() const {
    return {v00.first, v00.second, v01.first, v01.second, v11.first, v11.second};
  }
  std::array<Point4, 3> lifted() const;
};

// ---------------------------------------------------------------------------
// Integer homogeneous forms. Scaling a row (p, 1) by a positive integer does
// not change the sign of any determinant it enters, so every predicate below
// works on primitive integer vectors.

using Homog5 = IntVector<5>;
/// Pluecker coordinates of the 2x5 matrix [(a,1);(b,1)], pair order
/// (0,1),(0,2),(0,3),(0,4),(1,2),(1,3),(1,4),(2,3),(2,4),(3,4).
using Pluecker10 = IntVector<10>;

Homog5 homogeneous(const Point4& p);
Pluecker10 line_pluecker(const Point4& a, const Point4& b);
/// Signed complementary 3x3 minors of [(p,1);(q,1);(r,1)], arranged so that
/// dot(line_pluecker(a,b), plane_dual(p,q,r)) = det[(a,1);(b,1);(p,1);(q,1);(r,1)].
Pluecker10 plane_dual(const Point4& p, const Point4& q, const Point4& r);

/// Unnormalized variants on integer rows (no gcd reduction).
Pluecker10 line_pluecker_raw(const Homog5& a, const Homog5& b);
Pluecker10 plane_dual_raw(const Homog5& p, const Homog5& q, const Homog5& r);

// ---------------------------------------------------------------------------
// Predicates and constructions

Sign orient5(const Point4& u0, const Point4& u1, const Point4& v00, const Point4& v01,
             const Point4& v11);
Sign side_of_hyperplane(const Point4& p, const Hyperplane4& h);
Hyperplane4 hyperplane_of(const Tetrahedron4& t);
LineParam line_param(const Segment4& s);
TwoPlaneParam twoplane_param(const Point4& p, const Point4& q, const Point4& r);

/// Sign of the 4x4 determinant with rows a, b, c, d.
Sign det4_sign(const Point4& a, const Point4& b, const Point4& c, const Point4& d);

/// Per-tetrahedron data for the segment predicate: the supporting hyperplane
/// as an integer form, the four facet duals and their orientation signs.
struct TetraPrep {
  Homog5 plane;  // (a1..a4, -b), primitive; side(p) = sign(plane . (p,1))
  std::array<Pluecker10, 4> facet;
  std::array<Sign, 4> eps{};
};
TetraPrep prepare_tetra(const Tetrahedron4& t);

struct SegmentPrep {
  Homog5 a, b;
  Pluecker10 line;
};
SegmentPrep prepare_segment(const Segment4& s);

bool segment_tetra_predicate(const SegmentPrep& e, const TetraPrep& t);
bool segment_tetra_predicate(const Segment4& e, const Tetrahedron4& t);
std::optional<Point4> segment_tetra_direct(const Segment4& e, const Tetrahedron4& t);
/// Same, with the tetrahedron's hyperplane supplied by the caller.
std::optional<Point4> segment_tetra_direct(const Segment4& e, const Tetrahedron4& t,
                                           const Hyperplane4& h);
/// Membership of a point already lying in hyperplane_of(t).
bool in_tetra_on_plane(const Point4& x, const Tetrahedron4& t);

struct TrianglePrep {
  std::array<Pluecker10, 3> edge;  // (p,q), (q,r), (r,p)
  Pluecker10 plane;
};
TrianglePrep prepare_triangle(const Triangle4& t);

/// Raw six-sign test; throws DegeneratePosition when any sign is ZERO. Does
/// not check that the supporting 2-planes meet in a single point.
bool tri_tri_signs(const TrianglePrep& a, const TrianglePrep& b);
bool tri_tri_predicate(const Triangle4& a, const Triangle4& b);
std::optional<Point4> tri_tri_direct(const Triangle4& a, const Triangle4& b);
/// Closed-set intersection witness for any two triangles (degenerate
/// positions included).
std::optional<Point4> tri_tri_witness(const Triangle4& a, const Triangle4& b);

std::optional<Point4> line_2flat_meet(const Segment4& line, const Triangle4& flat);

/// A common point of conv(a) and conv(b), found by an exact phase-one simplex.
std::optional<Point4> convex_hulls_intersect(const std::vector<Point4>& a,
                                             const std::vector<Point4>& b);

/// A common point of conv(s) for every s in `sets`, by one phase-one simplex.
std::optional<Point4> common_point(const std::vector<std::vector<Point4>>& sets);

/// The single common point of simplices (given by their vertices) whose
/// codimensions sum to 4, e.g. an edge and a tetrahedron, or two triangles.
/// Returns nullopt when they are disjoint. Throws DegeneratePosition when
/// the meet is not a single transversal point (a barycentric coordinate is
/// exactly zero, or the affine spans are not transversal while the simplices
/// still touch).
std::optional<Point4> simplex_meet(const std::vector<std::vector<Point4>>& simplices);

/// Unimodular integer map derived from `salt`, with its exact inverse.
struct ShearMap {
  std::array<std::array<long, 4>, 4> m{};
  std::array<std::array<long, 4>, 4> inv{};
  Point4 apply(const Point4& p) const;
  Point4 unapply(const Point4& p) const;
};
ShearMap shear_map(std::uint64_t salt);
std::vector<Point4> generic_shear(const std::vector<Point4>& points, std::uint64_t salt);
std::vector<Point4> generic_unshear(const std::vector<Point4>& points, std::uint64_t salt);

}  // namespace r4
