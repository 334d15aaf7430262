#pragma once

#include <array>
#include <vector>

#include "r4/kernel.hpp"
#include "r4/oracle.hpp"

namespace r4 {

/// A tetrahedron in R^3 translating at constant velocity during [t0, t1].
struct MovingTetrahedron {
  std::array<Vec3, 4> vertices;
  Vec3 velocity{};
  ExactScalar t0 = 0;
  ExactScalar t1 = 1;

  /// Throws GeometryError on an empty window or flat tetrahedron.
  void validate() const;
  /// Vertex positions at time t.
  std::array<Vec3, 4> at(const ExactScalar& t) const;
};

/// Space-time region swept by a moving tetrahedron. Vertices 0..3 sit at t0,
/// 4..7 at t1 (vertex k + 4 is the lift of vertex k).
struct Prism4 {
  std::array<Point4, 8> vertices;
  std::vector<Tetrahedron4> facetTetrahedra;  // 14: two caps, 3 per side facet
  std::vector<Triangle4> boundaryTriangles;   // 20: 8 cap faces, 12 side-quad halves
  std::vector<Segment4> edges;                // 16
  std::vector<Hyperplane4> facetHyperplanes;  // 6, every vertex on the non-positive side
  std::vector<Hyperplane4> tetraPlanes;       // hyperplane of each facet tetrahedron

  /// Closed membership test against all facet hyperplanes.
  bool contains(const Point4& x) const;
};

Prism4 lift(const MovingTetrahedron& mt);
/// Prism features from its 8 vertices (used on linearly transformed copies).
Prism4 assemble_prism(const std::array<Point4, 8>& vertices);

/// First intersection point of two prisms under the fixed enumeration
/// order: vertex containment, then edge against facet tetrahedron, then
/// boundary triangle pairs.
std::optional<Point4> prism_witness(const Prism4& a, const Prism4& b);

/// Exhaustive reference: every pair of lifted prisms tested directly.
IntersectionReport ccd_oracle(const std::vector<MovingTetrahedron>& scene, QueryMode mode);

struct CcdOptions {
  std::size_t oracleThreshold = 32;  // subproblems this small are solved pairwise
  std::uint64_t shearSalt = 0x5eed;
};

/// Colliding pairs (i < j). The witness of each pair is a point of both
/// prisms; its w coordinate is a collision time.
IntersectionReport detect_collisions(const std::vector<MovingTetrahedron>& scene, QueryMode mode,
                                     const CcdOptions& options = {});

/// Whether two tetrahedra in R^3 intersect (closed sets).
bool tetrahedra3_intersect(const std::array<Vec3, 4>& a, const std::array<Vec3, 4>& b);

}  // namespace r4
