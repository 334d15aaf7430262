#pragma once

#include <array>
#include <vector>

#include "r4/kernel.hpp"
#include "r4/oracle.hpp"

namespace r4 {

/// One point shared by two intersecting tetrahedra.
struct PairWitness {
  std::size_t i = 0;
  std::size_t j = 0;
  Point4 vertex;
  VertexKind kind = VertexKind::EdgeTetra;  // EdgeTetra or FaceFace
  friend bool operator==(const PairWitness&, const PairWitness&) = default;
};

/// Convex polygon T_i cap T_j, vertices in cyclic order inside the common
/// 2-plane. `sources[k]` identifies how vertex k arises.
struct IntersectionPolygon {
  std::size_t i = 0;
  std::size_t j = 0;
  std::vector<Point4> orderedVertices;
  std::vector<ArrangementVertex> sources;
  /// Fan triangulation from vertex 0.
  std::vector<Triangle4> triangles() const;
};

/// Affine chart of a hyperplane: drops the coordinate whose normal
/// component is largest in magnitude. Exact in both directions.
struct HyperplaneChart {
  Hyperplane4 h;
  std::size_t drop = 0;
  Vec3 project(const Point4& p) const;
  Point4 lift(const Vec3& x) const;
};
HyperplaneChart chart_of(const Tetrahedron4& t);

/// Exactly one witness per intersecting pair (i < j), via the multi-level
/// structure: edges against tetrahedra, then 2-faces against 2-faces.
std::vector<PairWitness> pairwise(const std::vector<Tetrahedron4>& tetrahedra);

/// Throws EmptyIntersection when disjoint and DegeneratePosition when the
/// intersection is not a proper polygon or the pair is not generic.
IntersectionPolygon intersection_polygon(const std::vector<Tetrahedron4>& tetrahedra, std::size_t i,
                                         std::size_t j);

struct LocalResult {
  std::vector<std::array<std::size_t, 3>> triples;  // sorted ids, each containing T0
  std::vector<ArrangementVertex> vertices;         // face-tetra-tetra and four-tetra vertices seen from T0
};

/// Works inside the hyperplane of T0 with the polygons T0 cap T_j: polygon
/// edges crossing other polygons give triple intersections and
/// face-tetra-tetra vertices; three polygons through one point give
/// four-tetra vertices.
LocalResult per_tetra_reduction(const std::vector<Tetrahedron4>& tetrahedra, std::size_t t0,
                                const std::vector<IntersectionPolygon>& polygons);

struct ArrangementResult {
  KCounts counts;
  std::vector<PairWitness> witnesses;
  std::vector<IntersectionPolygon> polygons;
};

ArrangementResult build_arrangement(const std::vector<Tetrahedron4>& tetrahedra);
KCounts k_counts(const std::vector<Tetrahedron4>& tetrahedra);

bool operator==(const KCounts& a, const KCounts& b);

}  // namespace r4
