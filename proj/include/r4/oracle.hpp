#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "r4/kernel.hpp"

namespace r4 {

enum class QueryMode { Detect, Count, Report };
const char* to_string(QueryMode m);
QueryMode parse_mode(const std::string& text);

struct ReportPair {
  std::size_t a = 0;
  std::size_t b = 0;
  Point4 witness;
  friend bool operator==(const ReportPair&, const ReportPair&) = default;
};

/// DETECT fills only `detected` and count in {0,1}; COUNT adds the exact
/// count; REPORT adds the sorted pair list with witnesses.
struct IntersectionReport {
  bool detected = false;
  std::size_t count = 0;
  std::vector<ReportPair> pairs;
  friend bool operator==(const IntersectionReport&, const IntersectionReport&) = default;
};

/// Hyperplane and prepared forms cached per tetrahedron, shared by the batch
/// loops and the query structure.
struct TetraCache {
  Tetrahedron4 t;
  Hyperplane4 h;
};

/// Exact segment-tetrahedron witness using a precomputed hyperplane.
std::optional<Point4> segment_tetra_witness(const Segment4& e, const TetraCache& t);
/// Closed-set line-vs-2-flat witness for batch queries: a contained line
/// counts, with its first defining point as witness.
std::optional<Point4> line_flat_witness(const Segment4& line, const Triangle4& flat);

IntersectionReport seg_tetra_query(const std::vector<Segment4>& segments,
                                   const std::vector<Tetrahedron4>& tetrahedra, QueryMode mode);
IntersectionReport tetra_seg_query(const std::vector<Tetrahedron4>& tetrahedra,
                                   const std::vector<Segment4>& segments, QueryMode mode);
IntersectionReport tri_tri_query(const std::vector<Triangle4>& red,
                                 const std::vector<Triangle4>& blue, QueryMode mode);
IntersectionReport line_2flat_query(const std::vector<Segment4>& lines,
                                    const std::vector<Triangle4>& flats, QueryMode mode);

struct RayHit {
  std::size_t index = 0;
  ExactScalar t;
  Point4 point;
};
/// First tetrahedron hit by origin + t*direction, t >= 0; ties go to the
/// smallest index.
std::optional<RayHit> ray_shoot(const Point4& origin, const Point4& direction,
                                const std::vector<Tetrahedron4>& tetrahedra);

enum class VertexKind { EdgeTetra, FaceFace, FaceTetraTetra, FourTetra };
const char* to_string(VertexKind k);

/// An arrangement vertex formed by intersecting features of distinct
/// tetrahedra. `tetra` lists the participating tetrahedra; `feature` holds the
/// local feature index within each (edge 0..5, face 0..3, or -1 for the
/// whole tetrahedron).
struct ArrangementVertex {
  VertexKind kind = VertexKind::FourTetra;
  std::vector<std::size_t> tetra;
  std::vector<int> feature;
  Point4 point;
  friend bool operator==(const ArrangementVertex&, const ArrangementVertex&) = default;
  friend auto operator<=>(const ArrangementVertex& a, const ArrangementVertex& b) {
    if (auto c = a.kind <=> b.kind; c != 0) return c;
    if (auto c = a.tetra <=> b.tetra; c != 0) return c;
    if (auto c = a.feature <=> b.feature; c != 0) return c;
    return a.point <=> b.point;
  }
};

struct KCounts {
  std::size_t k2 = 0;
  std::size_t k3 = 0;
  std::size_t k4 = 0;
  std::array<std::size_t, 4> byKind{};  // indexed by VertexKind
  std::vector<std::array<std::size_t, 2>> pairs;
  std::vector<std::array<std::size_t, 3>> triples;
  std::vector<ArrangementVertex> vertices;  // sorted
};

/// Exhaustive enumeration over pairs, triples and quadruples (pruned by the
/// intersecting-pair graph). Throws DegeneratePosition on non-generic input.
KCounts arrangement_k_counts(const std::vector<Tetrahedron4>& tetrahedra);

/// Local edges (vertex index pairs) and faces (vertex index triples) of a
/// tetrahedron, in the order used by ArrangementVertex::feature.
extern const std::array<std::array<int, 2>, 6> kTetraEdges;
extern const std::array<std::array<int, 3>, 4> kTetraFaces;
std::vector<Point4> edge_points(const Tetrahedron4& t, int e);
std::vector<Point4> face_points(const Tetrahedron4& t, int f);
std::vector<Point4> tetra_points(const Tetrahedron4& t);

}  // namespace r4
