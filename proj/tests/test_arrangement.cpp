#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "r4/arrangement.hpp"
#include "r4/scene.hpp"

using namespace r4;

namespace {

Tetrahedron4 simplex_at(const Point4& o, long size) {
  return {o, o + Point4(size, 1, 2, 3), o + Point4(2, size, 1, 5), o + Point4(3, 1, size, 2)};
}

// Scenes whose oracle run is in general position; degenerate draws are
// skipped and reported.
std::vector<std::vector<Tetrahedron4>> generic_scenes(std::size_t count, std::size_t n, long range,
                                                      std::uint64_t seed) {
  std::vector<std::vector<Tetrahedron4>> out;
  for (std::uint64_t s = seed; out.size() < count; ++s) {
    auto scene = generate_scene(SceneKind::Tetrahedra, n, range, s).tetrahedra();
    try {
      arrangement_k_counts(scene);
      out.push_back(std::move(scene));
    } catch (const DegeneratePosition&) {
      MESSAGE("seed " << s << " degenerate, skipped");
    }
  }
  return out;
}

}  // namespace

TEST_CASE("disjoint tetrahedra give zero counts") {
  const std::vector<Tetrahedron4> tets{simplex_at({0, 0, 0, 0}, 4), simplex_at({100, 0, 0, 0}, 4),
                                       simplex_at({0, 100, 0, 0}, 4)};
  const KCounts k = k_counts(tets);
  CHECK(k.k2 == 0);
  CHECK(k.k3 == 0);
  CHECK(k.k4 == 0);
  CHECK(pairwise(tets).empty());
  CHECK_THROWS_AS(intersection_polygon(tets, 0, 1), EmptyIntersection);
}

TEST_CASE("chart round trip") {
  const Tetrahedron4 t = simplex_at({1, -2, 3, 5}, 7);
  const HyperplaneChart c = chart_of(t);
  for (const auto& v : t.vertices()) CHECK(c.lift(c.project(v)) == v);
  const Point4 mid = ExactScalar(1, 3) * (t.vertices()[0] + t.vertices()[1] + t.vertices()[2]);
  CHECK(c.lift(c.project(mid)) == mid);
}

TEST_CASE("intersection polygons") {
  for (const auto& scene : generic_scenes(6, 12, 20, 1)) {
    const auto witnesses = pairwise(scene);
    for (const auto& w : witnesses) {
      CHECK(w.i < w.j);
      CHECK(convex_hulls_intersect({w.vertex}, tetra_points(scene[w.i])).has_value());
      CHECK(convex_hulls_intersect({w.vertex}, tetra_points(scene[w.j])).has_value());
      const IntersectionPolygon p = intersection_polygon(scene, w.i, w.j);
      // At most 6 + 6 edge-tetra vertices and 16 face-face vertices.
      CHECK(p.orderedVertices.size() >= 3);
      CHECK(p.orderedVertices.size() <= 28);
      CHECK(p.triangles().size() == p.orderedVertices.size() - 2);
      // Every fan triangle is non-degenerate, so the cyclic order is convex.
      const Point4& a = p.orderedVertices[0];
      for (const auto& tri : p.triangles()) {
        const Point4 u = tri.q - a;
        const Point4 v = tri.r - a;
        bool independent = false;
        for (std::size_t r = 0; r < 4; ++r) {
          for (std::size_t s = r + 1; s < 4; ++s) independent = independent || !(u[r] * v[s] - u[s] * v[r]).is_zero();
        }
        CHECK(independent);
      }
    }
  }
}

TEST_CASE("counts match the exhaustive oracle") {
  std::size_t total = 0;
  for (const auto& scene : generic_scenes(10, 14, 16, 100)) {
    const KCounts ref = arrangement_k_counts(scene);
    const KCounts got = k_counts(scene);
    CHECK(got.k2 == ref.k2);
    CHECK(got.k3 == ref.k3);
    CHECK(got.k4 == ref.k4);
    CHECK(got.byKind == ref.byKind);
    CHECK(got == ref);
    CHECK(got.k4 >= got.k3);
    total += ref.k3;
  }
  CHECK(total > 0);
}

TEST_CASE("dense cluster exercises four-tetra vertices") {
  std::size_t four = 0;
  for (const auto& scene : generic_scenes(4, 20, 40, 1)) {
    const KCounts ref = arrangement_k_counts(scene);
    CHECK(k_counts(scene) == ref);
    four += ref.byKind[static_cast<std::size_t>(VertexKind::FourTetra)];
  }
  CHECK(four > 0);
}
