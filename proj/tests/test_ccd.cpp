#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>

#include "doctest.h"
#include "r4/ccd.hpp"
#include "r4/scene.hpp"

using namespace r4;

namespace {

MovingTetrahedron unit_at(const Vec3& o, const Vec3& vel = {0, 0, 0}) {
  MovingTetrahedron mt;
  mt.vertices = {Vec3{o[0], o[1], o[2]}, Vec3{o[0] + 1, o[1], o[2]}, Vec3{o[0], o[1] + 1, o[2]},
                 Vec3{o[0], o[1], o[2] + 1}};
  mt.velocity = vel;
  return mt;
}

void check_witness_time(const std::vector<MovingTetrahedron>& scene, const IntersectionReport& r) {
  for (const auto& p : r.pairs) {
    const ExactScalar t = p.witness.w();
    CHECK(t >= scene[p.a].t0);
    CHECK(t <= scene[p.a].t1);
    CHECK(tetrahedra3_intersect(scene[p.a].at(t), scene[p.b].at(t)));
  }
}

}  // namespace

TEST_CASE("prism structure") {
  const MovingTetrahedron mt = unit_at({0, 0, 0}, {1, 0, 0});
  const Prism4 p = lift(mt);
  CHECK(p.facetTetrahedra.size() == 14);
  CHECK(p.boundaryTriangles.size() == 20);
  CHECK(p.edges.size() == 16);
  CHECK(p.facetHyperplanes.size() == 6);
  CHECK(p.vertices[5] == Point4(2, 0, 0, 1));
  // Every facet tetrahedron lies in one facet hyperplane; all vertices inside.
  for (const auto& t : p.facetTetrahedra) {
    int on = 0;
    for (const auto& h : p.facetHyperplanes) {
      bool all = true;
      for (const auto& v : t.vertices()) {
        ExactScalar val = -h.offset;
        for (std::size_t i = 0; i < 4; ++i) val += h.coeffs[i] * v[i];
        all = all && val.is_zero();
      }
      on += all;
    }
    CHECK(on == 1);
  }
  for (const auto& v : p.vertices) CHECK(p.contains(v));
  // Soundness on sampled points: (x, t) is in the prism iff x is in the
  // tetrahedron at time t.
  for (int i = 0; i <= 8; ++i) {
    const ExactScalar t(i - 2, 4);
    for (int dx = -1; dx <= 4; ++dx) {
      const Point4 x(ExactScalar(dx, 3) + t, ExactScalar(1, 4), ExactScalar(1, 5), t);
      const bool inside_time = t >= ExactScalar(0) && t <= ExactScalar(1);
      const bool inside_space = ExactScalar(dx, 3) >= ExactScalar(0) &&
                                ExactScalar(dx, 3) + ExactScalar(1, 4) + ExactScalar(1, 5) <= ExactScalar(1);
      CHECK(p.contains(x) == (inside_time && inside_space));
    }
  }
}

TEST_CASE("constructed fixtures") {
  const std::vector<MovingTetrahedron> identical{unit_at({0, 0, 0}), unit_at({0, 0, 0})};
  const auto a = detect_collisions(identical, QueryMode::Report);
  REQUIRE(a.pairs.size() == 1);
  CHECK(a.pairs[0].witness.w() == ExactScalar(0));
  check_witness_time(identical, a);

  const std::vector<MovingTetrahedron> apart{unit_at({0, 0, 0}), unit_at({10, 0, 0})};
  CHECK_FALSE(detect_collisions(apart, QueryMode::Detect).detected);

  const std::vector<MovingTetrahedron> fly{unit_at({0, 0, 0}), unit_at({5, 0, 0}, {-10, 0, 0})};
  const auto c = detect_collisions(fly, QueryMode::Report);
  REQUIRE(c.pairs.size() == 1);
  check_witness_time(fly, c);
  // At the endpoints of the window the tetrahedra are apart.
  CHECK_FALSE(tetrahedra3_intersect(fly[0].at(0), fly[1].at(0)));
  CHECK_FALSE(tetrahedra3_intersect(fly[0].at(1), fly[1].at(1)));
}

TEST_CASE("nested prisms are found by containment") {
  MovingTetrahedron big = unit_at({-5, -5, -5});
  for (auto& v : big.vertices) {
    for (auto& c : v) c = c * ExactScalar(20) + ExactScalar(90);
  }
  const std::vector<MovingTetrahedron> scene{big, unit_at({-9, -9, -9})};
  const auto r = detect_collisions(scene, QueryMode::Report, {1, 7});
  REQUIRE(r.count == 1);
  check_witness_time(scene, r);
}

TEST_CASE("divide and conquer matches the oracle") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto scene = generate_scene(SceneKind::MovingTetrahedra, 8 + seed, 6, seed).moving();
    const auto ref = ccd_oracle(scene, QueryMode::Report);
    for (std::size_t threshold : {std::size_t{3}, std::size_t{32}}) {
      CcdOptions opt;
      opt.oracleThreshold = threshold;
      for (QueryMode mode : {QueryMode::Detect, QueryMode::Count, QueryMode::Report}) {
        CHECK(detect_collisions(scene, mode, opt) == ccd_oracle(scene, mode));
      }
    }
    check_witness_time(scene, ref);
    MESSAGE("seed " << seed << " collisions " << ref.count);
  }
}

TEST_CASE("pair set is independent of input order") {
  auto scene = generate_scene(SceneKind::MovingTetrahedra, 15, 8, 99).moving();
  const auto r = detect_collisions(scene, QueryMode::Report, {4, 1});
  std::vector<std::size_t> perm(scene.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = perm.size() - 1 - i;
  std::vector<MovingTetrahedron> rev;
  for (std::size_t i : perm) rev.push_back(scene[i]);
  const auto s = detect_collisions(rev, QueryMode::Report, {4, 1});
  std::set<std::pair<std::size_t, std::size_t>> a, b;
  for (const auto& p : r.pairs) a.insert({p.a, p.b});
  for (const auto& p : s.pairs) b.insert({std::min(perm[p.a], perm[p.b]), std::max(perm[p.a], perm[p.b])});
  CHECK(a == b);
}
