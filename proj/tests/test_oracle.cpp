#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "r4/oracle.hpp"
#include "test_util.hpp"

using namespace r4;

namespace {

const Point4 O(0, 0, 0, 0);
const Tetrahedron4 kStd{Point4(1, 0, 0, 0), Point4(0, 1, 0, 0), Point4(0, 0, 1, 0), Point4(0, 0, 0, 1)};

struct SegScene {
  std::vector<Segment4> segs;
  std::vector<Tetrahedron4> tets;
};

SegScene random_seg_scene(std::uint64_t seed, std::size_t n, std::size_t m) {
  std::mt19937_64 rng(seed);
  SegScene s;
  for (std::size_t i = 0; i < m; ++i) s.tets.push_back(r4test::random_tetra(rng));
  for (std::size_t i = 0; i < n; ++i) {
    const auto v = s.tets[rng() % m].vertices();
    s.segs.push_back(r4test::segment_near(rng, {v.begin(), v.end()}));
  }
  return s;
}

// Second brute force over a different code path: one phase-one LP per pair.
std::size_t lp_count(const SegScene& s) {
  std::size_t c = 0;
  for (const auto& e : s.segs) {
    for (const auto& t : s.tets) c += convex_hulls_intersect({e.a, e.b}, tetra_points(t)).has_value();
  }
  return c;
}

}  // namespace

TEST_CASE("seg_tetra_query basics") {
  CHECK(seg_tetra_query({}, {kStd}, QueryMode::Count) == IntersectionReport{});
  const Segment4 hit{O, Point4(1, 1, 1, 1)};
  const auto r = seg_tetra_query({hit}, {kStd}, QueryMode::Report);
  CHECK(r.count == 1);
  REQUIRE(r.pairs.size() == 1);
  CHECK(r.pairs[0].witness == Point4(ExactScalar(1, 4), ExactScalar(1, 4), ExactScalar(1, 4), ExactScalar(1, 4)));
  const auto rev = tetra_seg_query({kStd}, {hit}, QueryMode::Report);
  CHECK(rev.pairs == r.pairs);
}

TEST_CASE("seg_tetra_query matches LP brute force and mode relations") {
  for (std::uint64_t seed : {1, 2, 3}) {
    const SegScene s = random_seg_scene(seed, 50, 50);
    const auto count = seg_tetra_query(s.segs, s.tets, QueryMode::Count);
    const auto report = seg_tetra_query(s.segs, s.tets, QueryMode::Report);
    const auto detect = seg_tetra_query(s.segs, s.tets, QueryMode::Detect);
    CHECK(count.count == lp_count(s));
    CHECK(report.count == report.pairs.size());
    CHECK(count.count == report.count);
    CHECK(detect.detected == (count.count > 0));
    CHECK(std::is_sorted(report.pairs.begin(), report.pairs.end(), [](const auto& a, const auto& b) {
      return std::pair(a.a, a.b) < std::pair(b.a, b.b);
    }));
    CHECK(tetra_seg_query(s.tets, s.segs, QueryMode::Count).count == count.count);
  }
}

TEST_CASE("tri_tri_query") {
  const Triangle4 t1{O, Point4(2, 0, 0, 0), Point4(0, 2, 0, 0)};
  const ExactScalar h(1, 2);
  const Triangle4 t2{Point4(h, h, 1, 0), Point4(h, h, -1, 1), Point4(h, h, -1, -1)};
  CHECK(tri_tri_query({t1}, {t2}, QueryMode::Count).count == 1);
  const Point4 shift(100, 0, 0, 0);
  CHECK(tri_tri_query({t1}, {{t1.p + shift, t1.q + shift, t1.r + shift}}, QueryMode::Count).count == 0);
  std::mt19937_64 rng(9);
  std::vector<Triangle4> red, blue;
  for (int i = 0; i < 50; ++i) red.push_back(r4test::random_triangle(rng, 5));
  for (int i = 0; i < 50; ++i) blue.push_back(r4test::random_triangle(rng, 5));
  std::size_t lp = 0;
  for (const auto& a : red) {
    for (const auto& b : blue) {
      const auto va = a.vertices();
      const auto vb = b.vertices();
      lp += common_point({{va.begin(), va.end()}, {vb.begin(), vb.end()}}).has_value();
    }
  }
  const auto r = tri_tri_query(red, blue, QueryMode::Count);
  CHECK(r.count == lp);
  CHECK(r.count > 0);
}

TEST_CASE("line_2flat_query") {
  const Triangle4 xy{O, Point4(1, 0, 0, 0), Point4(0, 1, 0, 0)};
  const auto r = line_2flat_query({{Point4(1, 2, 0, 0), Point4(1, 2, 1, 1)},
                                   {Point4(0, 0, 0, 1), Point4(1, 0, 0, 1)},
                                   {O, Point4(3, 1, 0, 0)}},
                                  {xy}, QueryMode::Report);
  REQUIRE(r.count == 2);
  CHECK(r.pairs[0].a == 0);
  CHECK(r.pairs[0].witness == Point4(1, 2, 0, 0));
  CHECK(r.pairs[1].a == 2);
  CHECK(r.pairs[1].witness == O);
}

TEST_CASE("ray_shoot") {
  const auto hit = ray_shoot(O, Point4(1, 1, 1, 1), {kStd});
  REQUIRE(hit);
  CHECK(hit->index == 0);
  CHECK(hit->point == Point4(ExactScalar(1, 4), ExactScalar(1, 4), ExactScalar(1, 4), ExactScalar(1, 4)));
  CHECK_FALSE(ray_shoot(O, Point4(-1, -1, -1, -1), {kStd}));
  // In-hyperplane ray entering through a facet.
  const auto inplane = ray_shoot(Point4(2, -1, 0, 0), Point4(-1, 1, 0, 0), {kStd});
  REQUIRE(inplane);
  CHECK(inplane->t == ExactScalar(1));
  // Random scenes: the returned parameter is minimal over every tetrahedron.
  std::mt19937_64 rng(31);
  for (int it = 0; it < 30; ++it) {
    std::vector<Tetrahedron4> ts;
    for (int i = 0; i < 15; ++i) ts.push_back(r4test::random_tetra(rng));
    const Point4 o = r4test::random_point(rng, -10, 10);
    const Point4 d = r4test::random_point(rng, -3, 3);
    if (d == O) continue;
    const auto best = ray_shoot(o, d, ts);
    const Segment4 far{o, o + ExactScalar(1000) * d};
    std::optional<ExactScalar> min_t;
    std::size_t min_i = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const auto w = segment_tetra_direct(far, ts[i]);
      if (!w) continue;
      // Generic position: the hit is the unique transversal point.
      std::size_t axis = 0;
      while (d[axis].is_zero()) ++axis;
      const ExactScalar t = ((*w)[axis] - o[axis]) / d[axis];
      if (!min_t || t < *min_t) {
        min_t = t;
        min_i = i;
      }
    }
    REQUIRE(best.has_value() == min_t.has_value());
    if (best) {
      CHECK(best->t == *min_t);
      CHECK(best->index == min_i);
    }
  }
}

TEST_CASE("arrangement_k_counts basics") {
  std::vector<Tetrahedron4> disjoint;
  for (int i = 0; i < 5; ++i) {
    const Point4 off(10 * i, 0, 0, 0);
    disjoint.push_back({kStd.v0 + off, kStd.v1 + off, kStd.v2 + off, kStd.v3 + off});
  }
  const KCounts z = arrangement_k_counts(disjoint);
  CHECK(z.k2 == 0);
  CHECK(z.k3 == 0);
  CHECK(z.k4 == 0);
  std::mt19937_64 rng(12);
  std::vector<Tetrahedron4> ts;
  for (int i = 0; i < 12; ++i) ts.push_back(r4test::random_tetra(rng, 6));
  const KCounts k = arrangement_k_counts(ts);
  CHECK(k.k2 > 0);
  CHECK(k.k4 >= k.k3);
  CHECK(k.k4 >= k.k2);
  CHECK(k.byKind[0] + k.byKind[1] + k.byKind[2] + k.byKind[3] == k.k4);
  // Every triple contributes at least two face-tetra-tetra vertices.
  CHECK(k.byKind[2] >= 2 * k.k3);
  for (const auto& v : k.vertices) {
    for (std::size_t t : v.tetra) CHECK(common_point({tetra_points(ts[t]), {v.point}}).has_value());
  }
}
