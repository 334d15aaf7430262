#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "r4/rangetree.hpp"
#include "test_util.hpp"

using namespace r4;

namespace {

const std::vector<ExactScalar> kSigmas{ExactScalar(1), ExactScalar(3, 2), ExactScalar(2), ExactScalar(3),
                                       ExactScalar(6)};
const QueryMode kModes[] = {QueryMode::Detect, QueryMode::Count, QueryMode::Report};

struct Scene {
  std::vector<Segment4> segs;
  std::vector<Tetrahedron4> tets;
};

Scene seg_scene(std::uint64_t seed, std::size_t nseg, std::size_t ntet, int range = 10) {
  std::mt19937_64 rng(seed);
  Scene s;
  for (std::size_t i = 0; i < ntet; ++i) s.tets.push_back(r4test::random_tetra(rng, range));
  for (std::size_t i = 0; i < nseg; ++i) {
    const auto v = s.tets[rng() % ntet].vertices();
    s.segs.push_back(r4test::segment_near(rng, {v.begin(), v.end()}, range));
  }
  return s;
}

std::vector<Triangle4> tri_set(std::mt19937_64& rng, std::size_t n, int range = 6) {
  std::vector<Triangle4> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(r4test::random_triangle(rng, range));
  return out;
}

std::vector<ExactScalar> random_vec(std::mt19937_64& rng, std::size_t d, int range) {
  std::uniform_int_distribution<int> num(-range * 8, range * 8);
  std::vector<ExactScalar> v;
  for (std::size_t i = 0; i < d; ++i) v.emplace_back(num(rng), 8);
  return v;
}

}  // namespace

TEST_CASE("storage budget and leaf cutoff") {
  CHECK(leaf_cutoff(4096, mpz_class(4096) * 4096) == 777);
  const auto b = StorageBudget::with_sigma(10, ExactScalar(6));
  CHECK(b.s == 1000000);
  CHECK(b.leafCutoff == 1);
  CHECK(StorageBudget::with_sigma(10, ExactScalar(1)).leafCutoff == 10);
  CHECK(storage_for_sigma(10, ExactScalar(3, 2)) == 32);  // ceil(31.62)
  CHECK(StorageBudget::with_s(1, 1).leafCutoff == 1);
  CHECK_THROWS_AS(StorageBudget::with_s(10, 9), BudgetOutOfRange);
  CHECK_THROWS_AS(StorageBudget::with_s(10, mpz_class(1000001)), BudgetOutOfRange);
  CHECK_THROWS_AS(StorageBudget::with_sigma(10, ExactScalar(13, 2)), BudgetOutOfRange);
  CHECK(batched_storage(100, 100) == storage_for_sigma(100, ExactScalar(12, 7)));
}

TEST_CASE("range polynomials agree with direct orientation") {
  std::mt19937_64 rng(11);
  for (int it = 0; it < 100; ++it) {
    const Point4 a = r4test::random_point(rng, -9, 9), b = r4test::random_point(rng, -9, 9);
    if (a == b) continue;
    const Pluecker10 line = line_pluecker(a, b);
    const auto x = random_vec(rng, 6, 4);
    // Anchor points of the parametrized 2-plane.
    const Point4 p0(0, 0, x[0], x[1]), p1(0, 1, x[2], x[3]), p2(1, 1, x[4], x[5]);
    const Sign ref = dot_sign(line, plane_dual(p0, p1, p2));
    CHECK(twoplane_range(line).eval(x).sign() == ref);

    const Triangle4 t = r4test::random_triangle(rng);
    const Pluecker10 dual = plane_dual(t.p, t.q, t.r);
    const Point4 l0(x[0], x[1], x[2], 0), l1(x[3], x[4], x[5], 1);
    CHECK(line_range(dual).eval(x).sign() == dot_sign(line_pluecker(l0, l1), dual));
  }
}

TEST_CASE("classify_box is conservative") {
  std::mt19937_64 rng(5);
  int inside = 0, outside = 0;
  for (int it = 0; it < 1000; ++it) {
    const Point4 a = r4test::random_point(rng, -9, 9), b = r4test::random_point(rng, -9, 9);
    if (a == b) continue;
    const RangePoly p = twoplane_range(line_pluecker(a, b));
    auto lo = random_vec(rng, 6, 3);
    auto hi = lo;
    std::uniform_int_distribution<int> w(0, it % 2 ? 2 : 16);
    for (auto& h : hi) h += ExactScalar(w(rng), 8);
    const Sign want = it % 3 == 0 ? Sign::Neg : Sign::Pos;
    const BoxClass c = classify_box(p, lo, hi, want);
    inside += c == BoxClass::Inside;
    outside += c == BoxClass::Outside;
    if (c == BoxClass::Crossing) continue;
    // Corners plus random interior points.
    for (int sample = 0; sample < 64 + 16; ++sample) {
      std::vector<ExactScalar> x(6);
      for (int i = 0; i < 6; ++i) {
        if (sample < 64) {
          x[i] = (sample >> i) & 1 ? hi[i] : lo[i];
        } else {
          std::uniform_int_distribution<int> f(0, 16);
          x[i] = lo[i] + (hi[i] - lo[i]) * ExactScalar(f(rng), 16);
        }
      }
      const Sign s = p.eval(x).sign();
      if (c == BoxClass::Inside) {
        CHECK(s == want);
      } else {
        CHECK(s != want);
      }
    }
  }
  CHECK(inside > 0);
  CHECK(outside > 0);
  // The zero set is never reported inside.
  const RangePoly p = twoplane_range(line_pluecker(Point4(0, 0, 0, 0), Point4(1, 2, 3, 4)));
  std::vector<ExactScalar> lo(6, ExactScalar(0)), hi(6, ExactScalar(0));
  CHECK(classify_box(p, lo, hi, Sign::Zero) != BoxClass::Inside);
}

TEST_CASE("segment queries on tetrahedra match the oracle") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const Scene s = seg_scene(seed, 30, 40);
    for (const auto& sigma : kSigmas) {
      const auto st = MultiLevelStructure::build_tetrahedra(s.tets, StorageBudget::with_sigma(s.tets.size(), sigma), seed);
      CHECK(st.max_leaf_size() <= st.budget().leafCutoff);
      for (QueryMode mode : kModes) {
        CHECK(st.query_all(s.segs, mode).report == seg_tetra_query(s.segs, s.tets, mode));
      }
    }
  }
}

TEST_CASE("tetrahedron queries on segments match the oracle") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const Scene s = seg_scene(seed + 100, 40, 30);
    for (const auto& sigma : kSigmas) {
      const auto st = MultiLevelStructure::build_segments(s.segs, StorageBudget::with_sigma(s.segs.size(), sigma), seed);
      for (QueryMode mode : kModes) {
        CHECK(st.query_all(s.tets, mode).report == tetra_seg_query(s.tets, s.segs, mode));
      }
    }
  }
}

TEST_CASE("triangle queries match the oracle") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    std::mt19937_64 rng(seed);
    const auto red = tri_set(rng, 25), blue = tri_set(rng, 35);
    for (const auto& sigma : kSigmas) {
      const auto st = MultiLevelStructure::build_triangles(blue, StorageBudget::with_sigma(blue.size(), sigma), seed);
      for (QueryMode mode : kModes) CHECK(st.query_all(red, mode).report == tri_tri_query(red, blue, mode));
    }
  }
}

TEST_CASE("line queries on 2-flats match the oracle") {
  std::mt19937_64 rng(9);
  const auto flats = tri_set(rng, 40, 3);
  std::vector<Segment4> lines;
  for (int i = 0; i < 30; ++i) {
    // Lines through a point of some flat meet it; random ones mostly miss.
    const Triangle4& f = flats[rng() % flats.size()];
    const Point4 d = r4test::random_point(rng, -3, 3);
    const Point4 base = i % 2 ? f.p : r4test::random_point(rng, -3, 3);
    if (d == Point4(0, 0, 0, 0)) continue;
    lines.push_back({base, base + d});
  }
  // A contained line.
  lines.push_back({flats[0].p, flats[0].q});
  for (const auto& sigma : kSigmas) {
    const auto st = MultiLevelStructure::build_flats(flats, StorageBudget::with_sigma(flats.size(), sigma));
    for (QueryMode mode : kModes) CHECK(st.query_all(lines, mode).report == line_2flat_query(lines, flats, mode));
  }
}

TEST_CASE("degenerate inputs go through the direct solver") {
  // Shared vertices, coplanar pieces and horizontal segments.
  const Tetrahedron4 t{Point4(0, 0, 0, 0), Point4(4, 0, 0, 0), Point4(0, 4, 0, 0), Point4(0, 0, 4, 4)};
  const Tetrahedron4 u{Point4(0, 0, 0, 0), Point4(0, 0, 0, 4), Point4(4, 4, 0, 0), Point4(1, 0, 3, 1)};
  std::vector<Tetrahedron4> tets{t, u};
  std::vector<Segment4> segs{{Point4(0, 0, 0, 0), Point4(1, 1, 1, 1)},
                             {Point4(1, 1, 0, 0), Point4(2, 1, 0, 0)},
                             {Point4(-1, 0, 0, 0), Point4(5, 0, 0, 0)},
                             {Point4(1, 1, 1, -2), Point4(1, 1, 1, 3)}};
  for (const auto& sigma : kSigmas) {
    const auto a = MultiLevelStructure::build_tetrahedra(tets, StorageBudget::with_sigma(2, sigma));
    const auto b = MultiLevelStructure::build_segments(segs, StorageBudget::with_sigma(segs.size(), sigma));
    for (QueryMode mode : kModes) {
      CHECK(a.query_all(segs, mode).report == seg_tetra_query(segs, tets, mode));
      CHECK(b.query_all(tets, mode).report == tetra_seg_query(tets, segs, mode));
    }
  }
  CHECK(MultiLevelStructure::build_segments(segs, StorageBudget::with_sigma(4, ExactScalar(1))).residual_count() == 2);
}

TEST_CASE("skew triangle planes sharing a direction never intersect") {
  // Both planes contain the x direction but are offset in w.
  const std::vector<Triangle4> red{{Point4(0, 0, 0, 0), Point4(3, 0, 0, 0), Point4(0, 3, 0, 1)}};
  const std::vector<Triangle4> blue{{Point4(0, 0, 1, 2), Point4(3, 0, 1, 2), Point4(1, 0, 4, 5)},
                                    {Point4(1, 1, -1, 0), Point4(1, 1, 1, 1), Point4(1, -1, 0, -1)}};
  const auto st = MultiLevelStructure::build_triangles(blue, StorageBudget::with_sigma(2, ExactScalar(2)));
  for (QueryMode mode : kModes) CHECK(st.query_all(red, mode).report == tri_tri_query(red, blue, mode));
}

TEST_CASE("single object and determinism") {
  const Scene s = seg_scene(77, 20, 1);
  const auto st = MultiLevelStructure::build_tetrahedra(s.tets, StorageBudget::with_s(1, 1));
  CHECK(st.node_count() >= 1);
  CHECK(st.query_all(s.segs, QueryMode::Report).report == seg_tetra_query(s.segs, s.tets, QueryMode::Report));

  const Scene big = seg_scene(78, 30, 60);
  const auto budget = StorageBudget::with_sigma(60, ExactScalar(2));
  const auto x = MultiLevelStructure::build_tetrahedra(big.tets, budget, 3);
  const auto y = MultiLevelStructure::build_tetrahedra(big.tets, budget, 3);
  const auto rx = x.query_all(big.segs, QueryMode::Report);
  const auto ry = y.query_all(big.segs, QueryMode::Report);
  CHECK(rx.report == ry.report);
  CHECK(rx.stats == ry.stats);
}

TEST_CASE("leaf scanning shrinks as storage grows") {
  const Scene s = seg_scene(5, 40, 150);
  std::uint64_t prev = ~std::uint64_t{0};
  for (const auto& sigma : kSigmas) {
    const auto st = MultiLevelStructure::build_tetrahedra(s.tets, StorageBudget::with_sigma(s.tets.size(), sigma));
    const auto r = st.query_all(s.segs, QueryMode::Count);
    MESSAGE("sigma " << sigma.str() << " leaf " << st.budget().leafCutoff << " scanned " << r.stats.leafItemsScanned
                     << " nodes " << st.node_count());
    CHECK(r.stats.leafItemsScanned <= prev);
    prev = r.stats.leafItemsScanned;
  }
}

TEST_CASE("batched red-blue triangles") {
  std::mt19937_64 rng(21);
  const auto red = tri_set(rng, 30), blue = tri_set(rng, 30);
  const auto r = batched_tri_tri(red, blue, QueryMode::Report);
  CHECK_FALSE(r.usedOracle);
  CHECK(r.s == storage_for_sigma(30, ExactScalar(12, 7)));
  CHECK(r.report == tri_tri_query(red, blue, QueryMode::Report));
  const std::vector<Triangle4> one{red[0]};
  const auto lopsided = batched_tri_tri(one, tri_set(rng, 100), QueryMode::Count);
  CHECK(lopsided.usedOracle);
}
