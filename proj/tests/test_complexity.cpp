#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "r4/complexity.hpp"

using namespace r4;

TEST_CASE("tradeoff formula") {
  CHECK(q_tradeoff_exponent(ExactScalar(2)) == ExactScalar(1, 2));
  CHECK(q_tradeoff_exponent(ExactScalar(1)) == ExactScalar(5, 6));
  CHECK(q_tradeoff_exponent(ExactScalar(6)) == ExactScalar(0));
  CHECK(q_tradeoff_exponent(ExactScalar(3, 2)) == ExactScalar(2, 3));
  // Both branches agree at the breakpoint.
  CHECK(ExactScalar(7, 6) - ExactScalar(2) / ExactScalar(3) == ExactScalar(3, 4) - ExactScalar(2) / ExactScalar(8));
  CHECK_THROWS_AS(q_tradeoff_exponent(0.5), std::out_of_range);
  CHECK_THROWS_AS(q_tradeoff_exponent(ExactScalar(13, 2)), std::out_of_range);
  double prev = q_tradeoff_exponent(1.0);
  for (int i = 1; i <= 500; ++i) {
    const double q = q_tradeoff_exponent(1 + i / 100.0);
    CHECK(q <= prev + 1e-12);
    CHECK(std::fabs(q - prev) < 0.004);
    prev = q;
  }
}

TEST_CASE("batched exponents") {
  CHECK(batched_cost_exponent(ExactScalar(1)).exponent == ExactScalar(13, 8));
  CHECK(batched_cost_exponent(ExactScalar(1)).firstDominates);
  const auto b = batched_cost_exponent(ExactScalar(3, 2));
  CHECK(b.first == ExactScalar(2));
  CHECK(b.second == ExactScalar(2));
  CHECK(batched_cost_exponent(ExactScalar(0)).exponent == ExactScalar(1));
  CHECK_FALSE(batched_cost_exponent(ExactScalar(2)).firstDominates);
  CHECK(batched_breakpoint() == ExactScalar(3, 2));
}

TEST_CASE("leaf size and stopping parameter") {
  CHECK(leaf_size(1000, 1000) == doctest::Approx(1000));
  CHECK(leaf_size(100, 1e12) == doctest::Approx(1));
  CHECK(stop_r_omega(1e3, 1e9, 0) == doctest::Approx(std::pow(1e6, 1.2)));
  CHECK(stop_r_omega(1e3, 1e9, 1e-9) == doctest::Approx(stop_r_omega(1e3, 1e9, 0)));
  CHECK(stop_r_omega(1e3, 1e9, 0.1) < stop_r_omega(1e3, 1e9, 0));
  CHECK_THROWS(leaf_size(100, 10));
}

TEST_CASE("cost model validation") {
  CHECK_NOTHROW(CostModel{}.validate());
  CostModel m;
  m.r0 = 31;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  m = {};
  m.delta = ExactScalar(1, 6);
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  m = {};
  m.D = 1;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
}

TEST_CASE("wide recurrences") {
  const RecurrenceFit f = unfold_wide();
  CHECK(f.storage.exponent == doctest::Approx(2).epsilon(0.025));
  CHECK(f.query.exponent == doctest::Approx(0.5).epsilon(0.1));
  MESSAGE("S0 " << f.storage.exponent << " (raw " << f.storageRaw.exponent << ") Q0 " << f.query.exponent
                << " (raw " << f.queryRaw.exponent << ")");
  // Base clause: below the cutoff the cost is N itself.
  const Unfolding base = wide_storage(100, 1e6);  // cutoff = 1
  CHECK(base.levels.size() > 1);
  const Unfolding leaf = wide_query(16, 16 * 16 / 64.0);  // cutoff 64/2 > 16
  REQUIRE(leaf.levels.size() == 1);
  CHECK(leaf.raw == doctest::Approx(16));
  // Monotone in n. The raw query sum dips when the recursion gains a level,
  // since the bottom subproblems shrink by r0 at once.
  long double ps = 0, pq = 0;
  for (int k = 4; k <= 30; ++k) {
    const long double n = std::exp2(static_cast<long double>(k));
    const Unfolding s = wide_storage(n, n * n);
    const Unfolding q = wide_query(n, n * n);
    CHECK(s.raw >= ps);
    CHECK(q.normalized >= pq);
    ps = s.raw;
    pq = q.normalized;
  }
}

TEST_CASE("main recurrences") {
  const RecurrenceFit f = unfold_main();
  CHECK(std::fabs(f.storage.exponent - 2) <= 0.05);
  CHECK(std::fabs(f.query.exponent - 0.5) <= 0.05);
  const RecurrenceFit no1 = unfold_main({}, 10, 64, false);
  CHECK(no1.storage.exponent <= 2 + 0.05);
  CostModel wide;
  wide.D = 16;
  const RecurrenceFit g = unfold_main(wide);
  CHECK(std::fabs(g.storage.exponent - f.storage.exponent) < 0.02);
  CHECK(std::fabs(g.query.exponent - f.query.exponent) < 0.02);
  MESSAGE("S " << f.storage.exponent << " (raw " << f.storageRaw.exponent << ") Q " << f.query.exponent << " (raw "
               << f.queryRaw.exponent << ")");
}

TEST_CASE("premature stopping matches the tradeoff") {
  CHECK(unfold_premature(2).exponent == doctest::Approx(0.5).epsilon(0.02));
  CHECK(std::fabs(unfold_premature(6).exponent) <= 0.02);
  for (const auto& t : tradeoff_curve(0.1)) CHECK(std::fabs(t.premature - t.exponent) <= 0.02);
  CHECK(std::fabs(premature_breakpoint() - 2) <= 0.1);
}
