#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "disco/complexity.hpp"

using namespace disco;

TEST_CASE("analytic counts for the sqrt2 ladder, frozen example") {
  // N_s = 4, sigma = sqrt2, W = 3
  CHECK(analytic_dense_macs(3, 2.0, 4) == 135.0);  // 9 * (1 + 2 + 4 + 8)
  CHECK(analytic_sparse_macs(3, 4) == 36.0);
  CHECK(analytic_speedup(2.0, 4) == 4.0);  // 2^4 / 4
}

TEST_CASE("speedup formula edge: a single scale") {
  CHECK(analytic_speedup(2.0, 1) == 2.0);
}

TEST_CASE("sqrt2 step squares to exactly 2 through the scale set") {
  const ScaleSet set = make_scale_set("1,sqrt2,2,2sqrt2", 3);
  CHECK(set.step_squared == 2.0);
  for (int ns = 1; ns <= 5; ++ns) {
    const double expect = std::pow(2.0, ns) / ns;  // integer power: exact
    CHECK(analytic_speedup(set.step_squared, ns) == expect);
  }
}

TEST_CASE("bench profile: counts, agreement, and measurable speedup") {
  const ScaleSet set = make_scale_set("1,sqrt2,2,2sqrt2", 3);
  const ComplexityProfile p = run_complexity_bench(set, 64, 3);
  CHECK(p.analytic_speedup == 4.0);
  CHECK(p.analytic_dense_macs == 135.0);
  CHECK(p.discrete_sparse_macs == 4 * 9);
  // actual kernel grids: 3, 5, 5, 9 per side
  CHECK(p.discrete_dense_macs == 9 + 25 + 25 + 81);
  CHECK(p.discrete_sparse_macs <= p.discrete_dense_macs);
  CHECK(p.dense_ms > 0.0);
  CHECK(p.sparse_ms > 0.0);
  CHECK(p.measured_speedup > 1.2);
  CHECK(p.measured_speedup < 2.0 * p.analytic_speedup);
}

TEST_CASE("measured speedup grows with the number of scales") {
  const ComplexityProfile small = run_complexity_bench(make_scale_set("1,sqrt2", 3), 64, 3);
  const ComplexityProfile large =
      run_complexity_bench(make_scale_set("1,sqrt2,2,2sqrt2,4", 3), 64, 3);
  CHECK(large.measured_speedup > small.measured_speedup);
}

TEST_CASE("bench rejects undersized feature maps") {
  const ScaleSet set = make_scale_set("1,sqrt2,2,2sqrt2", 3);
  CHECK_THROWS_AS(run_complexity_bench(set, 8, 1), std::invalid_argument);
}
