#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "disco/scales.hpp"

using namespace disco;

TEST_CASE("token parsing and exact values") {
  CHECK(ScaleToken::parse("2").value() == 2.0);
  CHECK(ScaleToken::parse("sqrt2").value() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(ScaleToken::parse("2sqrt2").value() ==
        doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-15));
  CHECK(ScaleToken::parse("2^1/3").value() == doctest::Approx(std::cbrt(2.0)).epsilon(1e-15));
  CHECK(ScaleToken::parse("1.5").value() == 1.5);
  CHECK(ScaleToken::parse("sqrt4").value() == 2.0);  // perfect square folds to an integer
  CHECK(token_integer(ScaleToken::parse("sqrt4")).value() == 2);
}

TEST_CASE("token ratios stay symbolic") {
  const ScaleToken two = ScaleToken::parse("2");
  const ScaleToken rt2 = ScaleToken::parse("sqrt2");
  const ScaleToken r = token_ratio(two, rt2);
  CHECK(r == rt2);  // 2 / sqrt2 = sqrt2
  CHECK(!token_integer(r).has_value());
  CHECK(token_integer(token_ratio(ScaleToken::parse("2sqrt2"), rt2)).value() == 2);
  CHECK(token_integer(token_ratio(ScaleToken::parse("4"), two)).value() == 2);
}

TEST_CASE("sqrt2 scale set: steps, flags and kernel sizes") {
  const ScaleSet set = make_scale_set("1,sqrt2,2,2sqrt2", 3);
  REQUIRE(set.count() == 4);
  CHECK(set.step == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(set.entries[0].integer_ratio);
  CHECK(!set.entries[1].integer_ratio);
  CHECK(set.entries[2].integer_ratio);
  CHECK(set.entries[2].ratio_to_smallest == 2);
  CHECK(!set.entries[3].integer_ratio);
  CHECK(set.kernel_size(0) == 3);
  CHECK(set.kernel_size(1) == 5);  // round(3 * sqrt2) = 4, bumped to odd
  CHECK(set.kernel_size(2) == 5);  // dilation size (3-1)*2+1
  CHECK(set.kernel_size(3) == 9);  // dilation of the sqrt2 slot by 2
  CHECK(set.smallest_non_integer().value() == 1);
}

TEST_CASE("integer scale set") {
  const ScaleSet set = make_scale_set("1,2,4", 3);
  CHECK(set.step == 2.0);
  for (const auto& e : set.entries) CHECK(e.integer_ratio);
  CHECK(set.kernel_size(2) == 9);
  CHECK(!set.smallest_non_integer().has_value());
}

TEST_CASE("cube-root-of-two set") {
  const ScaleSet set = make_scale_set("1,2^1/3,2^2/3,2", 3);
  CHECK(set.step == doctest::Approx(std::cbrt(2.0)).epsilon(1e-14));
  CHECK(!set.entries[1].integer_ratio);
  CHECK(!set.entries[2].integer_ratio);
  CHECK(set.entries[3].integer_ratio);
  CHECK(set.kernel_size(1) == 5);
  CHECK(set.kernel_size(2) == 5);
  CHECK(set.kernel_size(3) == 5);
}

TEST_CASE("kernel sizes never decrease") {
  const ScaleSet set = make_scale_set("1,sqrt2,2,2sqrt2,4", 5);
  for (int k = 1; k < set.count(); ++k) CHECK(set.kernel_size(k) >= set.kernel_size(k - 1));
}

TEST_CASE("grammar errors") {
  CHECK_THROWS_AS(make_scale_set("", 3), std::invalid_argument);
  CHECK_THROWS_AS(make_scale_set("2,1", 3), std::invalid_argument);        // not increasing
  CHECK_THROWS_AS(make_scale_set("1,2,3", 3), std::invalid_argument);      // non-constant step
  CHECK_THROWS_AS(make_scale_set("1,x,2", 3), std::invalid_argument);      // bad token
  CHECK_THROWS_AS(make_scale_set("1,sqrt2,2", 4), std::invalid_argument);  // even kernel
  CHECK_THROWS_AS(ScaleToken::parse("0"), std::invalid_argument);
}

TEST_CASE("single-scale set is allowed") {
  const ScaleSet set = make_scale_set("1", 3);
  CHECK(set.count() == 1);
  CHECK(set.step == 1.0);
}

TEST_CASE("make_odd rounds up to odd") {
  CHECK(make_odd(4.0) == 5);
  CHECK(make_odd(4.243) == 5);
  CHECK(make_odd(5.0) == 5);
  CHECK(make_odd(0.7) == 1);
}
