#include <doctest.h>

#include <cmath>
#include <random>

#include "ub3/bounds.hpp"
#include "ub3/elimination.hpp"

using namespace ub3;

namespace {

LowerBoundFamily five_arm_family() {
  return build_lower_bound_family(5, 3, {0.30, 0.40, 0.50, 0.45, 0.35});
}

}  // namespace

TEST_CASE("gap extraction") {
  std::vector<double> m{0.1, 0.3, 0.6, 0.4};
  auto g = extract_gaps(m);
  REQUIRE(g.gaps.size() == 3);
  CHECK(g.gaps[0] == doctest::Approx(0.2));
  CHECK(g.gaps[1] == doctest::Approx(0.3));
  CHECK(g.gaps[2] == doctest::Approx(0.2));
  CHECK(g.min_gap == doctest::Approx(0.2));
  std::vector<double> flat{0.5, 0.5};
  CHECK_THROWS_AS(extract_gaps(flat), DegenerateGaps);
}

TEST_CASE("gap of a LOS instance near broadside") {
  ChannelParams params;
  params.spatial_angle = 1e-3;
  params.shadow_db = 0.0;
  auto inst = build_los_instance(params, std::uint64_t{0});
  auto g = extract_gaps(inst);
  CHECK(g.min_gap > 0);
  double brute = 1e300;
  for (int k = 2; k <= 16; ++k)
    brute = std::min(brute, std::abs(inst.mean(k) - inst.mean(k - 1)));
  CHECK(g.min_gap == brute);
}

TEST_CASE("upper bound value") {
  // 50-digit reference evaluation
  CHECK(ub3_upper_bound(1000, 16, 0.1) == doctest::Approx(3.65636294607163).epsilon(1e-12));
  CHECK(ub3_upper_bound(1000, 16, 0.2, 2.0) == ub3_upper_bound(1000, 16, 0.1, 1.0));
  CHECK(ub3_upper_bound(1000, 16, 50.0) < 1e-300);

  double T = 1000, D2 = 0.01;
  double integer_form = 2 * std::exp(-T * D2 / 18) + 2 * std::exp(-T * 16 * D2 / 32) +
                        2 * std::exp(-T * 16 * D2 / 72) + 2 * 3 * std::exp(-T * D2 / 16);
  CHECK(ub3_upper_bound(1000, 16, 0.1, 1.0, PhaseCountMode::integer) ==
        doctest::Approx(integer_form).epsilon(1e-14));
  CHECK_THROWS_AS(ub3_upper_bound(1000, 3, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(ub3_upper_bound(1000, 16, 0.0), std::invalid_argument);
}

TEST_CASE("upper bound decreases in the budget") {
  for (int K : {4, 16, 128})
    for (double D : {0.01, 0.05, 0.2}) {
      double prev = ub3_upper_bound(1, K, D);
      for (std::int64_t T = 2; T < 200000; T = T * 3 / 2 + 1) {
        double b = ub3_upper_bound(T, K, D);
        CHECK(b < prev);
        prev = b;
      }
    }
}

TEST_CASE("upper bound grows at most logarithmically in K") {
  double cap = (phase_count_real(128) - 1) / (phase_count_real(16) - 1);
  for (double D : {0.02, 0.1})
    for (std::int64_t T : {100, 1000, 10000, 100000}) {
      double ratio = ub3_upper_bound(T, 128, D) / ub3_upper_bound(T, 16, D);
      CHECK(ratio <= cap + 1e-12);
    }
}

TEST_CASE("lower-bound family") {
  auto fam = five_arm_family();
  CHECK(fam.flipped_at(2).means()[1] == doctest::Approx(0.60));
  CHECK(fam.flipped_at(3).means()[2] == 0.5);
  CHECK(fam.flipped_at(4).means()[3] == doctest::Approx(0.55));
  CHECK(fam.base.means() == fam.base.p);
  double d[] = {0.20, 0.10, 0.0, 0.05, 0.15};
  for (int k = 1; k <= 5; ++k) CHECK(fam.base.gap(k) == doctest::Approx(d[k - 1]));
  CHECK_THROWS_AS(fam.base.flip(1), InvalidProfile);
  CHECK_THROWS_AS(fam.base.flip(5), InvalidProfile);
  CHECK_THROWS_AS(fam.flipped_at(5), InvalidProfile);
}

TEST_CASE("invalid profiles are rejected") {
  CHECK_THROWS_AS(build_lower_bound_family(5, 3, {0.2, 0.4, 0.5, 0.45, 0.35}), InvalidProfile);
  CHECK_THROWS_AS(build_lower_bound_family(5, 3, {0.3, 0.4, 0.49, 0.45, 0.35}), InvalidProfile);
  CHECK_THROWS_AS(build_lower_bound_family(5, 3, {0.4, 0.3, 0.5, 0.45, 0.35}), InvalidProfile);
  CHECK_THROWS_AS(build_lower_bound_family(5, 1, {0.5, 0.4, 0.35, 0.3, 0.3}), InvalidProfile);
  CHECK_THROWS_AS(build_lower_bound_family(5, 3, {0.3, 0.5, 0.5, 0.45, 0.35}), InvalidProfile);
  CHECK_THROWS_AS(build_lower_bound_family(4, 3, {0.3, 0.4, 0.5, 0.45, 0.35}), InvalidProfile);
}

TEST_CASE("complexity terms") {
  auto fam = five_arm_family();
  CHECK(neighbour_complexity(fam.base, 2) == doctest::Approx(1 / 0.09 + 1 / 0.01));
  CHECK(neighbour_complexity(fam.base, 2) == doctest::Approx(111.11).epsilon(1e-4));
  CHECK(neighbour_complexity(fam.base, 4) == doctest::Approx(425.0));
  double h = 1 / (0.01 * (1 / 0.09 + 1 / 0.01)) + 1 / (0.0025 * 425.0);
  CHECK(flip_complexity(fam.base) == doctest::Approx(h));
}

TEST_CASE("lower bound values") {
  auto fam = five_arm_family();
  CHECK(lower_bound_value(fam, 10, LowerBoundKind::unimodal) ==
        doctest::Approx(0.02853952382413136).epsilon(1e-12));
  double prev = 1.0;
  for (std::int64_t T = 1; T < 5000; T *= 2) {
    for (auto kind : {LowerBoundKind::neighbour, LowerBoundKind::weighted,
                      LowerBoundKind::unimodal}) {
      double v = lower_bound_value(fam, T, kind);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0 / 6);
    }
    double u = lower_bound_value(fam, T, LowerBoundKind::unimodal);
    CHECK(u <= prev);
    prev = u;
  }
  CHECK(parse_lower_bound_kind("weighted") == LowerBoundKind::weighted);
  CHECK_THROWS_AS(parse_lower_bound_kind("eq3"), std::invalid_argument);
}

TEST_CASE("budget condition is monotone in the complexity") {
  auto fam = five_arm_family();
  CHECK_FALSE(lower_bound_budget_condition(fam, 10));
  CHECK(lower_bound_budget_condition(fam, 100000000));
}

TEST_CASE("property: flip complexity is at least 8/5") {
  Rng gen(8);
  std::uniform_real_distribution<double> u(0.25, 0.5);
  double smallest = 1e9;
  for (int i = 0; i < 1000; ++i) {
    int K = std::uniform_int_distribution<int>(3, 20)(gen);
    int best = std::uniform_int_distribution<int>(2, K - 1)(gen);
    std::vector<double> p(K, 0.5);
    for (int k = best - 1; k >= 1; --k) p[k - 1] = std::min(p[k], u(gen));
    for (int k = best + 1; k <= K; ++k) p[k - 1] = std::min(p[k - 2], u(gen));
    if (p[best - 2] == 0.5 || p[best] == 0.5) continue;
    auto fam = build_lower_bound_family(K, best, p);
    smallest = std::min(smallest, flip_complexity(fam.base));
  }
  // equality is attained at p = 1/4 around the peak; allow rounding
  CHECK(smallest >= 1.6 - 1e-12);
}
