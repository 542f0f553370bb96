#include <doctest.h>

#include <cmath>
#include <random>

#include "ub3/channel.hpp"
#include "ub3/elimination.hpp"

using namespace ub3;

namespace {

std::vector<double> tent(int K, int peak) {
  std::vector<double> m(K);
  for (int k = 1; k <= K; ++k) m[k - 1] = std::exp(-0.1 * std::abs(k - peak));
  return m;
}

}  // namespace

TEST_CASE("phase counts") {
  CHECK(phase_count_real(16) == doctest::Approx(4.12853387405436).epsilon(1e-13));
  CHECK(phase_count(2) == 0);
  CHECK(phase_count(3) == 0);
  CHECK(phase_count(4) == 1);
  CHECK(phase_count(8) == 3);
  CHECK(phase_count(16) == 5);
  CHECK(phase_count(64) == 8);
  CHECK(phase_count(128) == 10);
  for (int K = 4; K <= 1000; ++K)
    CHECK(phase_count(K) == static_cast<int>(std::ceil(phase_count_real(K))));
}

TEST_CASE("phase shares are exact fractions") {
  auto f = phase_share(1, 5);
  CHECK(f.num == 8);
  CHECK(f.den == 81);
  CHECK(phase_share(6, 5).num == 1);
  CHECK(phase_share(6, 5).den == 3);
  CHECK(phase_share(2, 1).num == 1);
  CHECK(phase_share(2, 1).den == 2);
  CHECK_THROWS_AS(phase_share(7, 5), std::out_of_range);
}

TEST_CASE("schedule identity holds for every phase count") {
  for (int L = 1; L <= 30; ++L) CHECK(std::abs(schedule_share_sum(L) - 1.0) < 1e-12);
}

TEST_CASE("schedule for T1=900, K=16") {
  auto s = build_schedule(900, 16);
  CHECK(s.phases == 5);
  CHECK(s.per_phase == std::vector<std::int64_t>{88, 88, 88, 132, 200, 304});
  CHECK(s.total() == 900);
}

TEST_CASE("three-phase schedule with T1=81") {
  // K=8 gives three elimination phases; shares 2/9, 2/9, 2/9, 1/3
  CHECK(phase_count(8) == 3);
  std::int64_t pre = 0;
  for (int l = 1; l <= 4; ++l) {
    auto f = phase_share(l, 3);
    CHECK((81 * f.num) % f.den == 0);
    pre += 81 * f.num / f.den;
  }
  CHECK(pre == 81);
  CHECK(81 * phase_share(1, 3).num / phase_share(1, 3).den * 2 == 36);
  auto s = build_schedule(81, 8);
  CHECK(s.total() == 81);
}

TEST_CASE("exact-division budgets reproduce the shares without rounding") {
  auto s = build_schedule(324, 8);
  CHECK(s.per_phase == std::vector<std::int64_t>{72, 72, 72, 108});
  CHECK(s.remainder == 0);
}

TEST_CASE("schedule invariants over random budgets") {
  Rng gen(9);
  Ub3Policy p;
  for (int i = 0; i < 500; ++i) {
    int K = std::uniform_int_distribution<int>(4, 300)(gen);
    auto T1 = std::uniform_int_distribution<std::int64_t>(p.min_budget(K), 50000)(gen);
    auto s = build_schedule(T1, K);
    INFO("K=", K, " T1=", T1);
    CHECK(s.total() == T1);
    CHECK(static_cast<int>(s.per_phase.size()) == s.phases + 1);
    for (int l = 0; l < s.phases; ++l) CHECK(s.per_phase[l] % 4 == 0);
    if (s.phases >= 2) CHECK(s.per_phase[0] == s.per_phase[1]);
    CHECK(s.terminal() >= 3);
  }
}

TEST_CASE("budgets below the minimum are rejected") {
  Ub3Policy p;
  for (int K : {4, 5, 16, 64, 128}) {
    auto lo = p.min_budget(K);
    CHECK_NOTHROW(build_schedule(lo, K));
    CHECK_THROWS_AS(build_schedule(lo - 1, K), BudgetTooSmall);
  }
  CHECK_THROWS_AS(build_schedule(1000, 3), KTooSmall);
}

TEST_CASE("terminal window bound") {
  CHECK(terminal_window_bound(3) == 3);
  for (int K = 4; K <= 200; ++K) {
    CHECK(terminal_window_bound(K) >= 2);
    CHECK(terminal_window_bound(K) <= 5);
  }
}

TEST_CASE("quadruple positions") {
  CHECK(select_quadruple({1, 16}) == Quadruple{1, 6, 10, 16});
  CHECK(select_quadruple({1, 4}) == Quadruple{1, 2, 2, 4});
  CHECK(select_quadruple({1, 5}) == Quadruple{1, 2, 3, 5});
  CHECK(select_quadruple({7, 12}) == Quadruple{7, 8, 10, 12});
  CHECK(select_quadruple({1, 4}).distinct() == std::vector<BeamIndex>{1, 2, 4});
  CHECK_THROWS_AS(select_quadruple({1, 3}), WindowTooSmall);
}

TEST_CASE("elimination branches") {
  Quadruple q{1, 6, 10, 16};
  CHECK(eliminate({1, 16}, q, 6) == ArmWindow{1, 10});
  CHECK(eliminate({1, 16}, q, 1) == ArmWindow{1, 10});
  CHECK(eliminate({1, 16}, q, 16) == ArmWindow{6, 16});
  CHECK(eliminate({1, 16}, q, 10) == ArmWindow{6, 16});
  CHECK(eliminate({1, 16}, q, 10).contains(8));
  CHECK(eliminate({1, 16}, q, 6).contains(8));
  CHECK_THROWS_AS(eliminate({1, 16}, q, 7), std::invalid_argument);
}

TEST_CASE("shared middle arm keeps the right-hand side") {
  Quadruple q = select_quadruple({1, 4});
  CHECK(eliminate({1, 4}, q, 2) == ArmWindow{2, 4});
}

TEST_CASE("noiseless run finds the peak") {
  auto env = ChannelInstance::noiseless(tent(16, 7));
  Rng rng(0);
  CHECK(solve(env, 200, rng).output_arm == 7);
}

TEST_CASE("fewer than four arms skip straight to the terminal phase") {
  Ub3Policy p;
  CHECK(p.min_budget(2) == 2);
  CHECK(p.min_budget(3) == 3);
  auto env = ChannelInstance::noiseless({0.1, 0.4, 0.2});
  Rng rng(0);
  auto log = p.run_logged(env, 10, rng);
  CHECK(log.phases.empty());
  CHECK(log.run.output_arm == 2);
  CHECK(log.run.per_arm_counts == std::vector<std::int64_t>{4, 3, 3});
}

TEST_CASE("property: windows shrink by about a third and keep the middle arms") {
  Rng gen(77);
  Ub3Policy p;
  for (int i = 0; i < 400; ++i) {
    int K = std::uniform_int_distribution<int>(4, 150)(gen);
    std::vector<double> means(K);
    for (auto& x : means) x = std::uniform_real_distribution<double>(0.2, 0.8)(gen);
    auto env = ChannelInstance::bernoulli(means);
    auto T1 = std::uniform_int_distribution<std::int64_t>(p.min_budget(K), 4000)(gen);
    auto log = p.run_logged(env, T1, gen);
    ArmWindow prev{1, K};
    for (std::size_t l = 0; l < log.phases.size(); ++l) {
      const auto& ph = log.phases[l];
      CHECK(ph.window == prev);
      ArmWindow next = l + 1 < log.phases.size() ? log.phases[l + 1].window
                                                 : log.terminal_window;
      int j = prev.size(), removed = j - next.size();
      int third = (j + 2) / 3;
      CHECK(removed >= third - 1);
      CHECK(removed <= third);
      for (BeamIndex k = ph.quad.lower_third; k <= ph.quad.upper_third; ++k)
        CHECK(next.contains(k));
      prev = next;
    }
    CHECK(log.terminal_window.size() <= terminal_window_bound(K));
    CHECK(log.terminal_window.contains(log.run.output_arm));
    CHECK(log.run.samples_used == T1);
  }
}

TEST_CASE("safe elimination with exact comparisons") {
  Ub3Policy p;
  Rng rng(0);
  for (int K = 4; K <= 64; ++K)
    for (int peak = 1; peak <= K; ++peak) {
      auto env = ChannelInstance::noiseless(tent(K, peak));
      auto log = p.run_logged(env, p.min_budget(K), rng);
      bool kept = log.terminal_window.contains(peak);
      for (const auto& ph : log.phases) kept = kept && ph.window.contains(peak);
      INFO("K=", K, " peak=", peak);
      CHECK(kept);
      CHECK(log.run.output_arm == peak);
    }
}

TEST_CASE("equal-split schedule") {
  auto s = build_equal_schedule(120, 16);
  CHECK(s.per_phase == std::vector<std::int64_t>{20, 20, 20, 20, 20, 20});
  auto t = build_equal_schedule(130, 16);
  CHECK(t.per_phase == std::vector<std::int64_t>{20, 20, 20, 20, 20, 30});
}
