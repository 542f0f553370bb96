#include <doctest.h>

#include <random>

#include "ub3/baselines.hpp"
#include "ub3/channel.hpp"
#include "ub3/core.hpp"
#include "ub3/elimination.hpp"

using namespace ub3;

namespace {

struct TwoArms : Environment {
  int arm_count() const override { return 2; }
  double sample(BeamIndex k, Rng&) const override { return k == 2 ? 1.0 : 0.0; }
  double mean(BeamIndex k) const override { return k == 2 ? 1.0 : 0.0; }
};

}  // namespace

TEST_CASE("seeded streams are reproducible and distinct") {
  Rng a = seeded_stream(7, 3), b = seeded_stream(7, 3), c = seeded_stream(7, 4);
  for (int i = 0; i < 100; ++i) CHECK(a() == b());
  Rng d = seeded_stream(7, 3);
  CHECK(d() != c());
  CHECK(seeded_stream(1ULL << 40, 0)() != seeded_stream(0, 0)());
}

TEST_CASE("stream ids depend on order") {
  CHECK(mix_stream_id({1, 2}) != mix_stream_id({2, 1}));
  CHECK(mix_stream_id({1, 2}) == mix_stream_id({1, 2}));
  CHECK(mix_stream_id({0}) != mix_stream_id({0, 0}));
}

TEST_CASE("argmax breaks ties toward the lowest position") {
  std::vector<double> v{0.2, 0.7, 0.7, 0.1};
  CHECK(argmax_lowest(v) == 1);
  auto env = ChannelInstance::noiseless({0.5, 0.9, 0.9});
  CHECK(env.optimal_arm() == 2);
}

TEST_CASE("sampler enforces the budget and counts pulls") {
  TwoArms env;
  Rng rng(1);
  ArmSampler s(env, rng, 5, true);
  CHECK(s.pull_mean(2, 3) == 1.0);
  s.pull(1);
  CHECK(s.remaining() == 1);
  s.pull(1);
  CHECK_THROWS_AS(s.pull(1), std::logic_error);
  CHECK_THROWS_AS(s.pull_mean(1, 0), std::logic_error);
  auto run = std::move(s).finish(2);
  CHECK(run.samples_used == 5);
  CHECK(run.per_arm_counts == std::vector<std::int64_t>{2, 3});
  REQUIRE(run.trace);
  CHECK(run.trace->size() == 5);
  CHECK(run.trace->front().slot == 1);
  CHECK(run.trace->back().arm == 1);
}

TEST_CASE("sampler rejects arms outside the codebook") {
  TwoArms env;
  Rng rng(1);
  ArmSampler s(env, rng, 5, false);
  CHECK_THROWS_AS(s.pull(0), std::out_of_range);
  CHECK_THROWS_AS(s.pull(3), std::out_of_range);
}

TEST_CASE("feasibility checks") {
  Ub3Policy p;
  auto one = ChannelInstance::noiseless({1.0, 0.5});
  CHECK_THROWS_AS(check_feasible(p, 1, 100), KTooSmall);
  CHECK_THROWS_AS(check_feasible(p, 16, p.min_budget(16) - 1), BudgetTooSmall);
  CHECK_NOTHROW(check_feasible(p, 16, p.min_budget(16)));
  CHECK_THROWS_AS(run_policy(p, one, 1, 0), BudgetTooSmall);
}

TEST_CASE("same seed gives the same trace") {
  ChannelParams params;
  params.spatial_angle = 0.21;
  auto env = build_los_instance(params, std::uint64_t{5});
  Ub3Policy p;
  auto a = run_policy(p, env, 300, 11, true);
  auto b = run_policy(p, env, 300, 11, true);
  REQUIRE(a.trace);
  REQUIRE(b.trace);
  CHECK(a.trace->size() == b.trace->size());
  bool same = true;
  for (std::size_t i = 0; i < a.trace->size(); ++i)
    same = same && (*a.trace)[i].reward == (*b.trace)[i].reward &&
           (*a.trace)[i].arm == (*b.trace)[i].arm;
  CHECK(same);
}

TEST_CASE("property: every policy accounts for its samples") {
  Rng gen(2024);
  Ub3Policy ub3;
  LsePolicy lse;
  SequentialHalving sh;
  const Policy* policies[] = {&ub3, &lse, &sh};
  for (int i = 0; i < 300; ++i) {
    int K = std::uniform_int_distribution<int>(2, 70)(gen);
    std::vector<double> p(K);
    for (auto& x : p) x = std::uniform_real_distribution<double>(0, 1)(gen);
    auto env = ChannelInstance::bernoulli(p);
    for (const Policy* pol : policies) {
      auto lo = pol->min_budget(K);
      auto T1 = std::uniform_int_distribution<std::int64_t>(lo, lo + 3000)(gen);
      auto run = pol->run(env, T1, gen);
      std::int64_t sum = 0;
      for (auto c : run.per_arm_counts) sum += c;
      INFO(pol->name(), " K=", K, " T1=", T1);
      CHECK(sum == run.samples_used);
      CHECK(run.samples_used <= T1);
      CHECK(run.output_arm >= 1);
      CHECK(run.output_arm <= K);
    }
  }
}
