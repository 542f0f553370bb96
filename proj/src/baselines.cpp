#include "ub3/baselines.hpp"

#include <algorithm>
#include <numeric>

namespace ub3 {

int halving_rounds(int arm_count) {
  int r = 0;
  while ((1LL << r) < arm_count) ++r;
  return r;
}

std::int64_t SequentialHalving::min_budget(int arm_count) const {
  return static_cast<std::int64_t>(arm_count) * halving_rounds(arm_count);
}

PolicyRun SequentialHalving::run(const Environment& env, std::int64_t budget,
                                 Rng& rng, bool record_trace) const {
  std::vector<HalvingRound> rounds;
  return run_logged(env, budget, rng, rounds, record_trace);
}

PolicyRun SequentialHalving::run_logged(const Environment& env,
                                        std::int64_t budget, Rng& rng,
                                        std::vector<HalvingRound>& rounds,
                                        bool record_trace) const {
  check_feasible(*this, env.arm_count(), budget);
  ArmSampler sampler(env, rng, budget, record_trace);
  const int R = halving_rounds(env.arm_count());

  std::vector<BeamIndex> surviving(env.arm_count());
  std::iota(surviving.begin(), surviving.end(), 1);

  for (int r = 1; r <= R && surviving.size() > 1; ++r) {
    auto s = static_cast<std::int64_t>(surviving.size());
    std::int64_t per_arm = budget / (s * R);
    rounds.push_back({r, surviving, per_arm});

    std::vector<double> means(surviving.size());
    for (std::size_t i = 0; i < surviving.size(); ++i)
      means[i] = sampler.pull_mean(surviving[i], per_arm);

    std::vector<std::size_t> order(surviving.size());
    std::iota(order.begin(), order.end(), 0);
    // stable: equal means keep ascending arm order
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return means[a] > means[b];
    });
    order.resize((surviving.size() + 1) / 2);
    std::sort(order.begin(), order.end());

    std::vector<BeamIndex> kept;
    kept.reserve(order.size());
    for (auto i : order) kept.push_back(surviving[i]);
    surviving = std::move(kept);
  }
  return std::move(sampler).finish(surviving.front());
}

PolicyRun sequential_halving(const Environment& env, std::int64_t budget,
                             Rng& rng, bool record_trace) {
  return SequentialHalving().run(env, budget, rng, record_trace);
}

PolicyRun lse_discrete(const Environment& env, std::int64_t budget, Rng& rng,
                       bool record_trace) {
  return LsePolicy().run(env, budget, rng, record_trace);
}

}  // namespace ub3
