#include "ub3/core.hpp"

#include <string>

namespace ub3 {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

Rng seeded_stream(std::uint64_t master_seed, std::uint64_t trial_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                    static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(trial_id),
                    static_cast<std::uint32_t>(trial_id >> 32)};
  return Rng(seq);
}

std::uint64_t mix_stream_id(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x6a09e667f3bcc908ULL;
  for (auto p : parts) h = splitmix64(h ^ splitmix64(p));
  return h;
}

BeamIndex Environment::optimal_arm() const {
  BeamIndex best = 1;
  double best_mean = mean(1);
  for (BeamIndex k = 2; k <= arm_count(); ++k) {
    double m = mean(k);
    if (m > best_mean) {
      best_mean = m;
      best = k;
    }
  }
  return best;
}

ArmSampler::ArmSampler(const Environment& env, Rng& rng, std::int64_t budget,
                       bool record_trace)
    : env_(env), rng_(rng), budget_(budget), counts_(env.arm_count(), 0) {
  if (record_trace) trace_.emplace();
}

double ArmSampler::pull(BeamIndex k) {
  if (used_ >= budget_)
    throw std::logic_error("policy exceeded its sampling budget");
  if (k < 1 || k > env_.arm_count())
    throw std::out_of_range("arm index " + std::to_string(k) + " out of range");
  double r = env_.sample(k, rng_);
  ++used_;
  ++counts_[k - 1];
  if (trace_) trace_->push_back({used_, k, r});
  return r;
}

double ArmSampler::pull_mean(BeamIndex k, std::int64_t n) {
  if (n < 1) throw std::logic_error("pull_mean needs at least one sample");
  double sum = 0.0;
  for (std::int64_t s = 0; s < n; ++s) sum += pull(k);
  return sum / static_cast<double>(n);
}

PolicyRun ArmSampler::finish(BeamIndex output_arm) && {
  PolicyRun run;
  run.output_arm = output_arm;
  run.samples_used = used_;
  run.per_arm_counts = std::move(counts_);
  run.trace = std::move(trace_);
  return run;
}

void check_feasible(const Policy& policy, int arm_count, std::int64_t budget) {
  if (arm_count < 2)
    throw KTooSmall("environment needs at least 2 arms, got " +
                    std::to_string(arm_count));
  auto need = policy.min_budget(arm_count);
  if (budget < need)
    throw BudgetTooSmall(policy.name() + " needs a budget of at least " +
                         std::to_string(need) + " for K=" +
                         std::to_string(arm_count) + ", got " +
                         std::to_string(budget));
}

PolicyRun run_policy(const Policy& policy, const Environment& env,
                     std::int64_t budget, std::uint64_t seed,
                     bool record_trace) {
  check_feasible(policy, env.arm_count(), budget);
  Rng rng = seeded_stream(seed, 0);
  return policy.run(env, budget, rng, record_trace);
}

std::size_t argmax_lowest(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

}  // namespace ub3
