#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

// Policy / environment abstractions shared by every fixed-budget algorithm.
//
// Arms are 1-based throughout (arm k is the k-th beam of the codebook).
// A run is strictly sequential; independent runs only share immutable
// configuration, so trials can be fanned out freely as long as each owns
// its own Rng.

namespace ub3 {

using BeamIndex = int;
using Rng = std::mt19937_64;

struct BudgetTooSmall : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct KTooSmall : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Reproducible stream for one trial. Equal (master_seed, trial_id) pairs give
// bit-identical sequences.
Rng seeded_stream(std::uint64_t master_seed, std::uint64_t trial_id);

// Folds several integers into one stream id (order-sensitive).
std::uint64_t mix_stream_id(std::initializer_list<std::uint64_t> parts);

class Environment {
 public:
  virtual ~Environment() = default;

  virtual int arm_count() const = 0;
  virtual double sample(BeamIndex k, Rng& rng) const = 0;
  virtual double mean(BeamIndex k) const = 0;

  // Argmax of the true means, lowest index on ties.
  BeamIndex optimal_arm() const;
};

struct TraceEntry {
  std::int64_t slot;
  BeamIndex arm;
  double reward;
};

struct PolicyRun {
  BeamIndex output_arm = 0;
  std::int64_t samples_used = 0;
  std::vector<std::int64_t> per_arm_counts;  // slot k-1 holds arm k
  std::optional<std::vector<TraceEntry>> trace;
};

// Budget-checked sampling front end handed to policies. Keeps the per-arm
// counts and the optional trace so every policy accounts identically.
class ArmSampler {
 public:
  ArmSampler(const Environment& env, Rng& rng, std::int64_t budget,
             bool record_trace);

  double pull(BeamIndex k);
  // Pulls arm k n times and returns the empirical mean (n >= 1).
  double pull_mean(BeamIndex k, std::int64_t n);

  std::int64_t used() const { return used_; }
  std::int64_t remaining() const { return budget_ - used_; }
  int arm_count() const { return env_.arm_count(); }

  PolicyRun finish(BeamIndex output_arm) &&;

 private:
  const Environment& env_;
  Rng& rng_;
  std::int64_t budget_;
  std::int64_t used_ = 0;
  std::vector<std::int64_t> counts_;
  std::optional<std::vector<TraceEntry>> trace_;
};

class Policy {
 public:
  virtual ~Policy() = default;

  virtual std::string name() const = 0;
  // Smallest budget for which the policy can complete on K arms.
  virtual std::int64_t min_budget(int arm_count) const = 0;
  virtual PolicyRun run(const Environment& env, std::int64_t budget, Rng& rng,
                        bool record_trace = false) const = 0;
};

// Throws BudgetTooSmall when budget < policy.min_budget(K), KTooSmall when
// the environment has fewer than two arms.
void check_feasible(const Policy& policy, int arm_count, std::int64_t budget);

PolicyRun run_policy(const Policy& policy, const Environment& env,
                     std::int64_t budget, std::uint64_t seed,
                     bool record_trace = false);

// Position (0-based) of the largest value, lowest position on ties.
std::size_t argmax_lowest(std::span<const double> values);

}  // namespace ub3
