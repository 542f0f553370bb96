#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ub3/core.hpp"
#include "ub3/elimination.hpp"

// Comparison policies: Sequential Halving (unstructured fixed-budget best-arm
// identification) and a discrete-arm line-search elimination (LSE) that
// shares UB3's window mechanics but spends the same budget in every phase.

namespace ub3 {

// ceil(log2 K), the number of halving rounds.
int halving_rounds(int arm_count);

struct HalvingRound {
  int round = 0;
  std::vector<BeamIndex> surviving;  // ascending arm indices entering the round
  std::int64_t per_arm = 0;
};

class SequentialHalving : public Policy {
 public:
  std::string name() const override { return "seqhalv"; }
  std::int64_t min_budget(int arm_count) const override;
  PolicyRun run(const Environment& env, std::int64_t budget, Rng& rng,
                bool record_trace = false) const override;

  PolicyRun run_logged(const Environment& env, std::int64_t budget, Rng& rng,
                       std::vector<HalvingRound>& rounds,
                       bool record_trace = false) const;
};

class LsePolicy : public UnimodalElimination {
 public:
  LsePolicy() : UnimodalElimination(ScheduleKind::equal) {}
};

PolicyRun sequential_halving(const Environment& env, std::int64_t budget,
                             Rng& rng, bool record_trace = false);
PolicyRun lse_discrete(const Environment& env, std::int64_t budget, Rng& rng,
                       bool record_trace = false);

}  // namespace ub3
