#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "ub3/channel.hpp"

// Theoretical error-probability quantities for fixed-budget unimodal bandits:
// the UB3 upper bound driven by the smallest adjacent gap, and the lower
// bounds built from Bernoulli instances where one neighbour of the best arm
// (or the best arm itself) has its mean reflected about 1/2.

namespace ub3 {

struct DegenerateGaps : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InvalidProfile : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct GapProfile {
  double min_gap = 0.0;       // D_L
  std::vector<double> gaps;   // |mu_{k+1} - mu_k|, k = 1..K-1
};

GapProfile extract_gaps(std::span<const double> means);
GapProfile extract_gaps(const ChannelInstance& instance);

enum class PhaseCountMode { real, integer };

// Error-probability upper bound for UB3. min_gap is divided by reward_range
// before use, so rewards on [lo, hi] are handled as if rescaled to [0, 1].
// Values above 1 are returned as is (the bound is vacuous there).
double ub3_upper_bound(std::int64_t budget, int arm_count, double min_gap,
                       double reward_range = 1.0,
                       PhaseCountMode mode = PhaseCountMode::real);

struct LowerBoundInstance {
  int best_arm = 0;            // k*, 1-based
  std::vector<double> p;       // Bernoulli means of the base problem
  std::optional<int> flipped_arm;

  int arm_count() const { return static_cast<int>(p.size()); }
  // d_k = 1/2 - p_k
  double gap(int arm) const { return 0.5 - p.at(arm - 1); }
  // Bernoulli means with the flipped arm reflected to 1 - p_i.
  std::vector<double> means() const;
  // Only k*-1, k*, k*+1 keep the problem unimodal; anything else throws.
  LowerBoundInstance flip(int arm) const;
};

struct LowerBoundFamily {
  LowerBoundInstance base;
  std::array<LowerBoundInstance, 3> flipped;  // arms k*-1, k*, k*+1

  const LowerBoundInstance& flipped_at(int arm) const;
  std::array<int, 2> neighbours() const {
    return {base.best_arm - 1, base.best_arm + 1};
  }
};

// Requires 3 <= K, 2 <= k* <= K-1, p in [1/4, 1/2], p_{k*} = 1/2, p
// non-decreasing up to k* and non-increasing after, neighbours strictly
// below 1/2.
LowerBoundFamily build_lower_bound_family(int arm_count, int best_arm,
                                          std::vector<double> p);

// Sum over k in {i-1, i+1} of 1 / (d_i + d_k)^2.
double neighbour_complexity(const LowerBoundInstance& base, int arm);
// Sum over the two neighbours i of 1 / (d_i^2 * neighbour_complexity(i)).
double flip_complexity(const LowerBoundInstance& base);

enum class LowerBoundKind {
  neighbour,  // complexity of the best arm's neighbourhood, with sqrt penalty
  weighted,   // flip_complexity-weighted neighbour complexity, sqrt penalty
  unimodal,   // clean exponential form (75 T / H(i))
};

LowerBoundKind parse_lower_bound_kind(std::string_view text);

double lower_bound_value(const LowerBoundFamily& family, std::int64_t budget,
                         LowerBoundKind which);

// Budget condition under which the sqrt penalty can be absorbed into the
// exponent. Implemented as written, including the squared max.
bool lower_bound_budget_condition(const LowerBoundFamily& family,
                                  std::int64_t budget);

}  // namespace ub3
