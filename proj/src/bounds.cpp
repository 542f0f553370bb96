#include "ub3/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ub3/elimination.hpp"

namespace ub3 {

GapProfile extract_gaps(std::span<const double> means) {
  if (means.size() < 2)
    throw std::invalid_argument("gap extraction needs at least 2 arms");
  GapProfile g;
  g.gaps.reserve(means.size() - 1);
  for (std::size_t k = 1; k < means.size(); ++k)
    g.gaps.push_back(std::abs(means[k] - means[k - 1]));
  g.min_gap = *std::min_element(g.gaps.begin(), g.gaps.end());
  if (g.min_gap <= 0.0)
    throw DegenerateGaps("two adjacent arms have equal means");
  return g;
}

GapProfile extract_gaps(const ChannelInstance& instance) {
  return extract_gaps(instance.means());
}

double ub3_upper_bound(std::int64_t budget, int arm_count, double min_gap,
                       double reward_range, PhaseCountMode mode) {
  if (budget <= 0 || arm_count < 4 || !(min_gap > 0) || !(reward_range > 0))
    throw std::invalid_argument("upper bound needs T1 > 0, K >= 4, D_L > 0");
  const double T = static_cast<double>(budget);
  const double K = static_cast<double>(arm_count);
  const double D = min_gap / reward_range;
  const double D2 = D * D;
  double L = mode == PhaseCountMode::real ? phase_count_real(arm_count)
                                          : static_cast<double>(phase_count(arm_count));
  // middle phases 3..L contribute nothing when L < 2
  double middle = std::max(L - 2.0, 0.0);
  return 2.0 * std::exp(-T * D2 / 18.0) + 2.0 * std::exp(-T * K * D2 / 32.0) +
         2.0 * std::exp(-T * K * D2 / 72.0) +
         2.0 * middle * std::exp(-T * D2 / 16.0);
}

std::vector<double> LowerBoundInstance::means() const {
  auto m = p;
  if (flipped_arm) m[*flipped_arm - 1] = 1.0 - m[*flipped_arm - 1];
  return m;
}

LowerBoundInstance LowerBoundInstance::flip(int arm) const {
  if (std::abs(arm - best_arm) > 1 || arm < 1 || arm > arm_count())
    throw InvalidProfile("flipping arm " + std::to_string(arm) +
                         " breaks unimodality; only neighbours of k*=" +
                         std::to_string(best_arm) + " may be flipped");
  LowerBoundInstance out = *this;
  out.flipped_arm = arm;
  return out;
}

const LowerBoundInstance& LowerBoundFamily::flipped_at(int arm) const {
  int slot = arm - (base.best_arm - 1);
  if (slot < 0 || slot > 2)
    throw InvalidProfile("arm " + std::to_string(arm) + " has no flipped instance");
  return flipped[slot];
}

LowerBoundFamily build_lower_bound_family(int arm_count, int best_arm,
                                          std::vector<double> p) {
  auto fail = [](const std::string& why) { throw InvalidProfile(why); };
  if (arm_count < 3) fail("need at least 3 arms");
  if (static_cast<int>(p.size()) != arm_count) fail("profile length differs from K");
  if (best_arm < 2 || best_arm > arm_count - 1)
    fail("best arm must have a neighbour on both sides");
  for (double x : p)
    if (!(x >= 0.25 && x <= 0.5)) fail("profile values must lie in [1/4, 1/2]");
  if (p[best_arm - 1] != 0.5) fail("best arm must have mean exactly 1/2");
  for (int k = 1; k < best_arm; ++k)
    if (p[k - 1] > p[k]) fail("profile must be non-decreasing up to k*");
  for (int k = best_arm; k < arm_count; ++k)
    if (p[k] > p[k - 1]) fail("profile must be non-increasing after k*");
  if (p[best_arm - 2] >= 0.5 || p[best_arm] >= 0.5)
    fail("neighbours of k* must lie strictly below 1/2");

  LowerBoundInstance base{best_arm, std::move(p), std::nullopt};
  return {base,
          {base.flip(best_arm - 1), base.flip(best_arm), base.flip(best_arm + 1)}};
}

double neighbour_complexity(const LowerBoundInstance& base, int arm) {
  double h = 0.0;
  for (int k : {arm - 1, arm + 1}) {
    if (k < 1 || k > base.arm_count()) continue;
    double delta = base.gap(arm) + base.gap(k);
    h += 1.0 / (delta * delta);
  }
  return h;
}

double flip_complexity(const LowerBoundInstance& base) {
  double h = 0.0;
  for (int i : {base.best_arm - 1, base.best_arm + 1}) {
    double d = base.gap(i);
    h += 1.0 / (d * d * neighbour_complexity(base, i));
  }
  return h;
}

LowerBoundKind parse_lower_bound_kind(std::string_view text) {
  if (text == "neighbour") return LowerBoundKind::neighbour;
  if (text == "weighted") return LowerBoundKind::weighted;
  if (text == "unimodal") return LowerBoundKind::unimodal;
  throw std::invalid_argument("unknown lower bound '" + std::string(text) + "'");
}

double lower_bound_value(const LowerBoundFamily& family, std::int64_t budget,
                         LowerBoundKind which) {
  if (budget <= 0) throw std::invalid_argument("budget must be positive");
  const double T = static_cast<double>(budget);
  const auto& base = family.base;
  const double penalty = 2.0 * std::sqrt(T * std::log(18.0 * T));

  switch (which) {
    case LowerBoundKind::neighbour:
      return std::exp(-60.0 * T / neighbour_complexity(base, base.best_arm) -
                      penalty) / 6.0;
    case LowerBoundKind::weighted: {
      double h = flip_complexity(base), best = 0.0;
      for (int i : family.neighbours())
        best = std::max(best, std::exp(-60.0 * T / (h * neighbour_complexity(base, i)) -
                                       penalty) / 6.0);
      return best;
    }
    case LowerBoundKind::unimodal: {
      double best = 0.0;
      for (int i : family.neighbours())
        best = std::max(best, std::exp(-75.0 * T / neighbour_complexity(base, i)) / 6.0);
      return best;
    }
  }
  return 0.0;
}

bool lower_bound_budget_condition(const LowerBoundFamily& family,
                                  std::int64_t budget) {
  const auto& base = family.base;
  const double T = static_cast<double>(budget);
  double h = flip_complexity(base);
  double m = neighbour_complexity(base, base.best_arm);
  for (int i : family.neighbours())
    m = std::max(m, h * neighbour_complexity(base, i));
  // FIXME: the squared max looks dimensionally off; kept verbatim until the
  // intended form is confirmed.
  return T >= m * m * 4.0 * std::log(6.0 * T * base.arm_count()) / 3600.0;
}

}  // namespace ub3
