#include "ub3/elimination.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <string>

namespace ub3 {

namespace {

constexpr int kMaxPhases = 38;  // keeps 3^L inside int64

std::int64_t ipow(std::int64_t base, int exp) {
  std::int64_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

std::int64_t floor_share(std::int64_t budget, Fraction f) {
  return static_cast<std::int64_t>(static_cast<__int128>(budget) * f.num / f.den);
}

std::optional<PhaseSchedule> try_geometric(std::int64_t budget, int arm_count) {
  PhaseSchedule s;
  s.phases = phase_count(arm_count);
  std::int64_t allocated = 0;
  for (int l = 1; l <= s.phases; ++l) {
    std::int64_t n = floor_share(budget, phase_share(l, s.phases));
    n -= n % 4;
    if (n < 4) return std::nullopt;
    s.per_phase.push_back(n);
    allocated += n;
  }
  std::int64_t last = floor_share(budget, phase_share(s.phases + 1, s.phases));
  last -= last % 3;
  s.remainder = budget - allocated - last;
  last += s.remainder;
  if (last < terminal_window_bound(arm_count)) return std::nullopt;
  s.per_phase.push_back(last);
  return s;
}

std::optional<PhaseSchedule> try_equal(std::int64_t budget, int arm_count) {
  PhaseSchedule s;
  s.phases = phase_count(arm_count);
  std::int64_t share = budget / (s.phases + 1);
  std::int64_t n = share - share % 4;
  if (n < 4) return std::nullopt;
  s.per_phase.assign(s.phases, n);
  std::int64_t last = budget - n * s.phases;
  if (last < terminal_window_bound(arm_count)) return std::nullopt;
  s.remainder = last - share;
  s.per_phase.push_back(last);
  return s;
}

std::optional<PhaseSchedule> try_build(ScheduleKind kind, std::int64_t budget,
                                       int arm_count) {
  if (arm_count < 4)
    throw KTooSmall("phase schedule needs K >= 4, got " +
                    std::to_string(arm_count));
  return kind == ScheduleKind::geometric ? try_geometric(budget, arm_count)
                                         : try_equal(budget, arm_count);
}

// Samples every arm of the window, splitting the budget as evenly as possible
// (earlier arms take the extra slot), and returns the empirical argmax.
BeamIndex play_terminal(ArmSampler& sampler, const ArmWindow& window,
                        std::int64_t budget) {
  int j = window.size();
  std::vector<double> means(j);
  for (int i = 0; i < j; ++i) {
    std::int64_t n = budget / j + (i < budget % j ? 1 : 0);
    means[i] = sampler.pull_mean(window.lo + i, n);
  }
  return window.lo + static_cast<BeamIndex>(argmax_lowest(means));
}

}  // namespace

std::vector<BeamIndex> Quadruple::distinct() const {
  std::vector<BeamIndex> out{first, lower_third, upper_third, last};
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::int64_t PhaseSchedule::total() const {
  std::int64_t t = 0;
  for (auto n : per_phase) t += n;
  return t;
}

double phase_count_real(int arm_count) {
  return std::log2(arm_count / 3.0) / std::log2(1.5);
}

int phase_count(int arm_count) {
  // smallest L with (2/3)^L K <= 3, i.e. K 2^L <= 3^(L+1)
  int L = 0;
  while (static_cast<double>(arm_count) * std::pow(2.0, L) >
         3.0 * std::pow(3.0, L)) {
    ++L;
    if (L > kMaxPhases) throw std::invalid_argument("arm count too large");
  }
  return L;
}

Fraction phase_share(int phase, int phases) {
  if (phases < 1 || phase < 1 || phase > phases + 1)
    throw std::out_of_range("phase index out of range");
  int two_exp = phase <= 2 ? phases - 2 : phases - (phase - 1);
  int three_exp = phase <= 2 ? phases - 1 : phases - (phase - 2);
  Fraction f{1, ipow(3, three_exp)};
  if (two_exp >= 0)
    f.num = ipow(2, two_exp);
  else
    f.den *= ipow(2, -two_exp);
  return f;
}

double schedule_share_sum(int phases) {
  double sum = 0.0;
  for (int l = 1; l <= phases + 1; ++l)
    sum += std::pow(2.0, l <= 2 ? phases - 2 : phases - (l - 1)) /
           std::pow(3.0, l <= 2 ? phases - 1 : phases - (l - 2));
  return sum;
}

int terminal_window_bound(int arm_count) {
  if (arm_count <= 3) return arm_count;
  std::set<int> sizes{arm_count};
  for (int l = 0, L = phase_count(arm_count); l < L; ++l) {
    std::set<int> next;
    for (int j : sizes) {
      if (j <= 3) {
        next.insert(j);
        continue;
      }
      next.insert((2 * j) / 3);              // keep [k^M, k^B]
      next.insert(j - (j + 2) / 3 + 1);      // keep [k^A, k^N]
    }
    sizes = std::move(next);
  }
  return *sizes.rbegin();
}

PhaseSchedule build_schedule(ScheduleKind kind, std::int64_t budget,
                             int arm_count) {
  auto s = try_build(kind, budget, arm_count);
  if (!s)
    throw BudgetTooSmall("budget " + std::to_string(budget) +
                         " too small for a " + std::to_string(arm_count) +
                         "-arm phase schedule");
  return *s;
}

PhaseSchedule build_schedule(std::int64_t budget, int arm_count) {
  return build_schedule(ScheduleKind::geometric, budget, arm_count);
}

PhaseSchedule build_equal_schedule(std::int64_t budget, int arm_count) {
  return build_schedule(ScheduleKind::equal, budget, arm_count);
}

Quadruple select_quadruple(const ArmWindow& window) {
  int j = window.size();
  if (j < 4)
    throw WindowTooSmall("quadruple needs a window of at least 4 arms, got " +
                         std::to_string(j));
  return {window.lo, window.lo + (j + 2) / 3 - 1, window.lo + (2 * j) / 3 - 1,
          window.hi};
}

ArmWindow eliminate(const ArmWindow& window, const Quadruple& quad,
                    BeamIndex winner) {
  if (!quad.has(winner) || !window.contains(winner))
    throw std::invalid_argument("winner " + std::to_string(winner) +
                                " is not a quadruple member");
  // k^B is checked first: when k^A == k^B the peak may lie right of the
  // shared arm, and only [k^A, k^N] is guaranteed to keep it.
  if (winner == quad.upper_third || winner == quad.last)
    return {quad.lower_third, quad.last};
  return {quad.first, quad.upper_third};
}

std::string UnimodalElimination::name() const {
  return kind_ == ScheduleKind::geometric ? "ub3" : "lse";
}

std::int64_t UnimodalElimination::min_budget(int arm_count) const {
  if (arm_count <= 3) return std::max(arm_count, 1);
  for (std::int64_t t = 4;; ++t)
    if (try_build(kind_, t, arm_count)) return t;
}

PolicyRun UnimodalElimination::run(const Environment& env, std::int64_t budget,
                                   Rng& rng, bool record_trace) const {
  return run_logged(env, budget, rng, record_trace).run;
}

EliminationRun UnimodalElimination::run_logged(const Environment& env,
                                               std::int64_t budget, Rng& rng,
                                               bool record_trace) const {
  check_feasible(*this, env.arm_count(), budget);
  const int K = env.arm_count();
  ArmSampler sampler(env, rng, budget, record_trace);
  EliminationRun out;
  ArmWindow window{1, K};

  if (K <= 3) {
    out.terminal_window = window;
    BeamIndex best = play_terminal(sampler, window, budget);
    out.run = std::move(sampler).finish(best);
    return out;
  }

  PhaseSchedule schedule = build_schedule(kind_, budget, K);
  std::int64_t carried = 0;
  for (int l = 0; l < schedule.phases; ++l) {
    std::int64_t phase_budget = schedule.per_phase[l];
    if (window.size() < 4) {
      carried += phase_budget;
      continue;
    }
    Quadruple quad = select_quadruple(window);
    auto members = quad.distinct();
    auto m = static_cast<std::int64_t>(members.size());
    std::vector<double> means(members.size());
    for (std::size_t i = 0; i < members.size(); ++i) {
      std::int64_t n = phase_budget / m +
                       (static_cast<std::int64_t>(i) < phase_budget % m ? 1 : 0);
      means[i] = sampler.pull_mean(members[i], n);
    }
    BeamIndex winner = members[argmax_lowest(means)];
    out.phases.push_back({l + 1, window, quad, winner, phase_budget});
    window = eliminate(window, quad, winner);
  }

  out.terminal_window = window;
  BeamIndex best = play_terminal(sampler, window, schedule.terminal() + carried);
  out.run = std::move(sampler).finish(best);
  return out;
}

PolicyRun solve(const Environment& env, std::int64_t budget, Rng& rng,
                bool record_trace) {
  return Ub3Policy().run(env, budget, rng, record_trace);
}

}  // namespace ub3
