#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ub3/core.hpp"

// Unimodal line-search elimination (UB3).
//
// Each elimination phase samples four arms of the surviving contiguous
// window (first, one-third, two-thirds, last), keeps the side of the window
// that must contain the peak, and moves on. Once the window is down to a
// handful of arms a terminal phase samples every survivor and returns the
// empirical argmax. Phase budgets grow geometrically by 3/2 after the
// second phase so that late, close-gap comparisons get the most samples.

namespace ub3 {

struct WindowTooSmall : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ArmWindow {
  BeamIndex lo = 1;
  BeamIndex hi = 1;

  int size() const { return hi - lo + 1; }
  bool contains(BeamIndex k) const { return lo <= k && k <= hi; }
  friend bool operator==(const ArmWindow&, const ArmWindow&) = default;
};

struct Quadruple {
  BeamIndex first = 0;        // k^M
  BeamIndex lower_third = 0;  // k^A
  BeamIndex upper_third = 0;  // k^B
  BeamIndex last = 0;         // k^N

  // Members in ascending order with duplicates removed (k^A == k^B for j = 4).
  std::vector<BeamIndex> distinct() const;
  bool has(BeamIndex k) const {
    return k == first || k == lower_third || k == upper_third || k == last;
  }
  friend bool operator==(const Quadruple&, const Quadruple&) = default;
};

struct PhaseSchedule {
  int phases = 0;                        // elimination phases L
  std::vector<std::int64_t> per_phase;   // L elimination budgets + terminal
  std::int64_t remainder = 0;            // rounding slack folded into terminal

  std::int64_t total() const;
  std::int64_t terminal() const { return per_phase.back(); }
};

enum class ScheduleKind { geometric, equal };

// Real-valued phase count log2(K/3) / log2(3/2).
double phase_count_real(int arm_count);
// Integer phase count: ceiling of the real value (0 for K <= 3).
int phase_count(int arm_count);

// Exact share of the budget given to phase l (1-based, l <= L+1) of an
// L-phase geometric schedule, as numerator / denominator.
struct Fraction {
  std::int64_t num;
  std::int64_t den;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};
Fraction phase_share(int phase, int phases);

// Sum of all phase shares computed in floating point; 1 up to rounding.
double schedule_share_sum(int phases);

// Largest window that can reach the terminal phase after phase_count(K)
// eliminations (the ceiling on L leaves 4 or 5 arms for some K).
int terminal_window_bound(int arm_count);

PhaseSchedule build_schedule(std::int64_t budget, int arm_count);
PhaseSchedule build_equal_schedule(std::int64_t budget, int arm_count);
PhaseSchedule build_schedule(ScheduleKind kind, std::int64_t budget,
                             int arm_count);

Quadruple select_quadruple(const ArmWindow& window);
ArmWindow eliminate(const ArmWindow& window, const Quadruple& quad,
                    BeamIndex winner);

struct PhaseRecord {
  int phase = 0;
  ArmWindow window;
  Quadruple quad;
  BeamIndex winner = 0;
  std::int64_t budget = 0;
};

struct EliminationRun {
  PolicyRun run;
  std::vector<PhaseRecord> phases;  // phases actually played
  ArmWindow terminal_window;
};

class UnimodalElimination : public Policy {
 public:
  explicit UnimodalElimination(ScheduleKind kind) : kind_(kind) {}

  std::string name() const override;
  std::int64_t min_budget(int arm_count) const override;
  PolicyRun run(const Environment& env, std::int64_t budget, Rng& rng,
                bool record_trace = false) const override;

  EliminationRun run_logged(const Environment& env, std::int64_t budget,
                            Rng& rng, bool record_trace = false) const;

  ScheduleKind schedule_kind() const { return kind_; }

 private:
  ScheduleKind kind_;
};

class Ub3Policy : public UnimodalElimination {
 public:
  Ub3Policy() : UnimodalElimination(ScheduleKind::geometric) {}
};

PolicyRun solve(const Environment& env, std::int64_t budget, Rng& rng,
                bool record_trace = false);

}  // namespace ub3
