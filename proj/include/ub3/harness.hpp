#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ub3/channel.hpp"
#include "ub3/core.hpp"

// Monte-Carlo sweep runner.
//
// A sweep is the cross product policy x K x T1 x d x alpha. Every trial
// draws a fresh LOS instance (shadowing and angle) from a stream keyed on
// (seed, K, d, alpha, trial), so all policies and budgets in a sweep see the
// same instances and the same sample stream. Trials are independent and are
// fanned out with OpenMP; results are reduced in trial order, which keeps
// the output byte-identical for any worker count. The serial kernel is kept
// as the reference the parallel one is tested against.

namespace ub3 {

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

enum class Metric { error_prob, throughput, both };

struct ExperimentConfig {
  std::vector<std::string> policies;
  std::vector<int> beams;
  std::vector<std::int64_t> budgets;  // T1 values
  std::vector<double> distances;
  std::vector<double> alphas;
  std::int64_t period = 3000;  // T
  int trials = 1000;
  std::uint64_t master_seed = 0;
  Metric metric = Metric::both;
  std::string output;
  bool fixed_instance = false;
  ChannelParams channel;  // beams / distance / alpha are set per cell

  void validate() const;
};

// Flat key=value text; lists are comma separated, numeric lists also accept
// lo:step:hi ranges. '#' starts a comment.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

std::unique_ptr<Policy> make_policy(std::string_view name);

struct CellKey {
  std::string policy;
  int beams = 0;
  std::int64_t budget = 0;
  double distance = 0.0;
  double alpha = 0.0;

  auto operator<=>(const CellKey&) const = default;
  bool operator==(const CellKey&) const = default;
};

struct TrialOutcome {
  bool correct = false;
  double throughput = 0.0;
  std::int64_t samples_used = 0;
  BeamIndex output_arm = 0;
  BeamIndex optimal_arm = 0;
  std::vector<TraceEntry> trace;
};

struct TrialBatch {
  CellKey key;
  int trials = 0;
  std::optional<std::string> skipped;  // reason, when the cell did not run
  bool has_throughput = true;
  double error_rate = 0.0;
  double error_ci95 = 0.0;
  double mean_throughput = 0.0;
  double throughput_ci95 = 0.0;
  double mean_samples_used = 0.0;
};

// (mu_selected / mu_optimal) * (T - T1).
double throughput(BeamIndex selected, const ChannelInstance& instance,
                  std::int64_t period, std::int64_t budget);

// Cells in output order (sorted by policy, K, T1, d, alpha; duplicates removed).
std::vector<CellKey> enumerate_cells(const ExperimentConfig& config);

// Instance used by every cell sharing (K, d, alpha) for this trial. Angles
// that land on a tie are redrawn from the same stream.
ChannelInstance draw_trial_instance(const ExperimentConfig& config, int beams,
                                    double distance, double alpha, int trial);

TrialOutcome run_trial(const Policy& policy, const CellKey& cell,
                       const ExperimentConfig& config, int trial,
                       bool record_trace = false);

struct TrialTask {
  std::size_t cell = 0;
  int trial = 0;
};

// Kernels over a flat task list; out[i] belongs to tasks[i].
std::vector<TrialOutcome> run_trials_serial(
    const ExperimentConfig& config, std::span<const CellKey> cells,
    std::span<const TrialTask> tasks, bool record_trace = false);
std::vector<TrialOutcome> run_trials_parallel(
    const ExperimentConfig& config, std::span<const CellKey> cells,
    std::span<const TrialTask> tasks, int workers, bool record_trace = false);

TrialBatch summarize(const CellKey& cell, std::span<const TrialOutcome> outcomes,
                     const ExperimentConfig& config);

struct SweepOptions {
  int workers = 0;  // 0: OpenMP default; 1: serial kernel
  bool record_trace = false;
  bool keep_outcomes = false;
};

struct SweepResult {
  std::vector<TrialBatch> batches;
  std::vector<std::vector<TrialOutcome>> outcomes;  // per batch, if kept
};

SweepResult run_sweep(const ExperimentConfig& config,
                      const SweepOptions& options = {});

std::string format_results(std::span<const TrialBatch> batches);
void write_results(std::span<const TrialBatch> batches, const std::string& path);
void write_traces(const SweepResult& result, const std::string& path);

// Normal-approximation half-width for a Bernoulli rate.
double binomial_ci95(double rate, int trials);
// Student-t half-width for a sample mean.
double t_interval95(double stddev, int trials);

}  // namespace ub3
