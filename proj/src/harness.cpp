#include "ub3/harness.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>
#include <omp.h>

#include "ub3/baselines.hpp"
#include "ub3/elimination.hpp"

namespace ub3 {

namespace {

constexpr std::uint64_t kInstanceTag = 0x1;
constexpr std::uint64_t kSamplingTag = 0x2;
constexpr int kMaxAngleRedraws = 1000;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = text.find(sep, start);
    out.push_back(trim(text.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double to_double(std::string_view key, std::string_view text) {
  std::string s(text);
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size())
    throw ConfigError("bad number '" + s + "' for key " + std::string(key));
  return v;
}

std::int64_t to_int(std::string_view key, std::string_view text) {
  std::string s(text);
  char* end = nullptr;
  long long v = std::strtoll(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size())
    throw ConfigError("bad integer '" + s + "' for key " + std::string(key));
  return v;
}

bool to_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("bad boolean '" + std::string(text) + "' for key " + std::string(key));
}

template <class T, class Parse>
std::vector<T> numeric_list(std::string_view key, std::string_view text, Parse parse) {
  std::vector<T> out;
  for (auto item : split(text, ',')) {
    auto parts = split(item, ':');
    if (parts.size() == 1) {
      out.push_back(static_cast<T>(parse(key, parts[0])));
      continue;
    }
    if (parts.size() != 3)
      throw ConfigError("ranges are lo:step:hi, got '" + std::string(item) + "'");
    T lo = static_cast<T>(parse(key, parts[0]));
    T step = static_cast<T>(parse(key, parts[1]));
    T hi = static_cast<T>(parse(key, parts[2]));
    if (!(step > 0) || hi < lo)
      throw ConfigError("empty or non-increasing range '" + std::string(item) + "'");
    for (std::int64_t i = 0;; ++i) {
      T v = static_cast<T>(lo + static_cast<T>(i) * step);
      if (v > hi + step * static_cast<T>(1e-9)) break;
      out.push_back(v);
    }
  }
  return out;
}

template <class T>
void sort_unique(std::vector<T>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

std::string fmt6(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::uint64_t bits(double x) { return std::bit_cast<std::uint64_t>(x); }

}  // namespace

void ExperimentConfig::validate() const {
  if (policies.empty()) throw ConfigError("no policies given");
  for (const auto& p : policies) make_policy(p);
  if (beams.empty() || budgets.empty() || distances.empty() || alphas.empty())
    throw ConfigError("K, T1, d and alpha each need at least one value");
  if (trials < 1) throw ConfigError("trials must be at least 1");
  for (int k : beams)
    if (k < 2) throw ConfigError("K must be at least 2");
  for (auto t : budgets)
    if (t < 1) throw ConfigError("T1 values must be positive");
  for (double d : distances)
    if (!(d > 0)) throw ConfigError("distances must be positive");
  for (double a : alphas)
    if (!(a >= 1 && a <= 4)) throw ConfigError("alpha must lie in [1, 4]");
  if (metric != Metric::error_prob &&
      period <= *std::max_element(budgets.begin(), budgets.end()))
    throw ConfigError("throughput needs T larger than every T1");
  try {
    channel.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig c;
  std::map<std::string, std::string> seen;
  for (auto raw : split(text, '\n')) {
    auto hash = raw.find('#');
    auto line = trim(raw.substr(0, hash));
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("expected key=value, got '" + std::string(line) + "'");
    std::string key(trim(line.substr(0, eq)));
    auto value = trim(line.substr(eq + 1));
    if (seen.count(key)) throw ConfigError("duplicate key " + key);
    seen[key] = std::string(value);

    if (key == "policies" || key == "policy") {
      for (auto p : split(value, ',')) c.policies.emplace_back(p);
    } else if (key == "K") {
      c.beams = numeric_list<int>(key, value, to_int);
    } else if (key == "T1") {
      c.budgets = numeric_list<std::int64_t>(key, value, to_int);
    } else if (key == "d") {
      c.distances = numeric_list<double>(key, value, to_double);
    } else if (key == "alpha") {
      c.alphas = numeric_list<double>(key, value, to_double);
    } else if (key == "T") {
      c.period = to_int(key, value);
    } else if (key == "trials") {
      c.trials = static_cast<int>(to_int(key, value));
    } else if (key == "seed") {
      c.master_seed = static_cast<std::uint64_t>(to_int(key, value));
    } else if (key == "noise") {
      try {
        c.channel.noise = parse_noise_model(value);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    } else if (key == "metric") {
      if (value == "error_prob") c.metric = Metric::error_prob;
      else if (value == "throughput") c.metric = Metric::throughput;
      else if (value == "both") c.metric = Metric::both;
      else throw ConfigError("metric must be error_prob, throughput or both");
    } else if (key == "out") {
      c.output = std::string(value);
    } else if (key == "fixed_instance") {
      c.fixed_instance = to_bool(key, value);
    } else if (key == "v") {
      if (value != "random") c.channel.spatial_angle = to_double(key, value);
    } else if (key == "shadow_db") {
      if (value != "random") c.channel.shadow_db = to_double(key, value);
    } else if (key == "carrier_hz") {
      c.channel.carrier_hz = to_double(key, value);
    } else if (key == "bandwidth_hz") {
      c.channel.bandwidth_hz = to_double(key, value);
    } else if (key == "noise_dbm_per_hz") {
      c.channel.noise_dbm_per_hz = to_double(key, value);
    } else if (key == "tx_power_dbm") {
      c.channel.tx_power_dbm = to_double(key, value);
    } else if (key == "shadow_sigma_db") {
      c.channel.shadow_sigma_db = to_double(key, value);
    } else if (key == "spacing") {
      c.channel.spacing_wavelengths = to_double(key, value);
    } else {
      throw ConfigError("unknown key " + key);
    }
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::unique_ptr<Policy> make_policy(std::string_view name) {
  if (name == "ub3") return std::make_unique<Ub3Policy>();
  if (name == "seqhalv") return std::make_unique<SequentialHalving>();
  if (name == "lse") return std::make_unique<LsePolicy>();
  throw ConfigError("unknown policy '" + std::string(name) + "'");
}

double throughput(BeamIndex selected, const ChannelInstance& instance,
                  std::int64_t period, std::int64_t budget) {
  if (period <= budget) throw std::invalid_argument("throughput needs T > T1");
  return instance.mean(selected) / instance.mean(instance.optimal()) *
         static_cast<double>(period - budget);
}

std::vector<CellKey> enumerate_cells(const ExperimentConfig& config) {
  auto policies = config.policies;
  auto beams = config.beams;
  auto budgets = config.budgets;
  auto distances = config.distances;
  auto alphas = config.alphas;
  sort_unique(policies);
  sort_unique(beams);
  sort_unique(budgets);
  sort_unique(distances);
  sort_unique(alphas);

  std::vector<CellKey> cells;
  for (const auto& p : policies)
    for (int k : beams)
      for (auto t : budgets)
        for (double d : distances)
          for (double a : alphas) cells.push_back({p, k, t, d, a});
  return cells;
}

ChannelInstance draw_trial_instance(const ExperimentConfig& config, int beams,
                                    double distance, double alpha, int trial) {
  ChannelParams params = config.channel;
  params.beams = beams;
  params.distance_m = distance;
  params.path_loss_exponent = alpha;
  std::uint64_t draw = config.fixed_instance ? 0 : static_cast<std::uint64_t>(trial);
  Rng rng = seeded_stream(
      config.master_seed,
      mix_stream_id({kInstanceTag, static_cast<std::uint64_t>(beams), bits(distance),
                     bits(alpha), draw}));
  for (int attempt = 0;; ++attempt) {
    try {
      return build_los_instance(params, rng);
    } catch (const NotUnimodal&) {
      if (params.spatial_angle || attempt >= kMaxAngleRedraws) throw;
    }
  }
}

TrialOutcome run_trial(const Policy& policy, const CellKey& cell,
                       const ExperimentConfig& config, int trial,
                       bool record_trace) {
  auto instance =
      draw_trial_instance(config, cell.beams, cell.distance, cell.alpha, trial);
  Rng rng = seeded_stream(
      config.master_seed,
      mix_stream_id({kSamplingTag, static_cast<std::uint64_t>(cell.beams),
                     bits(cell.distance), bits(cell.alpha),
                     static_cast<std::uint64_t>(trial)}));
  PolicyRun run = policy.run(instance, cell.budget, rng, record_trace);

  TrialOutcome out;
  out.output_arm = run.output_arm;
  out.optimal_arm = instance.optimal();
  out.correct = run.output_arm == instance.optimal();
  out.samples_used = run.samples_used;
  if (config.period > cell.budget)
    out.throughput = throughput(run.output_arm, instance, config.period, cell.budget);
  if (run.trace) out.trace = std::move(*run.trace);
  return out;
}

namespace {

std::vector<std::unique_ptr<Policy>> policies_for(std::span<const CellKey> cells) {
  std::vector<std::unique_ptr<Policy>> out;
  out.reserve(cells.size());
  for (const auto& c : cells) out.push_back(make_policy(c.policy));
  return out;
}

}  // namespace

std::vector<TrialOutcome> run_trials_serial(const ExperimentConfig& config,
                                            std::span<const CellKey> cells,
                                            std::span<const TrialTask> tasks,
                                            bool record_trace) {
  auto policies = policies_for(cells);
  std::vector<TrialOutcome> out(tasks.size());
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto& t = tasks[i];
    out[i] = run_trial(*policies[t.cell], cells[t.cell], config, t.trial, record_trace);
  }
  return out;
}

std::vector<TrialOutcome> run_trials_parallel(const ExperimentConfig& config,
                                              std::span<const CellKey> cells,
                                              std::span<const TrialTask> tasks,
                                              int workers, bool record_trace) {
  auto policies = policies_for(cells);
  std::vector<TrialOutcome> out(tasks.size());
  if (workers <= 0) workers = omp_get_max_threads();
  const auto n = static_cast<std::int64_t>(tasks.size());
  std::exception_ptr error;

#pragma omp parallel for schedule(dynamic, 8) num_threads(workers)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      const auto& t = tasks[i];
      out[i] = run_trial(*policies[t.cell], cells[t.cell], config, t.trial,
                         record_trace);
    } catch (...) {
#pragma omp critical(ub3_trial_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

double binomial_ci95(double rate, int trials) {
  return 1.96 * std::sqrt(rate * (1.0 - rate) / trials);
}

double t_interval95(double stddev, int trials) {
  if (trials < 2) return 0.0;
  boost::math::students_t dist(trials - 1);
  return boost::math::quantile(dist, 0.975) * stddev / std::sqrt(trials);
}

TrialBatch summarize(const CellKey& cell, std::span<const TrialOutcome> outcomes,
                     const ExperimentConfig& config) {
  TrialBatch b;
  b.key = cell;
  b.trials = static_cast<int>(outcomes.size());
  b.has_throughput = config.metric != Metric::error_prob;
  if (outcomes.empty()) return b;

  double n = static_cast<double>(outcomes.size());
  double wrong = 0, tp_sum = 0, used = 0;
  for (const auto& o : outcomes) {
    wrong += o.correct ? 0.0 : 1.0;
    tp_sum += o.throughput;
    used += static_cast<double>(o.samples_used);
  }
  b.error_rate = wrong / n;
  b.error_ci95 = binomial_ci95(b.error_rate, b.trials);
  b.mean_throughput = tp_sum / n;
  b.mean_samples_used = used / n;

  double ss = 0;
  for (const auto& o : outcomes) {
    double dev = o.throughput - b.mean_throughput;
    ss += dev * dev;
  }
  double sd = b.trials > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  b.throughput_ci95 = t_interval95(sd, b.trials);
  return b;
}

SweepResult run_sweep(const ExperimentConfig& config, const SweepOptions& options) {
  config.validate();
  auto cells = enumerate_cells(config);

  std::vector<std::optional<std::string>> skipped(cells.size());
  std::vector<CellKey> live;
  std::vector<std::size_t> live_slot(cells.size(), 0);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    auto policy = make_policy(cells[c].policy);
    auto need = policy->min_budget(cells[c].beams);
    if (cells[c].budget < need) {
      skipped[c] = "BudgetTooSmall: " + cells[c].policy + " needs T1 >= " +
                   std::to_string(need) + " for K=" + std::to_string(cells[c].beams);
      continue;
    }
    live_slot[c] = live.size();
    live.push_back(cells[c]);
  }

  std::vector<TrialTask> tasks;
  tasks.reserve(live.size() * static_cast<std::size_t>(config.trials));
  for (std::size_t c = 0; c < live.size(); ++c)
    for (int t = 0; t < config.trials; ++t) tasks.push_back({c, t});

  auto outcomes =
      options.workers == 1
          ? run_trials_serial(config, live, tasks, options.record_trace)
          : run_trials_parallel(config, live, tasks, options.workers,
                                options.record_trace);

  SweepResult result;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (skipped[c]) {
      TrialBatch b;
      b.key = cells[c];
      b.trials = config.trials;
      b.skipped = skipped[c];
      b.has_throughput = config.metric != Metric::error_prob;
      result.batches.push_back(std::move(b));
      if (options.keep_outcomes || options.record_trace) result.outcomes.emplace_back();
      continue;
    }
    auto first = outcomes.begin() +
                 static_cast<std::ptrdiff_t>(live_slot[c]) * config.trials;
    std::span<const TrialOutcome> slice(&*first, static_cast<std::size_t>(config.trials));
    result.batches.push_back(summarize(cells[c], slice, config));
    if (options.keep_outcomes || options.record_trace)
      result.outcomes.emplace_back(first, first + config.trials);
  }
  return result;
}

std::string format_results(std::span<const TrialBatch> batches) {
  std::vector<const TrialBatch*> rows;
  for (const auto& b : batches) rows.push_back(&b);
  std::stable_sort(rows.begin(), rows.end(),
                   [](const TrialBatch* a, const TrialBatch* b) { return a->key < b->key; });

  std::string out =
      "policy,K,T1,d,alpha,trials,error_rate,error_ci95,mean_throughput,"
      "throughput_ci95,mean_samples_used\n";
  for (const auto* b : rows) {
    out += b->key.policy + ',' + std::to_string(b->key.beams) + ',' +
           std::to_string(b->key.budget) + ',' + fmt6(b->key.distance) + ',' +
           fmt6(b->key.alpha) + ',' + std::to_string(b->trials) + ',';
    if (b->skipped) {
      out += "NA,NA,NA,NA,NA\n";
      continue;
    }
    out += fmt6(b->error_rate) + ',' + fmt6(b->error_ci95) + ',';
    if (b->has_throughput)
      out += fmt6(b->mean_throughput) + ',' + fmt6(b->throughput_ci95) + ',';
    else
      out += "NA,NA,";
    out += fmt6(b->mean_samples_used) + '\n';
  }
  return out;
}

void write_results(std::span<const TrialBatch> batches, const std::string& path) {
  if (batches.empty()) throw std::invalid_argument("no results to write");
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << format_results(batches);
    if (!out) throw IoError("write to " + path + " failed");
  }

  std::string skipped;
  for (const auto& b : batches)
    if (b.skipped)
      skipped += b.key.policy + ',' + std::to_string(b.key.beams) + ',' +
                 std::to_string(b.key.budget) + ',' + fmt6(b.key.distance) + ',' +
                 fmt6(b.key.alpha) + ',' + *b.skipped + '\n';
  if (skipped.empty()) return;
  std::ofstream log(path + ".skipped", std::ios::binary);
  if (!log) throw IoError("cannot open " + path + ".skipped for writing");
  log << "policy,K,T1,d,alpha,reason\n" << skipped;
  if (!log) throw IoError("write to " + path + ".skipped failed");
}

void write_traces(const SweepResult& result, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "policy,K,T1,d,alpha,trial,slot,arm,reward\n";
  char buf[32];
  for (std::size_t c = 0; c < result.outcomes.size(); ++c) {
    const auto& key = result.batches[c].key;
    std::string prefix = key.policy + ',' + std::to_string(key.beams) + ',' +
                         std::to_string(key.budget) + ',' + fmt6(key.distance) +
                         ',' + fmt6(key.alpha) + ',';
    for (std::size_t t = 0; t < result.outcomes[c].size(); ++t)
      for (const auto& e : result.outcomes[c][t].trace) {
        std::snprintf(buf, sizeof buf, "%.9g", e.reward);
        out << prefix << t << ',' << e.slot << ',' << e.arm << ',' << buf << '\n';
      }
  }
  if (!out) throw IoError("write to " + path + " failed");
}

}  // namespace ub3
