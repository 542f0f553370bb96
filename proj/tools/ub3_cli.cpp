#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ub3/bounds.hpp"
#include "ub3/channel.hpp"
#include "ub3/harness.hpp"
#include "ub3/selftest.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 1, kIo = 2, kSelftest = 3 };

int cmd_sweep(const std::string& config_path, std::string out, int workers,
              std::optional<std::uint64_t> seed, std::optional<int> trials,
              bool trace) {
  auto config = ub3::load_config(config_path);
  if (seed) config.master_seed = *seed;
  if (trials) config.trials = *trials;
  if (out.empty()) out = config.output;
  if (trace && out.empty())
    throw ub3::ConfigError("--trace needs an output path");

  ub3::SweepOptions opt;
  opt.workers = workers;
  opt.record_trace = trace;
  auto result = ub3::run_sweep(config, opt);
  if (out.empty()) {
    std::cout << ub3::format_results(result.batches);
  } else {
    ub3::write_results(result.batches, out);
    if (trace) ub3::write_traces(result, out + ".trace");
    std::cerr << "wrote " << result.batches.size() << " cells to " << out << '\n';
  }
  return kOk;
}

int cmd_selftest(std::uint64_t seed) {
  bool all = true;
  for (const auto& c : ub3::run_selftest(seed)) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name;
    if (!c.detail.empty()) std::cout << " (" << c.detail << ')';
    std::cout << '\n';
    all = all && c.passed;
  }
  return all ? kOk : kSelftest;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fixed-budget unimodal bandit beam alignment"};
  app.require_subcommand(1);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Run a Monte-Carlo sweep from a config file");
  std::string config_path, out;
  int workers = 0;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  bool trace = false;
  auto* positional = sweep->add_option("path", config_path, "key=value config file");
  sweep->add_option("--config", config_path, "same as the positional argument")
      ->excludes(positional);
  sweep->add_option("--out", out, "CSV output path (default: config 'out', else stdout)");
  sweep->add_option("--workers", workers, "OpenMP threads; 1 runs the serial kernel")
      ->check(CLI::NonNegativeNumber);
  sweep->add_option("--seed", seed, "override the master seed");
  sweep->add_option("--trials", trials, "override the trial count")->check(CLI::PositiveNumber);
  sweep->add_flag("--trace", trace, "also write per-sample traces to <out>.trace");

  // bound
  auto* bound = app.add_subcommand("bound", "Evaluate error-probability bounds");
  bound->require_subcommand(1);
  std::int64_t budget = 0;
  int beams = 0;

  auto* upper = bound->add_subcommand("upper", "UB3 upper bound");
  double gap = 0.0, range = 1.0;
  std::string instance_path;
  bool integer_l = false;
  upper->add_option("--T1", budget, "exploration budget")->required();
  upper->add_option("--K", beams, "number of arms");
  upper->add_option("--gap", gap, "smallest adjacent gap D_L");
  upper->add_option("--range", range, "reward range the gap is measured on");
  upper->add_option("--instance", instance_path, "read K, gap and range from an instance file");
  upper->add_flag("--integer-L", integer_l, "use the integer phase count");

  auto* lower = bound->add_subcommand("lower", "Lower bound on a Bernoulli family");
  std::string kind = "unimodal";
  int best = 0;
  std::vector<double> p;
  lower->add_option("--T1", budget, "exploration budget")->required();
  lower->add_option("--best", best, "best arm k* (1-based)")->required();
  lower->add_option("--p", p, "Bernoulli means, comma separated")->required()->delimiter(',');
  lower->add_option("--kind", kind, "neighbour | weighted | unimodal");

  // instance
  auto* instance = app.add_subcommand("instance", "Build or inspect channel instances");
  instance->require_subcommand(1);
  auto* build = instance->add_subcommand("build", "Draw a LOS instance");
  ub3::ChannelParams params;
  std::uint64_t inst_seed = 0;
  std::string noise = "exact", inst_out;
  build->add_option("--K", params.beams, "number of beams");
  build->add_option("--d", params.distance_m, "distance in metres");
  build->add_option("--alpha", params.path_loss_exponent, "path-loss exponent");
  build->add_option("--v", params.spatial_angle, "LOS spatial angle cos(theta)");
  build->add_option("--shadow", params.shadow_db, "shadowing in dB");
  build->add_option("--noise", noise, "exact | gaussian | none");
  build->add_option("--seed", inst_seed, "seed for the random draws");
  build->add_option("--out", inst_out, "write to file instead of stdout");
  auto* show = instance->add_subcommand("show", "Print an instance file with derived quantities");
  std::string show_path;
  show->add_option("file", show_path, "instance file")->required();

  // selftest
  auto* selftest = app.add_subcommand("selftest", "Run the invariant suite");
  std::uint64_t selftest_seed = 1;
  selftest->add_option("--seed", selftest_seed, "seed for the randomized checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*sweep && config_path.empty()) throw ub3::ConfigError("sweep needs a config file");
    if (*sweep) return cmd_sweep(config_path, out, workers, seed, trials, trace);
    if (*selftest) return cmd_selftest(selftest_seed);

    if (*upper) {
      if (!instance_path.empty()) {
        auto inst = ub3::load_instance(instance_path);
        beams = inst.arm_count();
        gap = ub3::extract_gaps(inst).min_gap;
        range = inst.bound_width();
      }
      if (beams < 2) throw ub3::ConfigError("need --K or --instance");
      auto mode = integer_l ? ub3::PhaseCountMode::integer : ub3::PhaseCountMode::real;
      std::printf("%.10g\n", ub3::ub3_upper_bound(budget, beams, gap, range, mode));
      return kOk;
    }
    if (*lower) {
      auto fam = ub3::build_lower_bound_family(static_cast<int>(p.size()), best, p);
      auto which = ub3::parse_lower_bound_kind(kind);
      std::printf("%.10g\n", ub3::lower_bound_value(fam, budget, which));
      if (!ub3::lower_bound_budget_condition(fam, budget))
        std::cerr << "note: budget condition for the sqrt-free form does not hold\n";
      return kOk;
    }
    if (*build) {
      params.noise = ub3::parse_noise_model(noise);
      params.validate();
      auto inst = ub3::build_los_instance(params, inst_seed);
      if (inst_out.empty())
        std::cout << ub3::to_text(inst);
      else
        ub3::save_instance(inst, inst_out);
      return kOk;
    }
    if (*show) {
      auto inst = ub3::load_instance(show_path);
      std::cout << ub3::to_text(inst);
      std::printf("# mean_dbm=");
      for (int k = 1; k <= inst.arm_count(); ++k)
        std::printf("%s%.4f", k > 1 ? "," : "", ub3::watts_to_dbm(inst.mean(k)));
      std::printf("\n");
      try {
        std::printf("# min_gap=%.6g\n", ub3::extract_gaps(inst).min_gap);
      } catch (const ub3::DegenerateGaps&) {
        std::printf("# min_gap=0 (tied neighbours)\n");
      }
      return kOk;
    }
  } catch (const ub3::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  }
  return kConfig;
}
