#include "ub3/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <random>

#include "ub3/baselines.hpp"
#include "ub3/bounds.hpp"
#include "ub3/channel.hpp"
#include "ub3/elimination.hpp"

namespace ub3 {

namespace {

// Strictly unimodal means on K arms peaked at `peak`.
std::vector<double> tent(int arms, int peak) {
  std::vector<double> m(arms);
  for (int k = 1; k <= arms; ++k) m[k - 1] = std::exp(-0.05 * std::abs(k - peak));
  return m;
}

SelftestCheck budget_exactness(Rng& rng) {
  SelftestCheck c{"budget exactness", true, ""};
  Ub3Policy ub3;
  std::uniform_int_distribution<int> pick_k(4, 128);
  for (int i = 0; i < 500 && c.passed; ++i) {
    int K = pick_k(rng);
    auto lo = ub3.min_budget(K);
    std::uniform_int_distribution<std::int64_t> pick_t(lo, lo + 5000);
    auto T1 = pick_t(rng);
    auto env = ChannelInstance::noiseless(tent(K, 1 + static_cast<int>(rng() % K)));
    auto run = ub3.run(env, T1, rng);
    if (run.samples_used != T1 || build_schedule(T1, K).total() != T1) {
      c.passed = false;
      c.detail = "K=" + std::to_string(K) + " T1=" + std::to_string(T1);
    }
  }
  for (int L = 1; L <= 12 && c.passed; ++L)
    if (std::abs(schedule_share_sum(L) - 1.0) > 1e-12) {
      c.passed = false;
      c.detail = "share sum off for L=" + std::to_string(L);
    }
  return c;
}

SelftestCheck zero_noise_oracle(Rng& rng) {
  SelftestCheck c{"zero-noise oracle", true, ""};
  Ub3Policy ub3;
  LsePolicy lse;
  SequentialHalving sh;
  const Policy* policies[] = {&ub3, &lse, &sh};
  for (int K = 4; K <= 32 && c.passed; ++K)
    for (int peak = 1; peak <= K && c.passed; ++peak) {
      auto env = ChannelInstance::noiseless(tent(K, peak));
      for (const Policy* p : policies) {
        auto run = p->run(env, p->min_budget(K), rng);
        if (run.output_arm != peak) {
          c.passed = false;
          c.detail = p->name() + " K=" + std::to_string(K) + " peak=" +
                     std::to_string(peak);
        }
      }
    }
  return c;
}

SelftestCheck safe_elimination(Rng& rng) {
  SelftestCheck c{"safe elimination", true, ""};
  Ub3Policy ub3;
  for (int K = 4; K <= 64 && c.passed; ++K)
    for (int peak = 1; peak <= K && c.passed; ++peak) {
      auto env = ChannelInstance::noiseless(tent(K, peak));
      auto log = ub3.run_logged(env, ub3.min_budget(K), rng);
      bool ok = log.terminal_window.contains(peak);
      for (const auto& ph : log.phases) ok = ok && ph.window.contains(peak);
      if (!ok) {
        c.passed = false;
        c.detail = "K=" + std::to_string(K) + " peak=" + std::to_string(peak);
      }
    }
  return c;
}

SelftestCheck flip_complexity_floor(Rng& rng) {
  SelftestCheck c{"flip complexity >= 8/5", true, ""};
  std::uniform_real_distribution<double> below(0.25, 0.5);
  for (int i = 0; i < 1000 && c.passed; ++i) {
    int K = 3 + static_cast<int>(rng() % 14);
    int best = 2 + static_cast<int>(rng() % (K - 2));
    std::vector<double> p(K, 0.5);
    for (int k = best - 1; k >= 1; --k) p[k - 1] = std::min(p[k], below(rng));
    for (int k = best + 1; k <= K; ++k) p[k - 1] = std::min(p[k - 2], below(rng));
    p[best - 2] = std::min(p[best - 2], 0.4999);
    p[best] = std::min(p[best], 0.4999);
    auto fam = build_lower_bound_family(K, best, p);
    double h = flip_complexity(fam.base);
    if (!(h >= 1.6 - 1e-12)) {
      c.passed = false;
      c.detail = "value " + std::to_string(h);
    }
  }
  return c;
}

SelftestCheck codebook_orthonormal() {
  SelftestCheck c{"codebook orthonormality", true, ""};
  for (int K : {4, 16, 64}) {
    std::vector<std::vector<std::complex<double>>> beams;
    for (int k = 1; k <= K; ++k) beams.push_back(codebook_beam(k, K, 0.5));
    for (int a = 0; a < K; ++a)
      for (int b = 0; b < K; ++b) {
        std::complex<double> dot = 0;
        for (int n = 0; n < K; ++n) dot += std::conj(beams[a][n]) * beams[b][n];
        double want = a == b ? 1.0 : 0.0;
        if (std::abs(dot - want) > 1e-9) {
          c.passed = false;
          c.detail = "K=" + std::to_string(K);
          return c;
        }
      }
  }
  return c;
}

SelftestCheck los_unimodality(Rng& rng) {
  SelftestCheck c{"LOS unimodality", true, ""};
  for (int i = 0; i < 1000 && c.passed; ++i) {
    ChannelParams params;
    params.beams = (i % 3 == 0) ? 16 : (i % 3 == 1 ? 64 : 128);
    params.noise = NoiseModel::none;
    try {
      auto inst = build_los_instance(params, rng);
      if (!is_strictly_unimodal(inst.means())) {
        c.passed = false;
        c.detail = "draw " + std::to_string(i);
      }
    } catch (const NotUnimodal&) {
      // angle landed on a tie; measure-zero, skip
    }
  }
  return c;
}

}  // namespace

std::vector<SelftestCheck> run_selftest(unsigned long long seed) {
  Rng rng = seeded_stream(seed, 0);
  return {budget_exactness(rng),      zero_noise_oracle(rng),
          safe_elimination(rng),      flip_complexity_floor(rng),
          codebook_orthonormal(),     los_unimodality(rng)};
}

}  // namespace ub3
