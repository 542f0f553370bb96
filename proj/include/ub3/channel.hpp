#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ub3/core.hpp"

// Beam-alignment environments.
//
// A line-of-sight channel seen through a K-beam DFT codebook on a uniform
// linear array. Rewards are received signal strength in linear watts;
// conversions to dBm only happen at the edges (parameters in, reports out).

namespace ub3 {

struct NotUnimodal : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class NoiseModel {
  exact,            // |sqrt(P) h^H b_k + n|^2 with circular complex Gaussian n
  gaussian_approx,  // mean + Gaussian with the exact model's per-arm std
  bernoulli,        // synthetic Ber(mean) arms, means in [0, 1]
  none,             // deterministic: every sample is the mean
};

std::string to_string(NoiseModel model);
NoiseModel parse_noise_model(std::string_view text);

struct ChannelParams {
  double carrier_hz = 60e9;
  double bandwidth_hz = 2.16e9;
  double noise_dbm_per_hz = -174.0;
  double tx_power_dbm = 50.0;
  int beams = 16;
  double distance_m = 20.0;
  double path_loss_exponent = 1.74;
  double shadow_sigma_db = 2.0;
  double spacing_wavelengths = 0.5;     // D / lambda
  std::optional<double> spatial_angle;  // v = cos(theta); drawn U[-1, 1] if unset
  std::optional<double> shadow_db;      // chi; drawn N(0, sigma) if unset
  NoiseModel noise = NoiseModel::exact;

  void validate() const;
};

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

// Spatial angles w_k = (2k - K) / K of the DFT codebook, k = 1..K.
std::vector<double> codebook_angles(int beams);

// a(v): entries exp(j 2 pi (D/lambda) n v), n = 0..K-1.
std::vector<std::complex<double>> steering_vector(double spatial_angle,
                                                  int beams,
                                                  double spacing_wavelengths);
// b_k = a(w_k) / sqrt(K).
std::vector<std::complex<double>> codebook_beam(BeamIndex k, int beams,
                                                double spacing_wavelengths);

// Array factor sin^2(K pi D x / lambda) / sin^2(pi D x / lambda), K^2 at the
// removable singularities.
double directivity(double misalignment, int beams,
                   double spacing_wavelengths = 0.5);

// Log-distance path loss in dB; frequency in MHz, distance in metres.
double path_loss_db(double freq_mhz, double distance_m, double alpha,
                    double shadow_db);

double noise_power_watts(const ChannelParams& params);

// Mean RSS per codebook column (watts) for a given LOS angle and shadowing.
std::vector<double> los_mean_profile(const ChannelParams& params,
                                     double spatial_angle, double shadow_db);

// Order in which to walk the codebook so the mean profile is unimodal: the
// DFT beams wrap around (w = 1 and w = -1 alias), so the walk starts at the
// first beam past the direction opposite to v. Entry i is the codebook
// column played as arm i + 1.
std::vector<int> unimodal_beam_path(double spatial_angle, int beams);

// Strictly increasing up to the argmax and strictly decreasing after it.
bool is_strictly_unimodal(std::span<const double> means);

class ChannelInstance : public Environment {
 public:
  ChannelInstance(std::vector<double> means, NoiseModel noise,
                  double noise_power, double bound_lo, double bound_hi);

  static ChannelInstance noiseless(std::vector<double> means);
  static ChannelInstance bernoulli(std::vector<double> probabilities);

  int arm_count() const override { return static_cast<int>(means_.size()); }
  double sample(BeamIndex k, Rng& rng) const override;
  double mean(BeamIndex k) const override { return means_.at(k - 1); }

  const std::vector<double>& means() const { return means_; }
  BeamIndex optimal() const { return optimal_; }
  NoiseModel noise_model() const { return noise_; }
  double noise_power() const { return noise_power_; }
  double bound_lo() const { return bound_lo_; }
  double bound_hi() const { return bound_hi_; }
  double bound_width() const { return bound_hi_ - bound_lo_; }
  // Per-sample standard deviation of arm k under the exact model.
  double rss_stddev(BeamIndex k) const;

  // LOS metadata; empty / NaN for synthetic instances.
  std::vector<int> beam_order;
  double spatial_angle = std::numeric_limits<double>::quiet_NaN();
  double shadow_db = std::numeric_limits<double>::quiet_NaN();

 private:
  std::vector<double> means_;
  NoiseModel noise_;
  double noise_power_;
  double bound_lo_;
  double bound_hi_;
  BeamIndex optimal_;
};

inline double sample_rss(const ChannelInstance& instance, BeamIndex k,
                         Rng& rng) {
  return instance.sample(k, rng);
}

// Throws NotUnimodal when the walk along unimodal_beam_path still has ties
// (v on a beam grid point or exactly between two beams).
ChannelInstance build_los_instance(const ChannelParams& params, Rng& rng);
ChannelInstance build_los_instance(const ChannelParams& params,
                                   std::uint64_t seed);

// Text form: key=value lines, doubles printed round-trip exact.
std::string to_text(const ChannelInstance& instance);
ChannelInstance instance_from_text(std::string_view text);
void save_instance(const ChannelInstance& instance, const std::string& path);
ChannelInstance load_instance(const std::string& path);

}  // namespace ub3
