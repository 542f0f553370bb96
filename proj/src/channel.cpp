#include "ub3/channel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <unordered_map>

namespace ub3 {

namespace {

constexpr double kPi = std::numbers::pi;

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string join(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += format_double(xs[i]);
  }
  return out;
}

double parse_double(std::string_view text) {
  std::string s(text);
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size())
    throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = text.find(sep, start);
    out.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

BeamIndex argmax_arm(const std::vector<double>& means) {
  return static_cast<BeamIndex>(argmax_lowest(means)) + 1;
}

}  // namespace

std::string to_string(NoiseModel model) {
  switch (model) {
    case NoiseModel::exact: return "exact";
    case NoiseModel::gaussian_approx: return "gaussian";
    case NoiseModel::bernoulli: return "bernoulli";
    case NoiseModel::none: return "none";
  }
  return "?";
}

NoiseModel parse_noise_model(std::string_view text) {
  if (text == "exact") return NoiseModel::exact;
  if (text == "gaussian" || text == "gaussian_approx") return NoiseModel::gaussian_approx;
  if (text == "bernoulli") return NoiseModel::bernoulli;
  if (text == "none") return NoiseModel::none;
  throw std::invalid_argument("unknown noise model '" + std::string(text) + "'");
}

void ChannelParams::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
  };
  require(carrier_hz > 0, "carrier frequency must be positive");
  require(bandwidth_hz > 0, "bandwidth must be positive");
  require(beams >= 2, "need at least 2 beams");
  require(distance_m > 0, "distance must be positive");
  require(path_loss_exponent >= 1 && path_loss_exponent <= 4,
          "path-loss exponent must lie in [1, 4]");
  require(shadow_sigma_db >= 0, "shadow-fading sigma must be non-negative");
  require(spacing_wavelengths > 0, "antenna spacing must be positive");
  require(!spatial_angle || (*spatial_angle >= -1 && *spatial_angle <= 1),
          "spatial angle must lie in [-1, 1]");
  require(noise != NoiseModel::bernoulli,
          "bernoulli noise is only for synthetic instances");
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

std::vector<double> codebook_angles(int beams) {
  std::vector<double> w(beams);
  for (int k = 1; k <= beams; ++k)
    w[k - 1] = static_cast<double>(2 * k - beams) / beams;
  return w;
}

std::vector<std::complex<double>> steering_vector(double spatial_angle,
                                                  int beams,
                                                  double spacing_wavelengths) {
  std::vector<std::complex<double>> a(beams);
  for (int n = 0; n < beams; ++n)
    a[n] = std::polar(1.0, 2.0 * kPi * spacing_wavelengths * n * spatial_angle);
  return a;
}

std::vector<std::complex<double>> codebook_beam(BeamIndex k, int beams,
                                                double spacing_wavelengths) {
  double w = static_cast<double>(2 * k - beams) / beams;
  auto b = steering_vector(w, beams, spacing_wavelengths);
  double scale = 1.0 / std::sqrt(static_cast<double>(beams));
  for (auto& x : b) x *= scale;
  return b;
}

double directivity(double misalignment, int beams, double spacing_wavelengths) {
  double phase = kPi * spacing_wavelengths * misalignment;
  double den = std::sin(phase);
  if (std::abs(den) < 1e-12) return static_cast<double>(beams) * beams;
  double num = std::sin(beams * phase);
  return (num * num) / (den * den);
}

double path_loss_db(double freq_mhz, double distance_m, double alpha,
                    double shadow_db) {
  if (!(freq_mhz > 0) || !(distance_m > 0))
    throw std::invalid_argument("frequency and distance must be positive");
  return -27.5 + 20.0 * std::log10(freq_mhz) +
         10.0 * alpha * std::log10(distance_m) + shadow_db;
}

double noise_power_watts(const ChannelParams& params) {
  return dbm_to_watts(params.noise_dbm_per_hz +
                      10.0 * std::log10(params.bandwidth_hz));
}

std::vector<double> los_mean_profile(const ChannelParams& params,
                                     double spatial_angle, double shadow_db) {
  const int K = params.beams;
  double pl = path_loss_db(params.carrier_hz / 1e6, params.distance_m,
                           params.path_loss_exponent, shadow_db);
  double gain_sq = std::pow(10.0, -pl / 10.0);
  double tx = dbm_to_watts(params.tx_power_dbm);
  double floor = noise_power_watts(params);
  auto w = codebook_angles(K);
  std::vector<double> means(K);
  for (int k = 0; k < K; ++k)
    means[k] = tx * gain_sq *
                   directivity(w[k] - spatial_angle, K,
                               params.spacing_wavelengths) / K +
               floor;
  return means;
}

std::vector<int> unimodal_beam_path(double spatial_angle, int beams) {
  double opposite = spatial_angle > 0 ? spatial_angle - 1.0 : spatial_angle + 1.0;
  int start = 1;
  for (int k = 1; k <= beams; ++k) {
    if (static_cast<double>(2 * k - beams) / beams > opposite) {
      start = k;
      break;
    }
  }
  std::vector<int> path(beams);
  for (int i = 0; i < beams; ++i) path[i] = (start - 1 + i) % beams + 1;
  return path;
}

bool is_strictly_unimodal(std::span<const double> means) {
  if (means.empty()) return false;
  std::size_t i = 1;
  while (i < means.size() && means[i] > means[i - 1]) ++i;
  while (i < means.size() && means[i] < means[i - 1]) ++i;
  return i == means.size();
}

ChannelInstance::ChannelInstance(std::vector<double> means, NoiseModel noise,
                                 double noise_power, double bound_lo,
                                 double bound_hi)
    : means_(std::move(means)),
      noise_(noise),
      noise_power_(noise_power),
      bound_lo_(bound_lo),
      bound_hi_(bound_hi) {
  if (means_.size() < 2)
    throw std::invalid_argument("an instance needs at least 2 arms");
  for (double m : means_)
    if (!std::isfinite(m) || m < 0)
      throw std::invalid_argument("arm means must be finite and non-negative");
  if (noise_ == NoiseModel::bernoulli)
    for (double m : means_)
      if (m > 1) throw std::invalid_argument("bernoulli means must lie in [0, 1]");
  if (!(bound_lo_ <= bound_hi_))
    throw std::invalid_argument("empty reward interval");
  optimal_ = argmax_arm(means_);
}

ChannelInstance ChannelInstance::noiseless(std::vector<double> means) {
  auto [lo, hi] = std::minmax_element(means.begin(), means.end());
  double l = means.empty() ? 0 : *lo, h = means.empty() ? 0 : *hi;
  return ChannelInstance(std::move(means), NoiseModel::none, 0.0, l, h);
}

ChannelInstance ChannelInstance::bernoulli(std::vector<double> probabilities) {
  return ChannelInstance(std::move(probabilities), NoiseModel::bernoulli, 0.0,
                         0.0, 1.0);
}

double ChannelInstance::rss_stddev(BeamIndex k) const {
  double n = noise_power_;
  double signal = std::max(mean(k) - n, 0.0);
  return std::sqrt(n * n + 2.0 * signal * n);
}

double ChannelInstance::sample(BeamIndex k, Rng& rng) const {
  double mu = mean(k);
  switch (noise_) {
    case NoiseModel::none:
      return mu;
    case NoiseModel::bernoulli:
      return std::bernoulli_distribution(mu)(rng) ? 1.0 : 0.0;
    case NoiseModel::exact: {
      if (noise_power_ == 0.0) return mu;
      // only |signal| matters for a circular noise, so take it real
      double s = std::sqrt(std::max(mu - noise_power_, 0.0));
      std::normal_distribution<double> n(0.0, std::sqrt(noise_power_ / 2.0));
      double re = s + n(rng);
      double im = n(rng);
      return std::clamp(re * re + im * im, bound_lo_, bound_hi_);
    }
    case NoiseModel::gaussian_approx: {
      double sd = rss_stddev(k);
      if (sd == 0.0) return mu;
      return std::clamp(std::normal_distribution<double>(mu, sd)(rng),
                        bound_lo_, bound_hi_);
    }
  }
  return mu;
}

ChannelInstance build_los_instance(const ChannelParams& params, Rng& rng) {
  params.validate();
  double v = params.spatial_angle
                 ? *params.spatial_angle
                 : std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
  double chi = params.shadow_db ? *params.shadow_db
               : params.shadow_sigma_db > 0
                   ? std::normal_distribution<double>(0.0, params.shadow_sigma_db)(rng)
                   : 0.0;

  auto profile = los_mean_profile(params, v, chi);
  auto path = unimodal_beam_path(v, params.beams);
  std::vector<double> means(params.beams);
  for (int i = 0; i < params.beams; ++i) means[i] = profile[path[i] - 1];
  if (!is_strictly_unimodal(means))
    throw NotUnimodal("mean RSS profile has ties for v=" + format_double(v) +
                      ", K=" + std::to_string(params.beams));

  auto [lo_it, hi_it] = std::minmax_element(means.begin(), means.end());
  double lo = 0.0, hi = *hi_it;
  switch (params.noise) {
    case NoiseModel::exact: lo = 0.0; hi = 10.0 * *hi_it; break;
    case NoiseModel::gaussian_approx: lo = *lo_it / 10.0; hi = 10.0 * *hi_it; break;
    default: lo = *lo_it; break;
  }
  double n0 = params.noise == NoiseModel::none ? 0.0 : noise_power_watts(params);
  ChannelInstance inst(std::move(means), params.noise, n0, lo, hi);
  inst.beam_order = std::move(path);
  inst.spatial_angle = v;
  inst.shadow_db = chi;
  return inst;
}

ChannelInstance build_los_instance(const ChannelParams& params,
                                   std::uint64_t seed) {
  Rng rng = seeded_stream(seed, 0);
  return build_los_instance(params, rng);
}

std::string to_text(const ChannelInstance& instance) {
  std::ostringstream os;
  os << "K=" << instance.arm_count() << '\n'
     << "noise_model=" << to_string(instance.noise_model()) << '\n'
     << "noise_power=" << format_double(instance.noise_power()) << '\n'
     << "bound_lo=" << format_double(instance.bound_lo()) << '\n'
     << "bound_hi=" << format_double(instance.bound_hi()) << '\n'
     << "optimal=" << instance.optimal() << '\n';
  if (!std::isnan(instance.spatial_angle))
    os << "spatial_angle=" << format_double(instance.spatial_angle) << '\n';
  if (!std::isnan(instance.shadow_db))
    os << "shadow_db=" << format_double(instance.shadow_db) << '\n';
  if (!instance.beam_order.empty()) {
    os << "beam_order=";
    for (std::size_t i = 0; i < instance.beam_order.size(); ++i)
      os << (i ? "," : "") << instance.beam_order[i];
    os << '\n';
  }
  os << "means=" << join(instance.means()) << '\n';
  return os.str();
}

ChannelInstance instance_from_text(std::string_view text) {
  std::unordered_map<std::string, std::string> kv;
  for (auto line : split(text, '\n')) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw std::invalid_argument("malformed instance line: " + std::string(line));
    kv[std::string(line.substr(0, eq))] = std::string(line.substr(eq + 1));
  }
  auto need = [&](const char* key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end())
      throw std::invalid_argument(std::string("instance missing key ") + key);
    return it->second;
  };

  std::vector<double> means;
  for (auto tok : split(need("means"), ',')) means.push_back(parse_double(tok));
  int K = static_cast<int>(parse_double(need("K")));
  if (K != static_cast<int>(means.size()))
    throw std::invalid_argument("K does not match the means vector length");

  ChannelInstance inst(std::move(means), parse_noise_model(need("noise_model")),
                       parse_double(need("noise_power")),
                       parse_double(need("bound_lo")),
                       parse_double(need("bound_hi")));
  if (static_cast<int>(parse_double(need("optimal"))) != inst.optimal())
    throw std::invalid_argument("recorded optimal arm disagrees with the means");
  if (kv.count("spatial_angle")) inst.spatial_angle = parse_double(kv["spatial_angle"]);
  if (kv.count("shadow_db")) inst.shadow_db = parse_double(kv["shadow_db"]);
  if (kv.count("beam_order"))
    for (auto tok : split(kv["beam_order"], ','))
      inst.beam_order.push_back(static_cast<int>(parse_double(tok)));
  return inst;
}

void save_instance(const ChannelInstance& instance, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << to_text(instance);
  if (!out) throw IoError("write to " + path + " failed");
}

ChannelInstance load_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return instance_from_text(ss.str());
}

}  // namespace ub3
