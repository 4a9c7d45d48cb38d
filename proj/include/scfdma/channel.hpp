#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace scfdma {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Equalizer { mmse, zf };

/// COST-231 Hata urban model. Distances in metres, heights in metres.
struct PathLossModel {
  double carrier_mhz = 2000.0;
  double bs_height_m = 30.0;
  double ms_height_m = 1.5;
  double metro_correction_db = 3.0;

  double loss_db(double distance_m) const {
    const double lf = std::log10(carrier_mhz);
    const double lhb = std::log10(bs_height_m);
    const double a_hm = (1.1 * lf - 0.7) * ms_height_m - (1.56 * lf - 0.8);
    return 46.3 + 33.9 * lf - 13.82 * lhb - a_hm + (44.9 - 6.55 * lhb) * std::log10(distance_m / 1000.0) +
           metro_correction_db;
  }
};

struct ScenarioConfig {
  int n_users = 10;
  int n_subchannels = 25;
  double subchannel_bandwidth_hz = 180e3;
  double cell_radius_m = 500.0;
  double min_distance_m = 35.0;
  PathLossModel path_loss;
  double shadowing_std_db = 8.0;
  double noise_psd_dbm_hz = -174.0;
  double noise_figure_db = 0.0;
  std::vector<double> p_max_w{0.2};   // one value for everyone, or one per user
  std::vector<double> p_peak_w{0.1};
  bool rayleigh_fading = true;
  double rayleigh_mean_power = 1.0;
  Equalizer equalizer = Equalizer::mmse;

  double p_max(int k) const { return pick(p_max_w, k, "p_max_w"); }
  double p_peak(int k) const { return pick(p_peak_w, k, "p_peak_w"); }

  double noise_power_w() const {
    const double dbm = noise_psd_dbm_hz + 10.0 * std::log10(subchannel_bandwidth_hz) + noise_figure_db;
    return std::pow(10.0, (dbm - 30.0) / 10.0);
  }

  void validate() const {
    if (n_users < 1) throw std::invalid_argument("n_users must be positive");
    if (n_subchannels < 1) throw std::invalid_argument("n_subchannels must be positive");
    if (!(subchannel_bandwidth_hz > 0)) throw std::invalid_argument("sub-channel bandwidth must be positive");
    if (!(min_distance_m > 0) || !(cell_radius_m > min_distance_m))
      throw std::invalid_argument("need 0 < min_distance_m < cell_radius_m");
    if (!(shadowing_std_db >= 0)) throw std::invalid_argument("shadowing std-dev must be non-negative");
    if (!(rayleigh_mean_power > 0)) throw std::invalid_argument("Rayleigh mean power must be positive");
    for (int k = 0; k < n_users; ++k) {
      if (!(p_max(k) > 0)) throw std::invalid_argument("p_max must be positive");
      if (!(p_peak(k) > 0)) throw std::invalid_argument("p_peak must be positive");
    }
  }

 private:
  double pick(const std::vector<double>& v, int k, const char* name) const {
    if (v.size() == 1) return v[0];
    if (v.size() != static_cast<std::size_t>(n_users))
      throw std::invalid_argument(std::string(name) + " must hold 1 or n_users values");
    return v[static_cast<std::size_t>(k)];
  }
};

/// Per-user, per-sub-channel gain over noise (1/W), so SNR = power * gain.
struct ChannelGains {
  RowMatrix gains;
  std::vector<double> distances_m;
  std::uint64_t seed = 0;

  int n_users() const { return static_cast<int>(gains.rows()); }
  int n_subchannels() const { return static_cast<int>(gains.cols()); }
  std::span<const double> row(int k) const {
    return {gains.data() + static_cast<std::ptrdiff_t>(k) * gains.cols(), static_cast<std::size_t>(gains.cols())};
  }
};

/// Users are dropped uniformly over the annulus [min_distance, radius].
/// Draw order per user: distance, shadowing, then one fading power per sub-channel.
inline ChannelGains generate_channel(const ScenarioConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> area(cfg.min_distance_m * cfg.min_distance_m,
                                              cfg.cell_radius_m * cfg.cell_radius_m);
  std::normal_distribution<double> shadow(0.0, cfg.shadowing_std_db);
  std::exponential_distribution<double> fade(1.0 / cfg.rayleigh_mean_power);

  ChannelGains out;
  out.seed = seed;
  out.gains.resize(cfg.n_users, cfg.n_subchannels);
  out.distances_m.resize(static_cast<std::size_t>(cfg.n_users));
  const double noise = cfg.noise_power_w();
  for (int k = 0; k < cfg.n_users; ++k) {
    const double d = std::sqrt(area(rng));
    out.distances_m[static_cast<std::size_t>(k)] = d;
    const double s = cfg.shadowing_std_db > 0 ? shadow(rng) : 0.0;
    const double large_scale = std::pow(10.0, -(cfg.path_loss.loss_db(d) + s) / 10.0) / noise;
    for (int n = 0; n < cfg.n_subchannels; ++n) {
      const double h2 = cfg.rayleigh_fading ? fade(rng) : 1.0;
      out.gains(k, n) = large_scale * h2;
    }
  }
  return out;
}

/// gamma = (1 / mean(x/(1+x)) - 1)^-1, written as mean(x/(1+x)) / mean(1/(1+x))
/// so high SNR does not cancel.
inline double effective_snr_mmse(std::span<const double> snr) {
  if (snr.empty()) throw std::invalid_argument("effective SNR needs at least one sub-channel");
  double num = 0, den = 0;
  for (double x : snr) {
    if (!(x > 0)) throw std::invalid_argument("per-sub-channel SNR must be positive");
    num += x / (1.0 + x);
    den += 1.0 / (1.0 + x);
  }
  return num / den;
}

/// Harmonic mean.
inline double effective_snr_zf(std::span<const double> snr) {
  if (snr.empty()) throw std::invalid_argument("effective SNR needs at least one sub-channel");
  double s = 0;
  for (double x : snr) {
    if (!(x > 0)) throw std::invalid_argument("per-sub-channel SNR must be positive");
    s += 1.0 / x;
  }
  return static_cast<double>(snr.size()) / s;
}

inline double effective_snr(Equalizer eq, std::span<const double> snr) {
  return eq == Equalizer::mmse ? effective_snr_mmse(snr) : effective_snr_zf(snr);
}

inline void write_gains_csv(std::ostream& os, const ChannelGains& g) {
  os << "user,subchannel,gain\n";
  char buf[64];
  for (int k = 0; k < g.n_users(); ++k)
    for (int n = 0; n < g.n_subchannels(); ++n) {
      std::snprintf(buf, sizeof buf, "%.12g", g.gains(k, n));
      os << k + 1 << ',' << n + 1 << ',' << buf << '\n';
    }
}

}  // namespace scfdma
