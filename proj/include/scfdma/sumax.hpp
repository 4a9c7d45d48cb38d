#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "scfdma/allocation.hpp"
#include "scfdma/channel.hpp"
#include "scfdma/patterns.hpp"

namespace scfdma {

/// Modulation schemes in ascending order, each with the linear SNR it needs.
struct ModulationTable {
  std::vector<std::string> names;
  std::vector<double> thresholds;
  std::vector<int> bits_per_symbol;

  /// QPSK / 16QAM / 64QAM with placeholder thresholds (about 3, 9 and 15 dB).
  static ModulationTable lte_default() { return {{"QPSK", "16QAM", "64QAM"}, {2.0, 8.0, 32.0}, {2, 4, 6}}; }

  std::size_t size() const { return thresholds.size(); }

  void validate() const {
    if (thresholds.empty()) throw std::invalid_argument("modulation table is empty");
    if (names.size() != thresholds.size() || bits_per_symbol.size() != thresholds.size())
      throw std::invalid_argument("modulation table columns differ in length");
    for (std::size_t m = 0; m < size(); ++m) {
      if (!(thresholds[m] > 0)) throw std::invalid_argument("modulation thresholds must be positive");
      if (bits_per_symbol[m] < 1) throw std::invalid_argument("bits per symbol must be positive");
      if (m > 0 && !(thresholds[m] > thresholds[m - 1]))
        throw std::invalid_argument("modulation thresholds must be strictly increasing");
    }
  }

  /// Single-entry table holding row m.
  ModulationTable only(std::size_t m) const {
    if (m >= size()) throw std::out_of_range("modulation index out of range");
    return {{names[m]}, {thresholds[m]}, {bits_per_symbol[m]}};
  }

  std::size_t index_of(const std::string& name) const {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw std::invalid_argument("unknown modulation " + name);
    return static_cast<std::size_t>(it - names.begin());
  }
};

/// Highest-order scheme whose threshold is met, or nothing.
inline std::optional<std::size_t> select_modulation(double snr, const ModulationTable& table) {
  std::optional<std::size_t> best;
  for (std::size_t m = 0; m < table.size(); ++m)
    if (table.thresholds[m] <= snr) best = m;
  return best;
}

/// (weight, number of sub-channels, effective SNR) -> utility.
using UtilityFn = std::function<double(double, int, double)>;

/// Weighted Shannon rate, one unit per sub-channel bandwidth.
inline double weighted_shannon_rate(double weight, int n_subchannels, double snr) {
  return weight * n_subchannels * std::log2(1.0 + snr);
}

/// Effective SNR when the user spreads min(p_peak, p_max / |pattern|) on
/// every sub-channel of a non-empty pattern.
inline double pattern_effective_snr(std::span<const double> gains, const Pattern& p, double p_max, double p_peak,
                                    Equalizer eq = Equalizer::mmse) {
  if (p.empty()) throw std::invalid_argument("effective SNR is undefined for the empty pattern");
  if (p.first < 0 || static_cast<std::size_t>(p.first + p.length) > gains.size())
    throw std::out_of_range("pattern exceeds the gain row");
  const double power = std::min(p_peak, p_max / p.length);
  std::vector<double> snr(static_cast<std::size_t>(p.length));
  for (int i = 0; i < p.length; ++i) snr[static_cast<std::size_t>(i)] = power * gains[static_cast<std::size_t>(p.first + i)];
  return effective_snr(eq, snr);
}

struct SumaxInstance {
  std::shared_ptr<const PatternSet> patterns;
  std::vector<double> weights;
  RowMatrix utilities;    // K x J, column 0 is zero
  RowMatrix pattern_snr;  // K x J, NaN marks the empty pattern

  int n_users() const { return static_cast<int>(utilities.rows()); }
  std::size_t n_patterns() const { return static_cast<std::size_t>(utilities.cols()); }
  double utility(int k, std::size_t j) const { return utilities(k, static_cast<Eigen::Index>(j)); }
  bool has_snr(int k, std::size_t j) const { return !std::isnan(pattern_snr(k, static_cast<Eigen::Index>(j))); }
};

inline SumaxInstance build_sumax(const ChannelGains& channel, const ScenarioConfig& cfg, std::vector<double> weights,
                                 std::shared_ptr<const PatternSet> patterns = nullptr,
                                 const UtilityFn& utility = weighted_shannon_rate) {
  const int k_users = channel.n_users();
  if (weights.empty()) weights.assign(static_cast<std::size_t>(k_users), 1.0);
  if (weights.size() != static_cast<std::size_t>(k_users))
    throw std::invalid_argument("need one weight per user");
  for (double w : weights)
    if (!(w >= 0) || !std::isfinite(w)) throw std::invalid_argument("user weights must be finite and non-negative");
  if (!patterns) patterns = std::make_shared<PatternSet>(channel.n_subchannels());
  if (patterns->n_subchannels() != channel.n_subchannels())
    throw std::invalid_argument("pattern set and channel disagree on the sub-channel count");

  SumaxInstance inst;
  inst.patterns = patterns;
  inst.weights = std::move(weights);
  const auto j_count = static_cast<Eigen::Index>(patterns->size());
  inst.utilities = RowMatrix::Zero(k_users, j_count);
  inst.pattern_snr = RowMatrix::Constant(k_users, j_count, std::numeric_limits<double>::quiet_NaN());
  for (int k = 0; k < k_users; ++k) {
    for (std::size_t j = 1; j < patterns->size(); ++j) {
      const Pattern& p = (*patterns)[j];
      const double g = pattern_effective_snr(channel.row(k), p, cfg.p_max(k), cfg.p_peak(k), cfg.equalizer);
      inst.pattern_snr(k, static_cast<Eigen::Index>(j)) = g;
      inst.utilities(k, static_cast<Eigen::Index>(j)) = utility(inst.weights[static_cast<std::size_t>(k)], p.length, g);
    }
  }
  return inst;
}

inline double sum_utility(const SumaxInstance& inst, const Allocation& alloc) {
  auto bad = validate_allocation(*inst.patterns, alloc, static_cast<std::size_t>(inst.n_users()));
  if (!bad.empty()) throw std::invalid_argument("invalid allocation: " + bad.front());
  double s = 0;
  for (std::size_t k = 0; k < alloc.size(); ++k) s += inst.utility(static_cast<int>(k), alloc[k].pattern);
  return s;
}

inline void write_utilities_csv(std::ostream& os, const SumaxInstance& inst) {
  os << "user,pattern,n_subchannels,snr,utility\n";
  char buf[96];
  for (int k = 0; k < inst.n_users(); ++k)
    for (std::size_t j = 0; j < inst.n_patterns(); ++j) {
      const Pattern& p = (*inst.patterns)[j];
      std::snprintf(buf, sizeof buf, "%.12g,%.12g", inst.pattern_snr(k, static_cast<Eigen::Index>(j)), inst.utility(k, j));
      os << k + 1 << ',' << label(p) << ',' << p.length << ',' << buf << '\n';
    }
}

}  // namespace scfdma
