#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "scfdma/allocation.hpp"
#include "scfdma/channel.hpp"
#include "scfdma/error.hpp"
#include "scfdma/patterns.hpp"
#include "scfdma/sumax.hpp"

namespace scfdma {

struct FrameParams {
  double tti_s = 0.5e-3;
  int symbols_per_subchannel_per_tti = 12;
};

/// Fewest sub-channels carrying target_rate_bps at the given bits per symbol.
/// Ratios within 1e-9 of an integer are treated as that integer.
inline int min_subchannels(double target_rate_bps, int bits_per_symbol, const FrameParams& frame = {}) {
  if (!(target_rate_bps > 0)) throw std::invalid_argument("target rate must be positive");
  if (bits_per_symbol < 1) throw std::invalid_argument("bits per symbol must be positive");
  if (!(frame.tti_s > 0) || frame.symbols_per_subchannel_per_tti < 1)
    throw std::invalid_argument("frame parameters must be positive");
  const double ratio = target_rate_bps * frame.tti_s / (bits_per_symbol * frame.symbols_per_subchannel_per_tti);
  return static_cast<int>(std::ceil(ratio * (1.0 - 1e-9)));
}

/// sum_n P g_n / (N_p + P g_n) - N_p t / (1 + t), relative to the target term.
inline double pattern_power_residual(std::span<const double> gains, double threshold, double power) {
  const double np = static_cast<double>(gains.size());
  const double target = np * threshold / (1.0 + threshold);
  double s = 0;
  for (double g : gains) s += power * g / (np + power * g);
  return (s - target) / target;
}

/// Total pattern power P, spread as P/N_p per sub-channel, at which the MMSE
/// effective SNR over the pattern equals the threshold. The left side increases in P, so the root
/// is unique; it is bracketed by N_p t / max(g) and N_p t / min(g).
inline double solve_pattern_power(std::span<const double> gains, double threshold) {
  if (gains.empty()) throw std::invalid_argument("pattern must hold at least one sub-channel");
  if (!(threshold > 0)) throw std::invalid_argument("SNR threshold must be positive");
  double gmin = gains[0], gmax = gains[0];
  for (double g : gains) {
    if (!(g > 0) || !std::isfinite(g)) throw std::invalid_argument("channel gains must be positive and finite");
    gmin = std::min(gmin, g);
    gmax = std::max(gmax, g);
  }
  const double np = static_cast<double>(gains.size());
  double lo = np * threshold / gmax;
  double hi = np * threshold / gmin;
  for (int i = 0; pattern_power_residual(gains, threshold, lo) > 0; ++i) {
    if (i == 200) throw NumericError("could not bracket pattern power from below");
    lo *= 0.5;
  }
  for (int i = 0; pattern_power_residual(gains, threshold, hi) < 0; ++i) {
    if (i == 200) throw NumericError("could not bracket pattern power from above");
    hi *= 2.0;
  }
  for (int i = 0; i < 400; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double f = pattern_power_residual(gains, threshold, mid);
    if (f == 0) return mid;
    (f < 0 ? lo : hi) = mid;
  }
  const double flo = std::abs(pattern_power_residual(gains, threshold, lo));
  const double fhi = std::abs(pattern_power_residual(gains, threshold, hi));
  return flo <= fhi ? lo : hi;
}

/// Penalty -exp(p_max - p): always negative, approaches 0 as p grows.
inline double cost(double p_max, double p) { return -std::exp(p_max - p); }

enum class PowerCap { none, strict };

struct JamscOption {
  double power = 0;  // total over the pattern, W
  double cost = 0;
};

struct JamscInstance {
  std::shared_ptr<const PatternSet> patterns;
  ModulationTable table;
  FeasibilityMask mask;
  std::vector<double> targets_bps;
  std::vector<double> p_max_w;
  PowerCap cap = PowerCap::none;
  std::vector<std::optional<JamscOption>> options;  // K x M x J, nullopt = not admissible
  std::vector<int> infeasible_users;                 // users with no admissible option

  int n_users() const { return mask.n_users(); }
  int n_modulations() const { return mask.n_modulations(); }
  std::size_t n_patterns() const { return mask.n_patterns(); }

  const std::optional<JamscOption>& option(int k, std::size_t m, std::size_t j) const {
    return options[(static_cast<std::size_t>(k) * n_modulations() + m) * n_patterns() + j];
  }
};

inline JamscInstance build_jamsc(const ChannelGains& channel, const ScenarioConfig& cfg,
                                 std::vector<double> targets_bps, const ModulationTable& table,
                                 const FrameParams& frame = {}, PowerCap cap = PowerCap::none,
                                 std::shared_ptr<const PatternSet> patterns = nullptr) {
  table.validate();
  const int k_users = channel.n_users();
  if (targets_bps.size() == 1) targets_bps.assign(static_cast<std::size_t>(k_users), targets_bps[0]);
  if (targets_bps.size() != static_cast<std::size_t>(k_users))
    throw std::invalid_argument("need one target rate per user");
  if (!patterns) patterns = std::make_shared<PatternSet>(channel.n_subchannels());
  if (patterns->n_subchannels() != channel.n_subchannels())
    throw std::invalid_argument("pattern set and channel disagree on the sub-channel count");

  const int m_count = static_cast<int>(table.size());
  Eigen::MatrixXi counts(k_users, m_count);
  for (int k = 0; k < k_users; ++k)
    for (int m = 0; m < m_count; ++m)
      counts(k, m) = min_subchannels(targets_bps[static_cast<std::size_t>(k)], table.bits_per_symbol[static_cast<std::size_t>(m)], frame);

  JamscInstance inst{patterns, table, FeasibilityMask(*patterns, counts), std::move(targets_bps), {}, cap, {}, {}};
  inst.p_max_w.resize(static_cast<std::size_t>(k_users));
  inst.options.resize(static_cast<std::size_t>(k_users) * m_count * patterns->size());
  for (int k = 0; k < k_users; ++k) {
    const double pmax = cfg.p_max(k);
    inst.p_max_w[static_cast<std::size_t>(k)] = pmax;
    bool any = false;
    for (int m = 0; m < m_count; ++m)
      for (std::size_t j = 1; j < patterns->size(); ++j) {
        if (!inst.mask.allowed(k, m, j)) continue;
        const Pattern& p = (*patterns)[j];
        const double power = solve_pattern_power(channel.row(k).subspan(static_cast<std::size_t>(p.first), static_cast<std::size_t>(p.length)),
                                                 table.thresholds[static_cast<std::size_t>(m)]);
        if (cap == PowerCap::strict && power > pmax) continue;
        inst.options[(static_cast<std::size_t>(k) * m_count + m) * patterns->size() + j] = JamscOption{power, cost(pmax, power)};
        any = true;
      }
    if (!any) inst.infeasible_users.push_back(k);
  }
  return inst;
}

inline double sum_cost(const JamscInstance& inst, const Allocation& alloc) {
  auto bad = validate_allocation(*inst.patterns, alloc, static_cast<std::size_t>(inst.n_users()));
  if (!bad.empty()) throw std::invalid_argument("invalid allocation: " + bad.front());
  double s = 0;
  for (std::size_t k = 0; k < alloc.size(); ++k) {
    if (!alloc[k].modulation) throw std::invalid_argument("user " + std::to_string(k) + " has no modulation");
    const auto& opt = inst.option(static_cast<int>(k), *alloc[k].modulation, alloc[k].pattern);
    if (!opt) throw std::invalid_argument("user " + std::to_string(k) + " holds a masked option");
    s += opt->cost;
  }
  return s;
}

inline void write_costs_csv(std::ostream& os, const JamscInstance& inst) {
  os << "user,modulation,pattern,n_subchannels,power_w,cost\n";
  char buf[96];
  for (int k = 0; k < inst.n_users(); ++k)
    for (int m = 0; m < inst.n_modulations(); ++m)
      for (std::size_t j = 1; j < inst.n_patterns(); ++j) {
        const auto& opt = inst.option(k, static_cast<std::size_t>(m), j);
        if (!opt) continue;
        std::snprintf(buf, sizeof buf, "%.12g,%.12g", opt->power, opt->cost);
        os << k + 1 << ',' << inst.table.names[static_cast<std::size_t>(m)] << ',' << label((*inst.patterns)[j]) << ','
           << (*inst.patterns)[j].length << ',' << buf << '\n';
      }
}

}  // namespace scfdma
