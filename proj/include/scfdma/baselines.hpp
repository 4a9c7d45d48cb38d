#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "scfdma/allocation.hpp"
#include "scfdma/assignment.hpp"
#include "scfdma/error.hpp"
#include "scfdma/patterns.hpp"

namespace scfdma {

struct BaselineResult {
  Choice choice;
  bool feasible = false;
  double value = 0;
  std::vector<std::string> violations;
  long long nodes = 0;  // exhaustive search only
};

/// Exhaustive depth-first search over one option per agent, in agent and
/// option order. Partial assignments with overlapping footprints are cut,
/// as are those that cannot beat the incumbent even with every remaining
/// agent at its cheapest option. The first optimum found wins ties.
inline BaselineResult brute_force(const AssignmentInstance& a, long long node_ceiling = 100'000'000) {
  const int k_count = a.n_agents();
  const std::uint64_t full = (std::uint64_t{1} << a.n_resources()) - 1;
  std::vector<double> tail(static_cast<std::size_t>(k_count) + 1, 0.0);
  for (int k = k_count - 1; k >= 0; --k) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t o = a.begin(k); o < a.end(k); ++o) m = std::min(m, a.option(o).weight);
    tail[static_cast<std::size_t>(k)] = tail[static_cast<std::size_t>(k) + 1] + m;
  }

  BaselineResult best;
  Choice path(static_cast<std::size_t>(k_count));
  double incumbent = std::numeric_limits<double>::infinity();
  long long nodes = 0;

  auto dfs = [&](auto&& self, int k, std::uint64_t used, double partial) -> void {
    if (k == k_count) {
      if (used == full && partial < incumbent) {
        incumbent = partial;
        best.choice = path;
      }
      return;
    }
    for (std::size_t o = a.begin(k); o < a.end(k); ++o) {
      const Option& opt = a.option(o);
      const std::uint64_t m = opt.footprint.mask();
      if (m & used) continue;
      if (++nodes > node_ceiling)
        throw SearchLimitError("exhaustive search exceeded " + std::to_string(node_ceiling) + " nodes");
      const double next = partial + opt.weight;
      const double bound = next + tail[static_cast<std::size_t>(k) + 1];
      if (bound > incumbent + 1e-12 * (1.0 + std::abs(incumbent))) continue;
      path[static_cast<std::size_t>(k)] = o;
      self(self, k + 1, used | m, next);
    }
  };
  dfs(dfs, 0, 0, 0.0);

  best.nodes = nodes;
  if (best.choice.empty()) throw InfeasibleError("no exact cover exists", -1);
  best.feasible = true;
  best.value = a.objective(best.choice);
  return best;
}

namespace detail {

/// Cheapest option of each agent per footprint, keyed by first * (N + 1) + length.
inline std::vector<std::vector<std::optional<std::size_t>>> footprint_index(const AssignmentInstance& a) {
  const int n = a.n_resources();
  std::vector<std::vector<std::optional<std::size_t>>> idx(
      static_cast<std::size_t>(a.n_agents()), std::vector<std::optional<std::size_t>>(static_cast<std::size_t>((n + 1) * (n + 1))));
  for (int k = 0; k < a.n_agents(); ++k)
    for (std::size_t o = a.begin(k); o < a.end(k); ++o) {
      const Pattern& p = a.option(o).footprint;
      auto& slot = idx[static_cast<std::size_t>(k)][static_cast<std::size_t>(p.empty() ? 0 : p.first * (n + 1) + p.length)];
      if (!slot || a.option(o).weight < a.option(*slot).weight) slot = o;
    }
  return idx;
}

inline std::size_t footprint_key(const Pattern& p, int n) {
  return static_cast<std::size_t>(p.empty() ? 0 : p.first * (n + 1) + p.length);
}

inline BaselineResult finish(const AssignmentInstance& a, const std::vector<Pattern>& blocks,
                             const std::vector<std::vector<std::optional<std::size_t>>>& idx) {
  BaselineResult r;
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const auto& o = idx[k][footprint_key(blocks[k], a.n_resources())];
    if (!o) {
      r.violations.push_back("user " + std::to_string(k) + ": no admissible option on block " + label(blocks[k]));
      continue;
    }
    r.choice.push_back(*o);
  }
  if (r.violations.empty()) r.violations = a.violations(r.choice);
  r.feasible = r.violations.empty();
  if (r.feasible) r.value = a.objective(r.choice);
  else r.choice.clear();
  return r;
}

}  // namespace detail

/// Hands out one sub-channel at a time to whichever (user, adjacent free
/// sub-channel) most lowers the weight, keeping each block contiguous.
/// Ties go to the lower user, then the lower sub-channel.
inline BaselineResult greedy(const AssignmentInstance& a) {
  const int n = a.n_resources();
  const int k_count = a.n_agents();
  const auto idx = detail::footprint_index(a);
  const double inf = std::numeric_limits<double>::infinity();
  auto value = [&](int k, const Pattern& p) {
    const auto& o = idx[static_cast<std::size_t>(k)][detail::footprint_key(p, n)];
    return o ? a.option(*o).weight : inf;
  };

  std::vector<Pattern> blocks(static_cast<std::size_t>(k_count));
  std::uint64_t taken = 0;
  for (int granted = 0; granted < n; ++granted) {
    int best_k = -1;
    Pattern best_block;
    double best_delta = inf;
    bool any = false;
    for (int k = 0; k < k_count; ++k) {
      const Pattern cur = blocks[static_cast<std::size_t>(k)];
      const double vcur = value(k, cur);
      std::vector<Pattern> moves;
      if (cur.empty()) {
        for (int s = 0; s < n; ++s)
          if (!(taken >> s & 1)) moves.push_back({s, 1});
      } else {
        if (cur.first > 0 && !(taken >> (cur.first - 1) & 1)) moves.push_back({cur.first - 1, cur.length + 1});
        if (cur.last() + 1 < n && !(taken >> (cur.last() + 1) & 1)) moves.push_back({cur.first, cur.length + 1});
      }
      for (const Pattern& p : moves) {
        const double vnew = value(k, p);
        const double delta = vcur == inf ? vnew : vnew - vcur;
        if (!any || delta < best_delta) {
          any = true;
          best_k = k;
          best_block = p;
          best_delta = delta;
        }
      }
    }
    if (!any) break;
    blocks[static_cast<std::size_t>(best_k)] = best_block;
    taken |= best_block.mask();
  }
  return detail::finish(a, blocks, idx);
}

/// floor(N/K) consecutive sub-channels per user, the first N mod K users one more.
inline std::vector<Pattern> round_robin_blocks(int n_users, int n_subchannels) {
  if (n_users < 1 || n_subchannels < 1) throw std::invalid_argument("round robin needs K >= 1 and N >= 1");
  if (n_users > n_subchannels)
    throw InfeasibleError("round robin needs at least one sub-channel per user", n_subchannels);
  std::vector<Pattern> out;
  const int base = n_subchannels / n_users, extra = n_subchannels % n_users;
  int next = 0;
  for (int k = 0; k < n_users; ++k) {
    const int len = base + (k < extra ? 1 : 0);
    out.push_back(Pattern{next, len});
    next += len;
  }
  return out;
}

inline Allocation round_robin(int n_users, int n_subchannels) {
  const PatternSet ps(n_subchannels);
  Allocation out;
  for (const Pattern& p : round_robin_blocks(n_users, n_subchannels)) out.push_back({ps.index_of(p), std::nullopt});
  return out;
}

/// Round-robin blocks; on each, the agent's cheapest option (lowest power
/// for rate-constrained instances).
inline BaselineResult round_robin(const AssignmentInstance& a) {
  return detail::finish(a, round_robin_blocks(a.n_agents(), a.n_resources()), detail::footprint_index(a));
}

}  // namespace scfdma
