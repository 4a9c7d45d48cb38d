#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "scfdma/assignment.hpp"
#include "scfdma/baselines.hpp"
#include "scfdma/channel.hpp"
#include "scfdma/error.hpp"
#include "scfdma/jamsc.hpp"
#include "scfdma/solver.hpp"
#include "scfdma/sumax.hpp"

namespace scfdma {

enum class ProblemKind { sumax, jamsc };

inline const char* name(ProblemKind p) { return p == ProblemKind::sumax ? "sumax" : "jamsc"; }

/// Allocator names. The *_fixed variants restrict the rate-constrained
/// problem to a single modulation.
inline const std::vector<std::string>& known_allocators() {
  static const std::vector<std::string> names{"dual", "oracle", "greedy", "round_robin", "dual_fixed", "oracle_fixed"};
  return names;
}

inline std::vector<std::string> default_allocators(ProblemKind p) {
  if (p == ProblemKind::sumax) return {"dual", "greedy", "round_robin"};
  return {"dual", "dual_fixed", "round_robin"};
}

struct CampaignConfig {
  ProblemKind problem = ProblemKind::sumax;
  ScenarioConfig scenario;
  SolverConfig solver;
  ModulationTable modulations = ModulationTable::lte_default();
  std::vector<double> targets_bps{140e3};
  FrameParams frame;
  PowerCap cap = PowerCap::none;
  std::vector<double> weights;  // empty means 1 for every user
  std::string fixed_modulation = "16QAM";
  int n_drops = 100;
  std::uint64_t base_seed = 1;
  std::vector<std::string> allocators;  // empty means the problem's defaults
  long long oracle_node_ceiling = 100'000'000;
  int threads = 1;

  std::vector<std::string> resolved_allocators() const {
    return allocators.empty() ? default_allocators(problem) : allocators;
  }

  void validate() const {
    scenario.validate();
    solver.validate();
    modulations.validate();
    if (n_drops < 1) throw std::invalid_argument("need at least one drop");
    if (resolved_allocators().empty()) throw std::invalid_argument("allocator set is empty");
    if (threads < 1) throw std::invalid_argument("thread count must be positive");
    std::set<std::string> seen;
    for (const auto& a : resolved_allocators()) {
      if (std::find(known_allocators().begin(), known_allocators().end(), a) == known_allocators().end())
        throw std::invalid_argument("unknown allocator " + a);
      if (problem == ProblemKind::sumax && (a == "dual_fixed" || a == "oracle_fixed"))
        throw std::invalid_argument(a + " applies to the rate-constrained problem only");
      if (problem == ProblemKind::jamsc && a == "greedy")
        throw std::invalid_argument("greedy applies to the utility problem only");
      if (!seen.insert(a).second) throw std::invalid_argument("allocator listed twice: " + a);
    }
    if (problem == ProblemKind::jamsc) modulations.index_of(fixed_modulation);
  }
};

struct UserOutcome {
  std::string pattern = "-";
  int n_subchannels = 0;
  std::string modulation = "none";
  double power_w = 0;
  double snr = 0;  // effective, 0 for the empty pattern
};

struct AllocatorResult {
  std::string name;
  bool feasible = false;
  bool refused = false;  // exhaustive search hit its node ceiling
  double objective = 0;  // sum utility, or sum cost
  double runtime_s = 0;
  std::vector<std::string> violations;
  std::vector<UserOutcome> users;
  std::optional<SolveReport> solve;  // dual allocators only
};

struct DropResult {
  int index = 0;
  std::uint64_t seed = 0;
  std::vector<AllocatorResult> allocators;

  const AllocatorResult* find(const std::string& n) const {
    for (const auto& a : allocators)
      if (a.name == n) return &a;
    return nullptr;
  }
};

namespace detail {

template <class F>
AllocatorResult timed(const std::string& name, F&& body) {
  AllocatorResult r;
  r.name = name;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(r);
  } catch (const InfeasibleError& e) {
    r.feasible = false;
    r.violations.push_back(e.what());
  } catch (const SearchLimitError& e) {
    r.feasible = false;
    r.refused = true;
    r.violations.push_back(e.what());
  }
  r.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

inline std::vector<UserOutcome> describe_sumax(const SumaxInstance& inst, const ScenarioConfig& sc,
                                               const ModulationTable& table, const Allocation& alloc) {
  std::vector<UserOutcome> out;
  for (std::size_t k = 0; k < alloc.size(); ++k) {
    const Pattern& p = (*inst.patterns)[alloc[k].pattern];
    UserOutcome u;
    u.pattern = label(p);
    u.n_subchannels = p.length;
    if (!p.empty()) {
      const int ki = static_cast<int>(k);
      u.power_w = p.length * std::min(sc.p_peak(ki), sc.p_max(ki) / p.length);
      u.snr = inst.pattern_snr(ki, static_cast<Eigen::Index>(alloc[k].pattern));
      if (auto m = select_modulation(u.snr, table)) u.modulation = table.names[*m];
    }
    out.push_back(u);
  }
  return out;
}

inline std::vector<UserOutcome> describe_jamsc(const JamscInstance& inst, const ChannelGains& ch, const Allocation& alloc) {
  std::vector<UserOutcome> out;
  for (std::size_t k = 0; k < alloc.size(); ++k) {
    const Pattern& p = (*inst.patterns)[alloc[k].pattern];
    UserOutcome u;
    u.pattern = label(p);
    u.n_subchannels = p.length;
    if (alloc[k].modulation && !p.empty()) {
      const auto& opt = inst.option(static_cast<int>(k), *alloc[k].modulation, alloc[k].pattern);
      u.modulation = inst.table.names[*alloc[k].modulation];
      u.power_w = opt ? opt->power : 0.0;
      std::vector<double> snr;
      for (int n = p.first; n <= p.last(); ++n) snr.push_back(u.power_w / p.length * ch.gains(static_cast<Eigen::Index>(k), n));
      u.snr = effective_snr_mmse(snr);
    }
    out.push_back(u);
  }
  return out;
}

}  // namespace detail

/// One channel realisation, every configured allocator. Seed = base_seed + index.
inline DropResult run_drop(const CampaignConfig& cfg, int index) {
  DropResult drop;
  drop.index = index;
  drop.seed = cfg.base_seed + static_cast<std::uint64_t>(index);
  ScenarioConfig sc = cfg.scenario;
  const ChannelGains ch = generate_channel(sc, drop.seed);
  const auto patterns = std::make_shared<const PatternSet>(sc.n_subchannels);

  if (cfg.problem == ProblemKind::sumax) {
    const SumaxInstance inst = build_sumax(ch, sc, cfg.weights, patterns);
    const AssignmentInstance a = to_assignment(inst);
    auto finish = [&](AllocatorResult& r, const Choice& choice) {
      r.feasible = true;
      const Allocation alloc = a.to_allocation(choice);
      r.objective = sum_utility(inst, alloc);
      r.users = detail::describe_sumax(inst, sc, cfg.modulations, alloc);
    };
    for (const auto& name : cfg.resolved_allocators()) {
      drop.allocators.push_back(detail::timed(name, [&](AllocatorResult& r) {
        if (name == "dual") {
          SolveReport rep = solve(a, cfg.solver);
          if (rep.feasible) finish(r, rep.choice);
          else r.violations = rep.violations;
          r.solve = std::move(rep);
        } else if (name == "oracle") {
          finish(r, brute_force(a, cfg.oracle_node_ceiling).choice);
        } else {
          BaselineResult b = name == "greedy" ? greedy(a) : round_robin(a);
          if (b.feasible) finish(r, b.choice);
          else r.violations = b.violations;
        }
      }));
    }
    return drop;
  }

  const JamscInstance joint = build_jamsc(ch, sc, cfg.targets_bps, cfg.modulations, cfg.frame, cfg.cap, patterns);
  const std::size_t m_fixed = cfg.modulations.index_of(cfg.fixed_modulation);
  std::optional<JamscInstance> fixed;
  for (const auto& name : cfg.resolved_allocators()) {
    const bool use_fixed = name == "dual_fixed" || name == "oracle_fixed";
    if (use_fixed && !fixed)
      fixed = build_jamsc(ch, sc, cfg.targets_bps, cfg.modulations.only(m_fixed), cfg.frame, cfg.cap, patterns);
    const JamscInstance& inst = use_fixed ? *fixed : joint;
    drop.allocators.push_back(detail::timed(name, [&](AllocatorResult& r) {
      const AssignmentInstance a = to_assignment(inst);
      auto finish = [&](const Choice& choice) {
        r.feasible = true;
        Allocation alloc = a.to_allocation(choice);
        r.objective = sum_cost(inst, alloc);
        r.users = detail::describe_jamsc(inst, ch, alloc);
      };
      if (name == "dual" || name == "dual_fixed") {
        SolveReport rep = solve(a, cfg.solver);
        if (rep.feasible) finish(rep.choice);
        else r.violations = rep.violations;
        r.solve = std::move(rep);
      } else if (name == "oracle" || name == "oracle_fixed") {
        finish(brute_force(a, cfg.oracle_node_ceiling).choice);
      } else {
        BaselineResult b = round_robin(a);
        if (b.feasible) finish(b.choice);
        else r.violations = b.violations;
      }
    }));
  }
  return drop;
}

/// Sorted (value, i / n) steps; repeated values stay as separate steps.
inline std::vector<std::pair<double, double>> emit_cdf(std::vector<double> values) {
  if (values.empty()) throw std::domain_error("empirical CDF of an empty sample");
  std::sort(values.begin(), values.end());
  std::vector<std::pair<double, double>> out;
  const double n = static_cast<double>(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out.emplace_back(values[i], static_cast<double>(i + 1) / n);
  return out;
}

struct AllocatorSummary {
  std::string name;
  int drops = 0;
  int feasible = 0;
  int refused = 0;            // exhaustive search over its node ceiling
  double mean_objective = 0;  // over feasible drops
  double mean_runtime_s = 0;
  int certified = 0;
  int converged = 0;
  int in_cone = 0;
  int repaired = 0;
  std::optional<double> mean_ratio_to_oracle;  // over drops where both are feasible
};

struct CampaignResult {
  std::vector<DropResult> drops;
  std::vector<AllocatorSummary> summaries;
  std::vector<std::string> invariant_failures;
  double wall_time_s = 0;

  const AllocatorSummary* summary(const std::string& n) const {
    for (const auto& s : summaries)
      if (s.name == n) return &s;
    return nullptr;
  }

  /// Fraction of drops where allocator a is strictly better than b (higher
  /// utility, lower cost). Both must be feasible to count as a win.
  double win_fraction(const std::string& a, const std::string& b, ProblemKind p) const {
    if (drops.empty()) return 0;
    int wins = 0;
    for (const auto& d : drops) {
      const auto* x = d.find(a);
      const auto* y = d.find(b);
      if (!x || !y || !x->feasible || !y->feasible) continue;
      wins += p == ProblemKind::sumax ? x->objective > y->objective : x->objective < y->objective;
    }
    return static_cast<double>(wins) / static_cast<double>(drops.size());
  }
};

/// Checks that must hold in every drop: each dual run that certifies closes
/// the duality gap, no allocator beats the oracle, and baselines meant to
/// be always feasible are.
inline std::vector<std::string> check_drop(const DropResult& d, ProblemKind p) {
  std::vector<std::string> out;
  const std::string at = "drop " + std::to_string(d.index) + ": ";
  for (const auto& r : d.allocators) {
    if (r.solve && r.solve->certified && !r.solve->duality_holds) out.push_back(at + r.name + " certified with a duality gap");
    if (p == ProblemKind::sumax && !r.feasible && !r.refused) out.push_back(at + r.name + " returned no feasible allocation");
  }
  auto pair = [&](const char* alloc, const char* oracle) {
    const auto* x = d.find(alloc);
    const auto* o = d.find(oracle);
    if (!x || !o || !x->feasible || !o->feasible) return;
    const double tol = 1e-9 * (1.0 + std::abs(o->objective));
    const bool better = p == ProblemKind::sumax ? x->objective > o->objective + tol : x->objective < o->objective - tol;
    if (better) out.push_back(at + alloc + " beats the exhaustive optimum");
    if (x->solve && x->solve->certified && std::abs(x->objective - o->objective) > tol)
      out.push_back(at + alloc + " certified but differs from the exhaustive optimum");
  };
  pair("dual", "oracle");
  pair("greedy", "oracle");
  pair("round_robin", "oracle");
  pair("dual_fixed", "oracle_fixed");
  return out;
}

inline CampaignResult run_campaign(const CampaignConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  CampaignResult res;
  res.drops.resize(static_cast<std::size_t>(cfg.n_drops));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(cfg.n_drops));
  auto worker = [&](int tid) {
    for (int i = tid; i < cfg.n_drops; i += cfg.threads) {
      try {
        res.drops[static_cast<std::size_t>(i)] = run_drop(cfg, i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  if (cfg.threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < cfg.threads; ++t) pool.emplace_back(worker, t);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  for (const auto& name : cfg.resolved_allocators()) {
    AllocatorSummary s;
    s.name = name;
    double ratio = 0;
    int ratio_n = 0;
    const std::string oracle = name.ends_with("_fixed") ? "oracle_fixed" : "oracle";
    for (const auto& d : res.drops) {
      const auto* r = d.find(name);
      ++s.drops;
      s.mean_runtime_s += r->runtime_s;
      s.refused += r->refused;
      if (r->feasible) {
        ++s.feasible;
        s.mean_objective += r->objective;
      }
      if (r->solve) {
        s.certified += r->solve->certified;
        s.converged += r->solve->converged;
        s.in_cone += r->solve->in_cone;
        s.repaired += r->solve->repaired;
      }
      const auto* o = d.find(oracle);
      if (o && o->feasible && r->feasible && o->objective != 0) {
        ratio += r->objective / o->objective;
        ++ratio_n;
      }
    }
    if (s.feasible > 0) s.mean_objective /= s.feasible;
    if (s.drops > 0) s.mean_runtime_s /= s.drops;
    if (ratio_n > 0) s.mean_ratio_to_oracle = ratio / ratio_n;
    res.summaries.push_back(s);
  }
  for (const auto& d : res.drops) {
    auto bad = check_drop(d, cfg.problem);
    res.invariant_failures.insert(res.invariant_failures.end(), bad.begin(), bad.end());
  }
  res.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace scfdma
