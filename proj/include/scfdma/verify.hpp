#pragma once

#include <algorithm>
#include <chrono>
#include <limits>
#include <tuple>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "scfdma/assignment.hpp"
#include "scfdma/baselines.hpp"
#include "scfdma/channel.hpp"
#include "scfdma/dual.hpp"
#include "scfdma/harness.hpp"
#include "scfdma/jamsc.hpp"
#include "scfdma/solver.hpp"
#include "scfdma/sumax.hpp"

namespace scfdma {

/// Small random instances for checks against exhaustive search. Instance i
/// cycles through users first, then sub-channel counts; seed = base + i.
struct SweepConfig {
  ProblemKind problem = ProblemKind::sumax;
  int instances = 500;
  std::uint64_t base_seed = 1;
  std::vector<int> users{2, 3};
  std::vector<int> subchannels{4, 5, 6};
  ScenarioConfig scenario;
  SolverConfig solver;
  ModulationTable modulations = ModulationTable::lte_default();
  std::vector<double> targets_bps{140e3};

  std::pair<int, int> shape(int i) const {
    const auto nu = static_cast<int>(users.size());
    const auto ns = static_cast<int>(subchannels.size());
    return {users[static_cast<std::size_t>(i % nu)], subchannels[static_cast<std::size_t>((i / nu) % ns)]};
  }
};

inline AssignmentInstance sweep_instance(const SweepConfig& cfg, int i) {
  ScenarioConfig sc = cfg.scenario;
  std::tie(sc.n_users, sc.n_subchannels) = cfg.shape(i);
  const ChannelGains ch = generate_channel(sc, cfg.base_seed + static_cast<std::uint64_t>(i));
  if (cfg.problem == ProblemKind::sumax) return to_assignment(build_sumax(ch, sc, {}));
  return to_assignment(build_jamsc(ch, sc, cfg.targets_bps, cfg.modulations));
}

struct CertifyRecord {
  int index = 0;
  int users = 0;
  int subchannels = 0;
  bool certified = false;
  bool converged = false;
  bool in_cone = false;
  bool repaired = false;
  bool feasible = false;
  bool matches_oracle = false;  // same optimal value, compared exactly
  bool duality_holds = false;
  double value = 0;
  double oracle = 0;
  double ratio = 0;      // value / oracle, 0 when infeasible
  double oracle_gap = 0;  // |oracle - value| / |oracle|
  bool theta_zero = false;
  bool modified_optimal = false;  // exhaustive search on the modified weights returns the diagnostic allocation
  bool modified_resolves = false;  // warm-started solve on the modified weights returns it too
  double max_ratio = 0;
  double perturbation_ratio = 0;
};

struct CertifySummary {
  std::vector<CertifyRecord> records;
  int certified = 0;
  int certified_matches = 0;
  int optimal = 0;
  int duality_failures = 0;
  double mean_ratio = 0;
  double seconds = 0;
};

/// Orientation-free comparison: both values are weights to minimize.
inline CertifyRecord certify_one(const AssignmentInstance& a, const SolverConfig& solver) {
  CertifyRecord rec;
  const BaselineResult bf = brute_force(a);
  const SolveReport rep = solve(a, solver);
  rec.certified = rep.certified;
  rec.converged = rep.converged;
  rec.in_cone = rep.in_cone;
  rec.repaired = rep.repaired;
  rec.feasible = rep.feasible;
  rec.duality_holds = rep.duality_holds;
  rec.oracle = bf.value;
  rec.value = rep.primal;
  rec.matches_oracle = rep.feasible && rep.primal == bf.value;
  rec.ratio = rep.feasible ? rep.primal / bf.value : 0.0;
  rec.oracle_gap = rep.feasible ? std::abs(bf.value - rep.primal) / std::max(std::abs(bf.value), 1e-300) : 1.0;
  const GapReport& g = rep.diagnostic;
  rec.theta_zero = (g.theta.array() == 0).all();
  rec.max_ratio = g.max_ratio;
  rec.perturbation_ratio = g.perturbation_ratio;
  if (rep.feasible) {
    const AssignmentInstance modified = a.with_weights(g.modified_weights);
    const BaselineResult mbf = brute_force(modified);
    const double mv = modified.objective(g.allocation);
    rec.modified_optimal = mbf.choice == g.allocation || std::abs(mbf.value - mv) <= 1e-12 * (1.0 + std::abs(mv));
    SolverConfig warm = solver;
    warm.warm_start = DualPoint{rep.dual.eps, rep.dual.lam, g.rho_hat};
    const SolveReport again = solve(modified, warm);
    rec.modified_resolves = again.feasible && again.choice == g.allocation;
  }
  return rec;
}

inline CertifySummary certify_sweep(const SweepConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  CertifySummary s;
  double ratio = 0;
  for (int i = 0; i < cfg.instances; ++i) {
    CertifyRecord rec = certify_one(sweep_instance(cfg, i), cfg.solver);
    rec.index = i;
    std::tie(rec.users, rec.subchannels) = cfg.shape(i);
    s.certified += rec.certified;
    s.certified_matches += rec.certified && rec.matches_oracle;
    s.optimal += rec.feasible && rec.oracle_gap <= 1e-12;
    s.duality_failures += rec.certified && !rec.duality_holds;
    ratio += rec.ratio;
    s.records.push_back(rec);
  }
  s.mean_ratio = cfg.instances > 0 ? ratio / cfg.instances : 0.0;
  s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return s;
}

/// Multipliers drawn inside the positive cone: eps, lam in [0.1, 2], rho in [0.2, 5].
inline DualPoint random_cone_point(const AssignmentInstance& a, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> mult(0.1, 2.0), rho(0.2, 5.0);
  DualPoint d = DualPoint::uniform(a, 1.0);
  for (Eigen::Index i = 0; i < d.eps.size(); ++i) d.eps[i] = mult(rng);
  for (Eigen::Index i = 0; i < d.lam.size(); ++i) d.lam[i] = mult(rng);
  for (Eigen::Index i = 0; i < d.rho.size(); ++i) d.rho[i] = rho(rng);
  return d;
}

/// Largest |analytic - central difference| / max(1, |analytic|) over all coordinates.
inline double gradient_error(const AssignmentInstance& a, const DualPoint& d, double h) {
  const DualGradient g = dual_gradient(a, d);
  double worst = 0;
  auto probe = [&](Eigen::VectorXd DualPoint::*block, const Eigen::VectorXd& analytic) {
    for (Eigen::Index i = 0; i < analytic.size(); ++i) {
      DualPoint up = d, down = d;
      (up.*block)[i] += h;
      (down.*block)[i] -= h;
      const double fd = (dual_value(a, up) - dual_value(a, down)) / (2.0 * h);
      worst = std::max(worst, std::abs(analytic[i] - fd) / std::max(1.0, std::abs(analytic[i])));
    }
  };
  probe(&DualPoint::eps, g.eps);
  probe(&DualPoint::lam, g.lam);
  probe(&DualPoint::rho, g.rho);
  return worst;
}

struct GradcheckSummary {
  int instances = 0;
  int points = 0;
  double worst = 0;
  double seconds = 0;
};

inline GradcheckSummary gradcheck_sweep(const SweepConfig& cfg, int points, double h, std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  GradcheckSummary s;
  std::mt19937_64 rng(seed);
  for (int i = 0; i < cfg.instances; ++i) {
    const AssignmentInstance a = sweep_instance(cfg, i);
    ++s.instances;
    for (int p = 0; p < points; ++p, ++s.points) s.worst = std::max(s.worst, gradient_error(a, random_cone_point(a, rng), h));
  }
  s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return s;
}

/// Worst violation of f((x + y) / 2) >= (f(x) + f(y)) / 2 over random cone
/// segments; positive means concavity failed by that much.
inline double concavity_violation(const SweepConfig& cfg, int segments_per_instance, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < cfg.instances; ++i) {
    const AssignmentInstance a = sweep_instance(cfg, i);
    for (int s = 0; s < segments_per_instance; ++s) {
      const DualPoint x = random_cone_point(a, rng), y = random_cone_point(a, rng);
      const DualPoint m{(x.eps + y.eps) / 2, (x.lam + y.lam) / 2, (x.rho + y.rho) / 2};
      worst = std::max(worst, 0.5 * (dual_value(a, x) + dual_value(a, y)) - dual_value(a, m));
    }
  }
  return worst;
}

/// Pearson correlation; 0 when either side is constant.
inline double correlation(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = std::min(x.size(), y.size());
  if (n < 2) return 0;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxx > 0 && syy > 0 ? sxy / std::sqrt(sxx * syy) : 0.0;
}

}  // namespace scfdma
