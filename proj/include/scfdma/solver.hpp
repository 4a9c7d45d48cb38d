#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "scfdma/assignment.hpp"
#include "scfdma/dual.hpp"

namespace scfdma {

enum class StepRule {
  constant,     // x += beta * g
  diminishing,  // x += beta / sqrt(1 + t) * g, t counts that block's iterations
  curvature,    // Newton steps scaled by beta: log-space for rho, exact for lam and eps
};

enum class RhoProjection {
  sign_flip,  // an exact zero steps off by eta in the previous sign
  positive,   // non-positive entries clamp to rho_floor
};

struct SolverConfig {
  double init = 1.0;
  StepRule step_rule = StepRule::curvature;
  double beta = 1.0;
  double tolerance = 1e-6;  // sup-norm of each gradient block
  RhoProjection projection = RhoProjection::positive;
  double eta = 1e-3;
  double rho_floor = 1e-12;
  long max_inner = 10000;   // per loop entry
  long max_outer = 1000;
  long max_total = 200000;  // rho + lam + eps iterations over the whole run
  long stall_window = 50;   // outer iterations allowed without a 1% drop in the gradient norm
  double binarize_tol = 0.1;
  bool repair = true;
  double duality_tol = 1e-6;  // relative to 1 + |f^d|
  double ratio_floor = 1e-12;
  double near_optimal_ratio = 0.05;
  std::optional<DualPoint> warm_start;

  /// Constant steps of 0.01 and the sign-flip projection.
  static SolverConfig constant_steps() {
    SolverConfig c;
    c.step_rule = StepRule::constant;
    c.beta = 0.01;
    c.projection = RhoProjection::sign_flip;
    return c;
  }

  void validate() const {
    if (!(init > 0)) throw std::invalid_argument("initial multipliers must be positive");
    if (!(beta > 0)) throw std::invalid_argument("step size must be positive");
    if (!(tolerance > 0)) throw std::invalid_argument("tolerance must be positive");
    if (!(eta > 0) || !(rho_floor > 0)) throw std::invalid_argument("projection offsets must be positive");
    if (max_inner < 1 || max_outer < 1 || max_total < 1) throw std::invalid_argument("iteration caps must be positive");
    if (!(binarize_tol > 0 && binarize_tol < 0.5)) throw std::invalid_argument("binarization tolerance must be in (0, 0.5)");
  }
};

struct IterationCounts {
  long rho = 0;  // q
  long lam = 0;  // s
  long eps = 0;  // t
  long outer = 0;
  long operations = 0;  // multiplier updates: options per rho step, agents per lam step, resources per eps step

  long total() const { return rho + lam + eps; }
};

/// Which options the final allocation flips relative to the sign pattern of
/// the reduced weights, and the weights under which that flip is optimal.
struct GapReport {
  Eigen::VectorXd theta;             // +1 drop a selected option, -1 add an unselected one, 0 keep
  Eigen::VectorXd rho_hat;           // |r| at the reported multipliers (floored)
  Eigen::VectorXd modified_weights;  // w + 2 theta rho_hat, i.e. U - 2 theta rho_hat negated
  Choice allocation;
  std::size_t flipped = 0;
  double max_ratio = 0;           // max 2 rho_hat / |w| over options with |w| above the floor
  double perturbation_ratio = 0;  // the same, restricted to flipped options
  bool near_optimal = false;
  bool from_converged_point = false;
};

struct SolveReport {
  Choice choice;
  Allocation allocation;
  bool feasible = false;
  std::vector<std::string> violations;  // what the recovered indicator broke, kept after a repair
  Eigen::VectorXd indicator;
  DualPoint dual;
  double primal = 0;
  double dual_value = 0;
  double gap = 0;
  bool converged = false;
  bool truncated = false;
  bool diverged = false;  // stopped on non-finite or exploding multipliers, last good point kept
  bool in_cone = false;
  bool binary = false;
  bool repaired = false;  // allocation came from the heuristic fallback
  bool certified = false;
  bool duality_holds = false;
  IterationCounts iterations;
  GapReport diagnostic;
};

/// Theta per option from the final allocation, and the weights it implies.
inline GapReport diagnose_gap(const AssignmentInstance& a, const DualPoint& d, const Choice& allocation,
                              const SolverConfig& cfg, bool converged) {
  const Eigen::VectorXd r = reduced_weights(a, d);
  const auto n_opt = static_cast<Eigen::Index>(a.n_options());
  GapReport g;
  g.from_converged_point = converged;
  g.allocation = allocation;
  g.theta = Eigen::VectorXd::Zero(n_opt);
  g.rho_hat = r.cwiseAbs().cwiseMax(cfg.rho_floor);
  const Eigen::VectorXd w = a.weights();
  if (!allocation.empty()) {
    const Eigen::VectorXd chosen = a.indicator(allocation);
    for (Eigen::Index o = 0; o < n_opt; ++o) {
      const double signed_pick = r[o] > 0 ? 1.0 : 0.0;
      g.theta[o] = signed_pick - chosen[o];
    }
  }
  g.modified_weights = w + 2.0 * g.theta.cwiseProduct(g.rho_hat);
  for (Eigen::Index o = 0; o < n_opt; ++o) {
    if (g.theta[o] != 0) ++g.flipped;
    if (std::abs(w[o]) <= cfg.ratio_floor) continue;
    const double ratio = 2.0 * g.rho_hat[o] / std::abs(w[o]);
    g.max_ratio = std::max(g.max_ratio, ratio);
    if (g.theta[o] != 0) g.perturbation_ratio = std::max(g.perturbation_ratio, ratio);
  }
  g.near_optimal = g.max_ratio <= cfg.near_optimal_ratio;
  return g;
}

namespace detail {

inline double step_scale(const SolverConfig& cfg, long count) {
  return cfg.step_rule == StepRule::diminishing ? cfg.beta / std::sqrt(1.0 + static_cast<double>(count)) : cfg.beta;
}

class Ascent {
 public:
  Ascent(const AssignmentInstance& a, const SolverConfig& cfg, DualPoint& d, IterationCounts& it)
      : a_(a), cfg_(cfg), d_(d), it_(it), w_(a.weights()) {}

  bool budget_left() const { return !diverged_ && it_.total() < cfg_.max_total; }
  bool diverged() const { return diverged_; }

  /// Step 1: rho until its gradient is within tolerance. r does not depend on rho.
  bool rho_loop() {
    const Eigen::VectorXd r = reduced();
    const Eigen::Index n = d_.rho.size();
    for (long i = 0;; ++i) {
      const Eigen::ArrayXd q = r.array() / d_.rho.array();
      const Eigen::ArrayXd zeta = 0.25 * (q.square() - 1.0);
      if (zeta.abs().maxCoeff() <= cfg_.tolerance) return true;
      if (i >= cfg_.max_inner || !budget_left()) return false;
      const double beta = step_scale(cfg_, it_.rho);
      Eigen::VectorXd proposed;
      if (cfg_.step_rule == StepRule::curvature) {
        const Eigen::ArrayXd r2 = r.array().square(), p2 = d_.rho.array().square();
        // log rho moves by tanh(log(|r| / rho)): never past |r|, never below the floor
        proposed = (d_.rho.array() * (beta * (r2 - p2) / (r2 + p2)).exp()).max(cfg_.rho_floor).matrix();
      } else {
        proposed = d_.rho + beta * zeta.matrix();
      }
      Eigen::VectorXd next = cfg_.projection == RhoProjection::positive ? project_rho_positive(proposed, cfg_.rho_floor)
                                                                        : project_rho(d_.rho, proposed, cfg_.eta);
      ++it_.rho;
      it_.operations += n;
      if (!next.allFinite()) return diverge();
      if (next == d_.rho) return false;  // pinned at the floor
      d_.rho = std::move(next);
    }
  }

  /// Step 2: lam with eps and rho held. Each agent's gradient is affine in its lam.
  bool lam_loop() {
    const Eigen::VectorXd base = without_lam();
    const int k_count = a_.n_agents();
    Eigen::VectorXd s(k_count), inv(k_count), c(k_count);
    for (int k = 0; k < k_count; ++k) {
      double sk = 0, ik = 0, ck = 0;
      for (std::size_t o = a_.begin(k); o < a_.end(k); ++o) {
        const double rho = d_.rho[static_cast<Eigen::Index>(o)];
        sk += (base[static_cast<Eigen::Index>(o)] + rho) / (2.0 * rho);
        ik += 1.0 / (2.0 * rho);
        ck += 1.0 / (2.0 * std::abs(rho));
      }
      s[k] = sk;
      inv[k] = ik;
      c[k] = ck;
    }
    for (long i = 0;; ++i) {
      const Eigen::VectorXd grad = s - d_.lam.cwiseProduct(inv) - Eigen::VectorXd::Ones(k_count);
      const double norm = grad.lpNorm<Eigen::Infinity>();
      if (!std::isfinite(norm) || norm > kBlowUp) return diverge();
      if (i > 0 && newton() && norm >= last_lam_grad_) return false;  // rounding floor reached
      last_lam_grad_ = norm;
      if (norm <= cfg_.tolerance) return true;
      if (i >= cfg_.max_inner || !budget_left()) return false;
      const double beta = step_scale(cfg_, it_.lam);
      if (cfg_.step_rule == StepRule::curvature) d_.lam += beta * grad.cwiseQuotient(c);
      else d_.lam += beta * grad;
      ++it_.lam;
      it_.operations += k_count;
    }
  }

  /// Step 3: eps with rho held. The constant and diminishing rules hold lam
  /// too. The curvature rule ascends the dual with lam profiled out: each
  /// agent's lam is at its own optimum for the current eps, and the Newton
  /// system is the Schur complement H_ee - sum_k h_k h_k^T / c_k.
  bool eps_loop() {
    const int n = a_.n_resources();
    const bool profiled = cfg_.step_rule == StepRule::curvature;
    std::optional<Eigen::LDLT<Eigen::MatrixXd>> solver;
    if (profiled) {
      Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
      for (int k = 0; k < a_.n_agents(); ++k) {
        Eigen::VectorXd hk = Eigen::VectorXd::Zero(n);
        double ck = 0;
        for (std::size_t o = a_.begin(k); o < a_.end(k); ++o) {
          const Pattern& p = a_.option(o).footprint;
          const double c = 1.0 / (2.0 * std::abs(d_.rho[static_cast<Eigen::Index>(o)]));
          ck += c;
          if (p.length == 0) continue;
          h.block(p.first, p.first, p.length, p.length).array() += c;
          hk.segment(p.first, p.length).array() += c;
        }
        h -= hk * hk.transpose() / ck;
      }
      solver.emplace(h);
      if (solver->info() != Eigen::Success || !solver->isPositive() || (solver->vectorD().array() <= 0).any())
        solver.reset();
    }
    for (long i = 0;; ++i) {
      const Eigen::VectorXd grad = profiled ? profiled_eps_gradient() : gradient_from_reduced(a_, d_, reduced()).eps;
      const double norm = grad.lpNorm<Eigen::Infinity>();
      if (!std::isfinite(norm) || norm > kBlowUp) return diverge();
      if (i > 0 && newton() && norm >= last_eps_grad_) return false;
      last_eps_grad_ = norm;
      if (norm <= cfg_.tolerance) return true;
      if (i >= cfg_.max_inner || !budget_left()) return false;
      const double beta = step_scale(cfg_, it_.eps);
      if (solver) d_.eps += beta * solver->solve(grad);
      else d_.eps += beta * grad;
      ++it_.eps;
      it_.operations += n;
    }
  }

  double last_lam_grad() const { return last_lam_grad_; }
  double last_eps_grad() const { return last_eps_grad_; }
  Eigen::VectorXd reduced() const { return reduced_weights(a_, d_); }

 private:
  static constexpr double kBlowUp = 1e12;

  bool newton() const { return cfg_.step_rule == StepRule::curvature; }

  bool diverge() {
    diverged_ = true;
    return false;
  }

  /// eps gradient evaluated at each agent's best lam for the current eps.
  Eigen::VectorXd profiled_eps_gradient() const {
    const Eigen::VectorXd base = without_lam();
    Eigen::VectorXd g = Eigen::VectorXd::Constant(a_.n_resources(), -1.0);
    for (int k = 0; k < a_.n_agents(); ++k) {
      double sk = 0, ik = 0;
      for (std::size_t o = a_.begin(k); o < a_.end(k); ++o) {
        const double rho = d_.rho[static_cast<Eigen::Index>(o)];
        sk += (base[static_cast<Eigen::Index>(o)] + rho) / (2.0 * rho);
        ik += 1.0 / (2.0 * rho);
      }
      const double lam = (sk - 1.0) / ik;
      for (std::size_t o = a_.begin(k); o < a_.end(k); ++o) {
        const Pattern& p = a_.option(o).footprint;
        if (p.length == 0) continue;
        const double rho = d_.rho[static_cast<Eigen::Index>(o)];
        g.segment(p.first, p.length).array() += (base[static_cast<Eigen::Index>(o)] - lam + rho) / (2.0 * rho);
      }
    }
    return g;
  }

  Eigen::VectorXd without_lam() const {
    Eigen::VectorXd b(static_cast<Eigen::Index>(a_.n_options()));
    for (std::size_t o = 0; o < a_.n_options(); ++o)
      b[static_cast<Eigen::Index>(o)] = -w_[static_cast<Eigen::Index>(o)] - footprint_sum(d_.eps, a_.option(o).footprint);
    return b;
  }

  const AssignmentInstance& a_;
  const SolverConfig& cfg_;
  DualPoint& d_;
  IterationCounts& it_;
  Eigen::VectorXd w_;
  double last_lam_grad_ = 0;
  double last_eps_grad_ = 0;
  bool diverged_ = false;
};

}  // namespace detail

/// Nested ascent on the canonical dual: rho loop, then alternating lam and
/// eps loops until both settle, then a rho recheck; repeat until all three
/// gradient blocks are within tolerance or a cap is hit.
inline SolveReport solve(const AssignmentInstance& a, const SolverConfig& cfg = {}) {
  cfg.validate();
  SolveReport rep;
  rep.dual = cfg.warm_start ? *cfg.warm_start : DualPoint::uniform(a, cfg.init);
  rep.dual.check_shape(a);
  detail::Ascent ascent(a, cfg, rep.dual, rep.iterations);

  double best = std::numeric_limits<double>::infinity();
  long since_best = 0;
  for (long outer = 0; outer < cfg.max_outer && !rep.converged; ++outer) {
    const DualPoint snapshot = rep.dual;
    ascent.rho_loop();
    bool settled = false;
    double mid_norm = std::numeric_limits<double>::infinity();
    for (long mid = 0; mid < cfg.max_inner && ascent.budget_left(); ++mid) {
      ascent.lam_loop();
      ascent.eps_loop();
      const DualGradient g = dual_gradient(a, rep.dual);
      const double norm = std::max(g.lam.lpNorm<Eigen::Infinity>(), g.eps.lpNorm<Eigen::Infinity>());
      if (norm <= cfg.tolerance) {
        settled = true;
        break;
      }
      if (norm >= mid_norm) break;
      mid_norm = norm;
    }
    rep.iterations.outer = outer + 1;
    if (ascent.diverged()) {
      rep.dual = snapshot;
      rep.diverged = true;
      break;
    }
    const double norm = dual_gradient(a, rep.dual).sup_norm();
    rep.converged = settled && norm <= cfg.tolerance;
    if (norm < 0.99 * best) {
      best = norm;
      since_best = 0;
    } else if (++since_best >= cfg.stall_window) {
      break;
    }
    if (!ascent.budget_left()) break;
  }
  rep.truncated = !rep.converged;

  rep.indicator = recover_indicator(a, rep.dual);
  rep.dual_value = dual_value(a, rep.dual);
  rep.in_cone = rep.dual.in_positive_cone();
  Binarization b = binarize(a, rep.indicator, cfg.binarize_tol);
  rep.binary = b.binary;
  if (b.feasible) {
    rep.choice = b.choice;
  } else {
    rep.violations = b.violations;
    if (cfg.repair) {
      Repair fix = repair_allocation(a, rep.indicator);
      rep.repaired = fix.feasible;
      if (fix.feasible) rep.choice = polish_allocation(a, fix.choice);
      else rep.violations.insert(rep.violations.end(), fix.violations.begin(), fix.violations.end());
    }
  }
  rep.feasible = !rep.choice.empty();
  if (rep.feasible) {
    rep.allocation = a.to_allocation(rep.choice);
    rep.primal = a.objective(rep.choice);
    rep.gap = rep.primal - rep.dual_value;
  }
  rep.certified = rep.converged && rep.in_cone && b.feasible;
  rep.duality_holds = rep.certified && std::abs(rep.gap) <= cfg.duality_tol * (1.0 + std::abs(rep.dual_value));
  rep.diagnostic = diagnose_gap(a, rep.dual, rep.choice, cfg, rep.converged);
  return rep;
}

}  // namespace scfdma
