#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "scfdma/assignment.hpp"
#include "scfdma/error.hpp"

namespace scfdma {

/// Multipliers: eps per resource, lam per agent, rho per option.
struct DualPoint {
  Eigen::VectorXd eps;
  Eigen::VectorXd lam;
  Eigen::VectorXd rho;

  static DualPoint uniform(const AssignmentInstance& a, double value) {
    return {Eigen::VectorXd::Constant(a.n_resources(), value), Eigen::VectorXd::Constant(a.n_agents(), value),
            Eigen::VectorXd::Constant(static_cast<Eigen::Index>(a.n_options()), value)};
  }

  /// eps > 0, lam > 0, rho > 0 componentwise.
  bool in_positive_cone() const {
    return (eps.array() > 0).all() && (lam.array() > 0).all() && (rho.array() > 0).all();
  }

  void check_shape(const AssignmentInstance& a) const {
    if (eps.size() != a.n_resources() || lam.size() != a.n_agents() ||
        rho.size() != static_cast<Eigen::Index>(a.n_options()))
      throw std::invalid_argument("dual point shape does not match the instance");
  }
};

/// Sum of eps over a contiguous footprint.
inline double footprint_sum(const Eigen::VectorXd& eps, const Pattern& p) {
  return p.length == 0 ? 0.0 : eps.segment(p.first, p.length).sum();
}

/// r_o = -w_o - lam_k - sum_{n in o} eps_n. Independent of rho.
inline Eigen::VectorXd reduced_weights(const AssignmentInstance& a, const DualPoint& d) {
  d.check_shape(a);
  Eigen::VectorXd r(static_cast<Eigen::Index>(a.n_options()));
  for (int k = 0; k < a.n_agents(); ++k)
    for (std::size_t o = a.begin(k); o < a.end(k); ++o) {
      const Option& opt = a.option(o);
      r[static_cast<Eigen::Index>(o)] = -opt.weight - d.lam[k] - footprint_sum(d.eps, opt.footprint);
    }
  return r;
}

inline void require_nonzero_rho(const DualPoint& d) {
  if ((d.rho.array() == 0).any()) throw NumericError("rho has a zero component");
}

/// f^d = -1/4 sum (r + rho)^2 / rho - sum eps - sum lam.
inline double dual_value(const AssignmentInstance& a, const DualPoint& d) {
  require_nonzero_rho(d);
  const Eigen::VectorXd r = reduced_weights(a, d);
  return -0.25 * ((r + d.rho).array().square() / d.rho.array()).sum() - d.eps.sum() - d.lam.sum();
}

/// (r + rho) / (2 rho).
inline Eigen::VectorXd recover_indicator(const AssignmentInstance& a, const DualPoint& d) {
  require_nonzero_rho(d);
  const Eigen::VectorXd r = reduced_weights(a, d);
  return ((r + d.rho).array() / (2.0 * d.rho.array())).matrix();
}

struct DualGradient {
  Eigen::VectorXd eps;  // sum_o i_o A_{n,o} - 1
  Eigen::VectorXd lam;  // sum_{o of k} i_o - 1
  Eigen::VectorXd rho;  // ((r / rho)^2 - 1) / 4

  double sup_norm() const {
    return std::max({eps.lpNorm<Eigen::Infinity>(), lam.lpNorm<Eigen::Infinity>(), rho.lpNorm<Eigen::Infinity>()});
  }
};

inline DualGradient gradient_from_reduced(const AssignmentInstance& a, const DualPoint& d, const Eigen::VectorXd& r) {
  DualGradient g{Eigen::VectorXd::Constant(a.n_resources(), -1.0), Eigen::VectorXd::Constant(a.n_agents(), -1.0),
                 Eigen::VectorXd(static_cast<Eigen::Index>(a.n_options()))};
  for (int k = 0; k < a.n_agents(); ++k)
    for (std::size_t o = a.begin(k); o < a.end(k); ++o) {
      const auto oi = static_cast<Eigen::Index>(o);
      const double rho = d.rho[oi];
      const double i = (r[oi] + rho) / (2.0 * rho);
      g.lam[k] += i;
      const Pattern& p = a.option(o).footprint;
      if (p.length > 0) g.eps.segment(p.first, p.length).array() += i;
      const double q = r[oi] / rho;
      g.rho[oi] = 0.25 * (q * q - 1.0);
    }
  return g;
}

inline DualGradient dual_gradient(const AssignmentInstance& a, const DualPoint& d) {
  require_nonzero_rho(d);
  return gradient_from_reduced(a, d, reduced_weights(a, d));
}

/// Sum of w x over the options.
inline double primal_value(const AssignmentInstance& a, const Eigen::VectorXd& x) { return a.weights().dot(x); }

/// Xi(i, d) = sum [rho i^2 + (lam - rho - U + sum eps A) i] - sum eps - sum lam, with U = -w.
inline double complementarity(const AssignmentInstance& a, const Eigen::VectorXd& x, const DualPoint& d) {
  const Eigen::VectorXd r = reduced_weights(a, d);
  const Eigen::ArrayXd xa = x.array();
  return (d.rho.array() * xa.square() - (r.array() + d.rho.array()) * xa).sum() - d.eps.sum() - d.lam.sum();
}

/// Where a proposed rho lands exactly on zero, step off it by eta in the
/// direction of the previous value's sign. Other entries pass through.
inline Eigen::VectorXd project_rho(const Eigen::VectorXd& previous, const Eigen::VectorXd& proposed, double eta) {
  if (!(eta > 0)) throw std::invalid_argument("eta must be positive");
  if (previous.size() != proposed.size()) throw std::invalid_argument("rho vectors differ in length");
  Eigen::VectorXd out = proposed;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    if (out[i] != 0) continue;
    if (previous[i] == 0) throw NumericError("previous rho is zero, the sign step is undefined");
    out[i] = previous[i] + (previous[i] > 0 ? eta : -eta);
  }
  return out;
}

/// Keeps rho strictly positive: entries at or below zero become floor.
inline Eigen::VectorXd project_rho_positive(const Eigen::VectorXd& proposed, double floor) {
  if (!(floor > 0)) throw std::invalid_argument("rho floor must be positive");
  Eigen::VectorXd out = proposed;
  for (Eigen::Index i = 0; i < out.size(); ++i)
    if (!(out[i] > 0)) out[i] = floor;
  return out;
}

struct Binarization {
  bool binary = false;    // every entry within tau of 0 or 1
  bool feasible = false;  // binary and exactly one option per agent, exact cover
  Choice choice;
  std::vector<std::string> violations;
};

inline Binarization binarize(const AssignmentInstance& a, const Eigen::VectorXd& x, double tau) {
  Binarization b;
  b.binary = true;
  for (Eigen::Index o = 0; o < x.size(); ++o)
    if (std::abs(x[o]) > tau && std::abs(x[o] - 1.0) > tau) {
      b.binary = false;
      b.violations.push_back("option " + std::to_string(o) + ": indicator " + std::to_string(x[o]) + " is not binary");
    }
  if (!b.binary) return b;
  for (int k = 0; k < a.n_agents(); ++k) {
    int picked = 0;
    for (std::size_t o = a.begin(k); o < a.end(k); ++o)
      if (x[static_cast<Eigen::Index>(o)] > 0.5) {
        if (picked == 0) b.choice.push_back(o);
        ++picked;
      }
    if (picked != 1)
      b.violations.push_back("agent " + std::to_string(k) + ": " + std::to_string(picked) + " options selected");
  }
  if (b.violations.empty()) b.violations = a.violations(b.choice);
  b.feasible = b.violations.empty();
  if (!b.feasible) b.choice.clear();
  return b;
}

struct Repair {
  bool feasible = false;
  Choice choice;
  std::vector<std::string> violations;
};

/// Heuristic fallback when recovery is not a feasible assignment. Agents in
/// index order take the unconflicted option with the largest indicator
/// (lower weight, then lower index on ties). Uncovered runs then go to the
/// cheapest of: an agent without resources taking the run, or a neighbour
/// extending its block over it.
inline Repair repair_allocation(const AssignmentInstance& a, const Eigen::VectorXd& x) {
  const int k_count = a.n_agents();
  std::vector<std::optional<std::size_t>> pick(static_cast<std::size_t>(k_count));
  std::uint64_t taken = 0;
  for (int k = 0; k < k_count; ++k) {
    std::optional<std::size_t> best;
    for (std::size_t o = a.begin(k); o < a.end(k); ++o) {
      if (a.option(o).footprint.mask() & taken) continue;
      if (!best) {
        best = o;
        continue;
      }
      const double xo = x[static_cast<Eigen::Index>(o)], xb = x[static_cast<Eigen::Index>(*best)];
      if (xo > xb || (xo == xb && a.option(o).weight < a.option(*best).weight)) best = o;
    }
    if (best) {
      pick[static_cast<std::size_t>(k)] = best;
      taken |= a.option(*best).footprint.mask();
    }
  }

  // cheapest option of agent k with exactly footprint p
  auto find = [&](int k, const Pattern& p) -> std::optional<std::size_t> {
    std::optional<std::size_t> best;
    for (std::size_t o = a.begin(k); o < a.end(k); ++o)
      if (a.option(o).footprint == p && (!best || a.option(o).weight < a.option(*best).weight)) best = o;
    return best;
  };

  const int n = a.n_resources();
  const std::uint64_t full = (std::uint64_t{1} << n) - 1;
  while (taken != full) {
    int g0 = 0;
    while (taken >> g0 & 1) ++g0;
    int g1 = g0;
    while (g1 + 1 < n && !(taken >> (g1 + 1) & 1)) ++g1;
    const Pattern gap{g0, g1 - g0 + 1};

    std::optional<std::size_t> best;
    int best_k = -1;
    double best_delta = 0;
    for (int k = 0; k < k_count; ++k) {
      const auto& cur = pick[static_cast<std::size_t>(k)];
      const Pattern held = cur ? a.option(*cur).footprint : Pattern{};
      Pattern want;
      if (held.empty()) want = gap;
      else if (held.last() == g0 - 1) want = Pattern{held.first, g1 - held.first + 1};
      else if (held.first == g1 + 1) want = Pattern{g0, held.last() - g0 + 1};
      else continue;
      const auto o = find(k, want);
      if (!o) continue;
      const double delta = a.option(*o).weight - (cur ? a.option(*cur).weight : 0.0);
      if (!best || delta < best_delta) {
        best = o;
        best_k = k;
        best_delta = delta;
      }
    }
    if (!best) break;
    pick[static_cast<std::size_t>(best_k)] = best;
    taken |= a.option(*best).footprint.mask();
  }

  Repair out;
  for (int k = 0; k < k_count; ++k) {
    auto& cur = pick[static_cast<std::size_t>(k)];
    if (!cur) cur = find(k, Pattern{});
    if (!cur) {
      out.violations.push_back("agent " + std::to_string(k) + ": no option left after repair");
      continue;
    }
    out.choice.push_back(*cur);
  }
  if (out.violations.empty()) out.violations = a.violations(out.choice);
  out.feasible = out.violations.empty();
  if (!out.feasible) out.choice.clear();
  return out;
}

/// Local descent on a feasible choice: each agent moves to its cheapest
/// option on the same footprint, neighbouring blocks trade one resource
/// across their boundary, and an agent holding nothing may take one end of
/// another block, whenever that lowers the total. Stops at a local minimum.
inline Choice polish_allocation(const AssignmentInstance& a, Choice choice) {
  const int k_count = a.n_agents();
  auto cheapest = [&](int k, const Pattern& p) -> std::optional<std::size_t> {
    std::optional<std::size_t> best;
    for (std::size_t o = a.begin(k); o < a.end(k); ++o)
      if (a.option(o).footprint == p && (!best || a.option(o).weight < a.option(*best).weight)) best = o;
    return best;
  };
  auto weight = [&](std::size_t o) { return a.option(o).weight; };
  for (bool moved = true; moved;) {
    moved = false;
    for (int k = 0; k < k_count; ++k) {
      auto& o = choice[static_cast<std::size_t>(k)];
      if (const auto c = cheapest(k, a.option(o).footprint); c && weight(*c) < weight(o)) {
        o = *c;
        moved = true;
      }
    }
    for (int k = 0; k < k_count; ++k)
      for (int l = 0; l < k_count; ++l) {
        auto& ok = choice[static_cast<std::size_t>(k)];
        auto& ol = choice[static_cast<std::size_t>(l)];
        const Pattern pk = a.option(ok).footprint, pl = a.option(ol).footprint;
        if (k == l || pk.empty()) continue;
        std::vector<std::pair<Pattern, Pattern>> shifts;  // new blocks for k and l
        if (pl.empty()) {
          // l holds nothing: it may take either end of k's block
          shifts.push_back({{pk.first + 1, pk.length - 1}, {pk.first, 1}});
          shifts.push_back({{pk.first, pk.length - 1}, {pk.last(), 1}});
        } else if (pk.last() + 1 == pl.first) {
          shifts.push_back({{pk.first, pk.length + 1}, {pl.first + 1, pl.length - 1}});
          shifts.push_back({{pk.first, pk.length - 1}, {pl.first - 1, pl.length + 1}});
        }
        for (const auto& s : shifts) {
          const Pattern nk = s.first.length == 0 ? Pattern{} : s.first;
          const Pattern nl = s.second.length == 0 ? Pattern{} : s.second;
          const auto ck = cheapest(k, nk), cl = cheapest(l, nl);
          if (!ck || !cl) continue;
          if (weight(*ck) + weight(*cl) < weight(ok) + weight(ol)) {
            ok = *ck;
            ol = *cl;
            moved = true;
            break;
          }
        }
      }
  }
  return choice;
}

}  // namespace scfdma
