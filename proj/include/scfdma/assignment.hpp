#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "scfdma/allocation.hpp"
#include "scfdma/error.hpp"
#include "scfdma/jamsc.hpp"
#include "scfdma/patterns.hpp"
#include "scfdma/sumax.hpp"

namespace scfdma {

/// One selectable option of one agent. Weights are minimized.
struct Option {
  double weight = 0;
  Pattern footprint;
  std::size_t pattern = 0;
  std::optional<std::size_t> modulation;
};

/// Flat option index per agent.
using Choice = std::vector<std::size_t>;

/// Minimize sum w x subject to one option per agent and every resource
/// covered exactly once. Options are stored flat, agent by agent.
class AssignmentInstance {
 public:
  AssignmentInstance(int n_resources, const std::vector<std::vector<Option>>& per_agent) : n_resources_(n_resources) {
    if (n_resources < 1 || n_resources > kMaxSubchannels) throw std::out_of_range("resource count out of range");
    begin_.push_back(0);
    for (std::size_t k = 0; k < per_agent.size(); ++k) {
      if (per_agent[k].empty())
        throw InfeasibleError("agent " + std::to_string(k) + " has no admissible option", static_cast<int>(k));
      for (const Option& o : per_agent[k]) {
        if (o.footprint.first < 0 || o.footprint.first + o.footprint.length > n_resources)
          throw std::out_of_range("option footprint exceeds the resource range");
        options_.push_back(o);
        agent_.push_back(static_cast<int>(k));
      }
      begin_.push_back(options_.size());
    }
    if (per_agent.empty()) throw std::invalid_argument("assignment needs at least one agent");
  }

  int n_agents() const { return static_cast<int>(begin_.size()) - 1; }
  int n_resources() const { return n_resources_; }
  std::size_t n_options() const { return options_.size(); }
  std::size_t begin(int k) const { return begin_[static_cast<std::size_t>(k)]; }
  std::size_t end(int k) const { return begin_[static_cast<std::size_t>(k) + 1]; }
  const Option& option(std::size_t o) const { return options_[o]; }
  const std::vector<Option>& options() const { return options_; }
  int agent_of(std::size_t o) const { return agent_[o]; }

  Eigen::VectorXd weights() const {
    Eigen::VectorXd w(static_cast<Eigen::Index>(options_.size()));
    for (std::size_t o = 0; o < options_.size(); ++o) w[static_cast<Eigen::Index>(o)] = options_[o].weight;
    return w;
  }

  /// Same structure, new weights.
  AssignmentInstance with_weights(const Eigen::VectorXd& w) const {
    if (static_cast<std::size_t>(w.size()) != options_.size()) throw std::invalid_argument("weight vector size mismatch");
    AssignmentInstance out = *this;
    for (std::size_t o = 0; o < options_.size(); ++o) out.options_[o].weight = w[static_cast<Eigen::Index>(o)];
    return out;
  }

  /// Sum of chosen weights, accumulated in agent order.
  double objective(const Choice& choice) const {
    double s = 0;
    for (std::size_t o : choice) s += options_.at(o).weight;
    return s;
  }

  Eigen::VectorXd indicator(const Choice& choice) const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(options_.size()));
    for (std::size_t o : choice) x[static_cast<Eigen::Index>(o)] = 1.0;
    return x;
  }

  Allocation to_allocation(const Choice& choice) const {
    Allocation out;
    out.reserve(choice.size());
    for (std::size_t o : choice) out.push_back({options_.at(o).pattern, options_.at(o).modulation});
    return out;
  }

  /// Broken constraints of a per-agent choice; empty means feasible.
  std::vector<std::string> violations(const Choice& choice) const {
    std::vector<std::string> out;
    if (choice.size() != static_cast<std::size_t>(n_agents())) {
      out.push_back("expected one option per agent");
      return out;
    }
    std::vector<int> cover(static_cast<std::size_t>(n_resources_), 0);
    for (int k = 0; k < n_agents(); ++k) {
      const std::size_t o = choice[static_cast<std::size_t>(k)];
      if (o < begin(k) || o >= end(k)) {
        out.push_back("agent " + std::to_string(k) + ": option does not belong to the agent");
        continue;
      }
      const Pattern& p = options_[o].footprint;
      for (int n = p.first; n < p.first + p.length; ++n) ++cover[static_cast<std::size_t>(n)];
    }
    for (std::size_t n = 0; n < cover.size(); ++n)
      if (cover[n] != 1)
        out.push_back("sub-channel " + std::to_string(n + 1) + ": covered " + std::to_string(cover[n]) + " times");
    return out;
  }

 private:
  int n_resources_;
  std::vector<Option> options_;
  std::vector<int> agent_;
  std::vector<std::size_t> begin_;
};

/// Every pattern is an option, weight = -U.
inline AssignmentInstance to_assignment(const SumaxInstance& inst) {
  std::vector<std::vector<Option>> agents(static_cast<std::size_t>(inst.n_users()));
  for (int k = 0; k < inst.n_users(); ++k)
    for (std::size_t j = 0; j < inst.n_patterns(); ++j)
      agents[static_cast<std::size_t>(k)].push_back({-inst.utility(k, j), (*inst.patterns)[j], j, std::nullopt});
  return AssignmentInstance(inst.patterns->n_subchannels(), agents);
}

/// Admissible (modulation, pattern) pairs become options, weight = C.
inline AssignmentInstance to_assignment(const JamscInstance& inst) {
  if (!inst.infeasible_users.empty()) {
    const int k = inst.infeasible_users.front();
    throw InfeasibleError("user " + std::to_string(k) + " has no admissible (modulation, pattern) option", k);
  }
  std::vector<std::vector<Option>> agents(static_cast<std::size_t>(inst.n_users()));
  for (int k = 0; k < inst.n_users(); ++k)
    for (int m = 0; m < inst.n_modulations(); ++m)
      for (std::size_t j = 1; j < inst.n_patterns(); ++j)
        if (const auto& opt = inst.option(k, static_cast<std::size_t>(m), j))
          agents[static_cast<std::size_t>(k)].push_back({opt->cost, (*inst.patterns)[j], j, static_cast<std::size_t>(m)});
  return AssignmentInstance(inst.patterns->n_subchannels(), agents);
}

}  // namespace scfdma
