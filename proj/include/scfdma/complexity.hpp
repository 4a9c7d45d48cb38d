#pragma once

#include <cstdint>
#include <vector>

#include "scfdma/assignment.hpp"
#include "scfdma/channel.hpp"
#include "scfdma/patterns.hpp"
#include "scfdma/solver.hpp"
#include "scfdma/sumax.hpp"

namespace scfdma {

struct ComplexityRow {
  int n_users = 0;
  int n_subchannels = 0;
  std::size_t n_patterns = 0;
  int runs = 0;
  double rho_iterations = 0;  // means over runs
  double lam_iterations = 0;
  double eps_iterations = 0;
  double outer_iterations = 0;
  double operations = 0;
  long unit_cost = 0;          // K J + K + N
  bool accounting_exact = true;  // every run: operations == q K J + s K + t N
};

/// Mean iteration and operation counts of the dual solver on SUmax drops.
/// Seeds run base_seed, base_seed + 1, ... for every grid cell.
inline std::vector<ComplexityRow> count_iterations(const std::vector<int>& users, const std::vector<int>& subchannels,
                                                   int runs, std::uint64_t base_seed, ScenarioConfig scenario,
                                                   const SolverConfig& solver = {}) {
  std::vector<ComplexityRow> out;
  for (int n : subchannels)
    for (int k : users) {
      scenario.n_users = k;
      scenario.n_subchannels = n;
      ComplexityRow row;
      row.n_users = k;
      row.n_subchannels = n;
      row.n_patterns = PatternSet::count(n);
      row.unit_cost = static_cast<long>(k * row.n_patterns) + k + n;
      row.runs = runs;
      for (int i = 0; i < runs; ++i) {
        const auto a = to_assignment(build_sumax(generate_channel(scenario, base_seed + static_cast<std::uint64_t>(i)), scenario, {}));
        const IterationCounts c = solve(a, solver).iterations;
        row.rho_iterations += static_cast<double>(c.rho);
        row.lam_iterations += static_cast<double>(c.lam);
        row.eps_iterations += static_cast<double>(c.eps);
        row.outer_iterations += static_cast<double>(c.outer);
        row.operations += static_cast<double>(c.operations);
        const long expect = c.rho * static_cast<long>(a.n_options()) + c.lam * k + c.eps * n;
        row.accounting_exact = row.accounting_exact && expect == c.operations;
      }
      const double r = runs > 0 ? runs : 1;
      row.rho_iterations /= r;
      row.lam_iterations /= r;
      row.eps_iterations /= r;
      row.outer_iterations /= r;
      row.operations /= r;
      out.push_back(row);
    }
  return out;
}

}  // namespace scfdma
