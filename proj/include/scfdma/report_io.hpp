#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "scfdma/harness.hpp"
#include "scfdma/solver.hpp"

namespace scfdma {

/// Fixed-format number for CSV output, identical across runs.
inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline nlohmann::json to_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

inline nlohmann::json to_json(const SolveReport& r) {
  nlohmann::json j;
  j["feasible"] = r.feasible;
  j["heuristic_repair"] = r.repaired;
  j["choice"] = r.choice;
  nlohmann::json alloc = nlohmann::json::array();
  for (const auto& u : r.allocation) {
    nlohmann::json e{{"pattern", u.pattern}};
    if (u.modulation) e["modulation"] = *u.modulation;
    alloc.push_back(e);
  }
  j["allocation"] = alloc;
  j["violations"] = r.violations;
  j["primal"] = r.primal;
  j["dual"] = r.dual_value;
  j["duality_gap"] = r.gap;
  j["converged"] = r.converged;
  j["truncated"] = r.truncated;
  j["diverged"] = r.diverged;
  j["in_positive_cone"] = r.in_cone;
  j["binary_recovery"] = r.binary;
  j["certified"] = r.certified;
  j["complementary_duality_holds"] = r.duality_holds;
  j["iterations"] = {{"rho", r.iterations.rho},   {"lam", r.iterations.lam},
                     {"eps", r.iterations.eps},   {"outer", r.iterations.outer},
                     {"operations", r.iterations.operations}};
  j["multipliers"] = {{"eps", to_json(r.dual.eps)}, {"lam", to_json(r.dual.lam)}, {"rho", to_json(r.dual.rho)}};
  j["indicator"] = to_json(r.indicator);
  j["gap_diagnostic"] = {{"theta", to_json(r.diagnostic.theta)},
                         {"modified_weights", to_json(r.diagnostic.modified_weights)},
                         {"flipped", r.diagnostic.flipped},
                         {"max_ratio", r.diagnostic.max_ratio},
                         {"perturbation_ratio", r.diagnostic.perturbation_ratio},
                         {"near_optimal", r.diagnostic.near_optimal},
                         {"from_converged_point", r.diagnostic.from_converged_point}};
  return j;
}

inline void write_drops_csv(std::ostream& os, const CampaignResult& res) {
  os << "drop,seed,allocator,feasible,objective,certified,in_cone,converged,repaired,rho_iters,lam_iters,eps_iters,"
        "outer_iters,max_ratio,allocation\n";
  for (const auto& d : res.drops)
    for (const auto& r : d.allocators) {
      os << d.index << ',' << d.seed << ',' << r.name << ',' << r.feasible << ',' << (r.feasible ? num(r.objective) : "")
         << ',';
      if (r.solve) {
        const auto& s = *r.solve;
        os << s.certified << ',' << s.in_cone << ',' << s.converged << ',' << s.repaired << ',' << s.iterations.rho << ','
           << s.iterations.lam << ',' << s.iterations.eps << ',' << s.iterations.outer << ',' << num(s.diagnostic.max_ratio);
      } else {
        os << ",,,,,,,,";
      }
      os << ',';
      for (std::size_t k = 0; k < r.users.size(); ++k) os << (k ? "|" : "") << r.users[k].pattern;
      os << '\n';
    }
}

inline void write_users_csv(std::ostream& os, const CampaignResult& res) {
  os << "drop,allocator,user,pattern,n_subchannels,modulation,power_w,snr\n";
  for (const auto& d : res.drops)
    for (const auto& r : d.allocators)
      for (std::size_t k = 0; k < r.users.size(); ++k) {
        const auto& u = r.users[k];
        os << d.index << ',' << r.name << ',' << k + 1 << ',' << u.pattern << ',' << u.n_subchannels << ',' << u.modulation
           << ',' << num(u.power_w) << ',' << num(u.snr) << '\n';
      }
}

inline void write_cdf_csv(std::ostream& os, const std::vector<double>& values) {
  os << "objective,fraction\n";
  if (values.empty()) return;
  for (const auto& [v, f] : emit_cdf(values)) os << num(v) << ',' << num(f) << '\n';
}

inline nlohmann::json summary_json(const CampaignConfig& cfg, const CampaignResult& res) {
  nlohmann::json j;
  j["problem"] = name(cfg.problem);
  j["drops"] = cfg.n_drops;
  j["base_seed"] = cfg.base_seed;
  j["users"] = cfg.scenario.n_users;
  j["subchannels"] = cfg.scenario.n_subchannels;
  j["wall_time_s"] = res.wall_time_s;
  nlohmann::json allocs = nlohmann::json::object();
  for (const auto& s : res.summaries) {
    nlohmann::json a{{"drops", s.drops},
                     {"feasible", s.feasible},
                     {"refused", s.refused},
                     {"mean_objective", s.mean_objective},
                     {"mean_runtime_s", s.mean_runtime_s}};
    if (s.name.starts_with("dual")) {
      a["certified"] = s.certified;
      a["converged"] = s.converged;
      a["in_positive_cone"] = s.in_cone;
      a["heuristic_repairs"] = s.repaired;
    }
    if (s.mean_ratio_to_oracle) a["mean_ratio_to_oracle"] = *s.mean_ratio_to_oracle;
    allocs[s.name] = a;
  }
  j["allocators"] = allocs;
  j["invariant_failures"] = res.invariant_failures;
  return j;
}

/// drops.csv, users.csv, cdf_<allocator>.csv and summary.json under dir.
inline void write_campaign(const std::filesystem::path& dir, const CampaignConfig& cfg, const CampaignResult& res) {
  std::filesystem::create_directories(dir);
  auto open = [&](const std::string& file) {
    std::ofstream f(dir / file);
    if (!f) throw std::runtime_error("cannot write " + (dir / file).string());
    return f;
  };
  {
    auto f = open("drops.csv");
    write_drops_csv(f, res);
  }
  {
    auto f = open("users.csv");
    write_users_csv(f, res);
  }
  for (const auto& name : cfg.resolved_allocators()) {
    std::vector<double> values;
    for (const auto& d : res.drops)
      if (const auto* r = d.find(name); r && r->feasible) values.push_back(r->objective);
    auto f = open("cdf_" + name + ".csv");
    write_cdf_csv(f, values);
  }
  auto f = open("summary.json");
  f << summary_json(cfg, res).dump(2) << '\n';
}

}  // namespace scfdma
