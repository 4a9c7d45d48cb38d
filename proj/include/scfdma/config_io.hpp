#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "scfdma/harness.hpp"

namespace scfdma {

namespace detail {

/// Reads known keys from a JSON object and rejects anything else, so a
/// misspelt key fails loudly instead of silently keeping a default.
class Reader {
 public:
  Reader(const nlohmann::json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw std::invalid_argument(where_ + " must be an object");
  }
  ~Reader() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [k, v] : j_.items())
      if (!used_.count(k)) throw std::invalid_argument("unknown key " + where_ + "." + k);
  }

  template <class T>
  void get(const std::string& key, T& out) {
    used_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument(where_ + "." + key + ": " + e.what());
    }
  }

  /// A scalar or a list of numbers.
  void get_list(const std::string& key, std::vector<double>& out) {
    used_.insert(key);
    if (!j_.contains(key)) return;
    const auto& v = j_.at(key);
    out = v.is_array() ? v.get<std::vector<double>>() : std::vector<double>{v.get<double>()};
  }

  const nlohmann::json* sub(const std::string& key) {
    used_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

 private:
  const nlohmann::json& j_;
  std::string where_;
  std::set<std::string> used_;
};

template <class E>
E parse_enum(const std::string& s, std::initializer_list<std::pair<const char*, E>> table, const char* what) {
  for (const auto& [n, e] : table)
    if (s == n) return e;
  throw std::invalid_argument(std::string("unknown ") + what + " " + s);
}

}  // namespace detail

inline ScenarioConfig scenario_from_json(const nlohmann::json& j) {
  ScenarioConfig c;
  detail::Reader r(j, "scenario");
  r.get("users", c.n_users);
  r.get("subchannels", c.n_subchannels);
  r.get("subchannel_bandwidth_hz", c.subchannel_bandwidth_hz);
  r.get("cell_radius_m", c.cell_radius_m);
  r.get("min_distance_m", c.min_distance_m);
  r.get("carrier_mhz", c.path_loss.carrier_mhz);
  r.get("bs_height_m", c.path_loss.bs_height_m);
  r.get("ms_height_m", c.path_loss.ms_height_m);
  r.get("metro_correction_db", c.path_loss.metro_correction_db);
  r.get("shadowing_std_db", c.shadowing_std_db);
  r.get("noise_psd_dbm_hz", c.noise_psd_dbm_hz);
  r.get("noise_figure_db", c.noise_figure_db);
  r.get_list("p_max_w", c.p_max_w);
  r.get_list("p_peak_w", c.p_peak_w);
  r.get("rayleigh_fading", c.rayleigh_fading);
  r.get("rayleigh_mean_power", c.rayleigh_mean_power);
  std::string eq = "mmse";
  r.get("equalizer", eq);
  c.equalizer = detail::parse_enum<Equalizer>(eq, {{"mmse", Equalizer::mmse}, {"zf", Equalizer::zf}}, "equalizer");
  return c;
}

inline SolverConfig solver_from_json(const nlohmann::json& j) {
  SolverConfig c;
  detail::Reader r(j, "solver");
  std::string rule = "curvature", proj = "positive";
  r.get("step_rule", rule);
  if (rule == "constant") c = SolverConfig::constant_steps();
  c.step_rule = detail::parse_enum<StepRule>(
      rule, {{"constant", StepRule::constant}, {"diminishing", StepRule::diminishing}, {"curvature", StepRule::curvature}},
      "step rule");
  if (rule == "constant") proj = "sign_flip";
  r.get("projection", proj);
  c.projection = detail::parse_enum<RhoProjection>(
      proj, {{"sign_flip", RhoProjection::sign_flip}, {"positive", RhoProjection::positive}}, "rho projection");
  r.get("init", c.init);
  r.get("beta", c.beta);
  r.get("tolerance", c.tolerance);
  r.get("eta", c.eta);
  r.get("rho_floor", c.rho_floor);
  r.get("max_inner", c.max_inner);
  r.get("max_outer", c.max_outer);
  r.get("max_total", c.max_total);
  r.get("stall_window", c.stall_window);
  r.get("binarize_tol", c.binarize_tol);
  r.get("repair", c.repair);
  r.get("duality_tol", c.duality_tol);
  r.get("near_optimal_ratio", c.near_optimal_ratio);
  return c;
}

inline ModulationTable modulations_from_json(const nlohmann::json& j) {
  ModulationTable t;
  detail::Reader r(j, "modulations");
  r.get("names", t.names);
  r.get("bits_per_symbol", t.bits_per_symbol);
  std::vector<double> db;
  r.get("thresholds", t.thresholds);
  r.get("thresholds_db", db);
  if (!db.empty()) {
    if (!t.thresholds.empty()) throw std::invalid_argument("give thresholds or thresholds_db, not both");
    for (double d : db) t.thresholds.push_back(std::pow(10.0, d / 10.0));
  }
  t.validate();
  return t;
}

inline CampaignConfig campaign_from_json(const nlohmann::json& j) {
  CampaignConfig c;
  detail::Reader r(j, "config");
  std::string problem = "sumax";
  r.get("problem", problem);
  c.problem = detail::parse_enum<ProblemKind>(problem, {{"sumax", ProblemKind::sumax}, {"jamsc", ProblemKind::jamsc}},
                                              "problem");
  r.get("drops", c.n_drops);
  r.get("seed", c.base_seed);
  r.get("threads", c.threads);
  r.get("allocators", c.allocators);
  r.get("weights", c.weights);
  r.get("oracle_node_ceiling", c.oracle_node_ceiling);
  if (const auto* s = r.sub("scenario")) c.scenario = scenario_from_json(*s);
  if (const auto* s = r.sub("solver")) c.solver = solver_from_json(*s);
  if (const auto* s = r.sub("modulations")) c.modulations = modulations_from_json(*s);
  if (const auto* s = r.sub("rate")) {
    detail::Reader rr(*s, "rate");
    rr.get_list("targets_bps", c.targets_bps);
    rr.get("tti_s", c.frame.tti_s);
    rr.get("symbols_per_subchannel_per_tti", c.frame.symbols_per_subchannel_per_tti);
    rr.get("fixed_modulation", c.fixed_modulation);
    std::string cap = "none";
    rr.get("power_cap", cap);
    c.cap = detail::parse_enum<PowerCap>(cap, {{"none", PowerCap::none}, {"strict", PowerCap::strict}}, "power cap");
  }
  return c;
}

inline CampaignConfig load_campaign(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(f, nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
  return campaign_from_json(j);
}

}  // namespace scfdma
