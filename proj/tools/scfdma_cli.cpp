// Command-line front end: allocation campaigns, oracle sweeps and gradient checks.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "scfdma/scfdma.hpp"

namespace {

struct Options {
  std::string config;
  std::optional<int> drops;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> allocators;
  std::string out;
  std::optional<int> threads;
  int points = 50;
};

void add_common(CLI::App* app, Options& o) {
  app->add_option("--config", o.config, "JSON configuration file")->check(CLI::ExistingFile);
  app->add_option("--drops", o.drops, "number of drops or instances")->check(CLI::NonNegativeNumber);
  app->add_option("--seed", o.seed, "base seed; drop i uses seed + i");
  app->add_option("--out", o.out, "output directory");
}

scfdma::CampaignConfig load(const Options& o, scfdma::ProblemKind problem) {
  scfdma::CampaignConfig cfg = o.config.empty() ? scfdma::CampaignConfig{} : scfdma::load_campaign(o.config);
  if (!o.config.empty() && cfg.problem != problem)
    std::cerr << "note: config names problem " << scfdma::name(cfg.problem) << ", running " << scfdma::name(problem) << '\n';
  cfg.problem = problem;
  if (o.drops) cfg.n_drops = *o.drops;
  if (o.seed) cfg.base_seed = *o.seed;
  if (!o.allocators.empty()) cfg.allocators = o.allocators;
  if (o.threads) cfg.threads = *o.threads;
  return cfg;
}

int run_campaign(const Options& o, scfdma::ProblemKind problem) {
  const scfdma::CampaignConfig cfg = load(o, problem);
  const scfdma::CampaignResult res = scfdma::run_campaign(cfg);
  const std::string out = o.out.empty() ? std::string("out_") + scfdma::name(problem) : o.out;
  scfdma::write_campaign(out, cfg, res);
  std::printf("%-14s %8s %14s %10s %10s\n", "allocator", "feasible", "mean objective", "certified", "runtime s");
  for (const auto& s : res.summaries)
    std::printf("%-14s %5d/%-3d %14.6g %10s %10.4f\n", s.name.c_str(), s.feasible, s.drops, s.mean_objective,
                s.name.starts_with("dual") ? std::to_string(s.certified).c_str() : "-", s.mean_runtime_s);
  for (const auto& s : res.summaries)
    if (s.refused > 0) std::printf("%s refused %d drops at its node ceiling\n", s.name.c_str(), s.refused);
  for (const auto& f : res.invariant_failures) std::fprintf(stderr, "invariant: %s\n", f.c_str());
  std::printf("wrote %s (%.1f s)\n", out.c_str(), res.wall_time_s);
  return res.invariant_failures.empty() ? 0 : 1;
}

scfdma::SweepConfig sweep(const Options& o, int default_instances) {
  scfdma::SweepConfig s;
  if (!o.config.empty()) {
    const scfdma::CampaignConfig cfg = scfdma::load_campaign(o.config);
    s.scenario = cfg.scenario;
    s.solver = cfg.solver;
    s.modulations = cfg.modulations;
    s.targets_bps = cfg.targets_bps;
    s.problem = cfg.problem;
  }
  s.instances = o.drops.value_or(default_instances);
  if (o.seed) s.base_seed = *o.seed;
  return s;
}

int run_certify(const Options& o) {
  scfdma::SweepConfig s = sweep(o, 500);
  s.problem = scfdma::ProblemKind::sumax;
  const scfdma::CertifySummary sum = scfdma::certify_sweep(s);
  int theta = 0, modified = 0, uncertified = 0;
  for (const auto& r : sum.records) {
    if (r.certified && !r.theta_zero) ++theta;
    if (!r.certified && r.feasible) {
      ++uncertified;
      if (!(r.modified_optimal && r.modified_resolves)) ++modified;
    }
  }
  std::printf("instances %d, certified %d (all matching oracle: %s), optimal %d, mean ratio %.5f, %.1f s\n",
              static_cast<int>(sum.records.size()), sum.certified,
              sum.certified_matches == sum.certified ? "yes" : "no", sum.optimal, sum.mean_ratio, sum.seconds);
  std::printf("uncertified %d, modified weights failing to reproduce %d\n", uncertified, modified);
  if (!o.out.empty()) {
    std::filesystem::create_directories(o.out);
    std::ofstream f(std::filesystem::path(o.out) / "certify.csv");
    f << "index,users,subchannels,certified,converged,in_cone,repaired,value,oracle,ratio,max_ratio,perturbation_ratio\n";
    for (const auto& r : sum.records)
      f << r.index << ',' << r.users << ',' << r.subchannels << ',' << r.certified << ',' << r.converged << ','
        << r.in_cone << ',' << r.repaired << ',' << scfdma::num(-r.value) << ',' << scfdma::num(-r.oracle) << ','
        << scfdma::num(r.ratio) << ',' << scfdma::num(r.max_ratio) << ',' << scfdma::num(r.perturbation_ratio) << '\n';
  }
  const bool ok = sum.certified_matches == sum.certified && sum.duality_failures == 0 && theta == 0 && modified == 0;
  return ok ? 0 : 1;
}

int run_gradcheck(const Options& o) {
  int status = 0;
  for (auto problem : {scfdma::ProblemKind::sumax, scfdma::ProblemKind::jamsc}) {
    scfdma::SweepConfig s = sweep(o, 20);
    s.problem = problem;
    const auto g = scfdma::gradcheck_sweep(s, o.points, 1e-6, s.base_seed);
    std::printf("%s: %d instances x %d points, worst relative error %.3e (%.2f s)\n", scfdma::name(problem), g.instances,
                o.points, g.worst, g.seconds);
    if (!(g.worst <= 1e-6)) status = 1;
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contiguous sub-channel allocation by canonical duality"};
  app.require_subcommand(1);
  Options o;

  auto* sumax = app.add_subcommand("sumax", "sum-utility campaign over random drops");
  auto* jamsc = app.add_subcommand("jamsc", "rate-constrained sum-cost campaign over random drops");
  for (auto* sub : {sumax, jamsc}) {
    add_common(sub, o);
    sub->add_option("--allocators", o.allocators, "comma-separated allocators")->delimiter(',');
    sub->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
  }
  auto* certify = app.add_subcommand("certify", "dual solver against exhaustive search on small instances");
  add_common(certify, o);
  auto* gradcheck = app.add_subcommand("gradcheck", "analytic dual gradients against central differences");
  add_common(gradcheck, o);
  gradcheck->add_option("--points", o.points, "points per instance")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);
  try {
    if (sumax->parsed()) return run_campaign(o, scfdma::ProblemKind::sumax);
    if (jamsc->parsed()) return run_campaign(o, scfdma::ProblemKind::jamsc);
    if (certify->parsed()) return run_certify(o);
    return run_gradcheck(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
