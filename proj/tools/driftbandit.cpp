#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "driftbandit/errors.hpp"
#include "driftbandit/harness.hpp"
#ifdef DRIFTBANDIT_WITH_ORACLES
#include "driftbandit/oracles.hpp"
#endif

using namespace driftbandit;

namespace {

struct Overrides {
  std::string config;
  std::optional<std::string> task;
  std::optional<long> T;
  std::optional<std::string> gamma;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> threads;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "JSON experiment config");
  cmd->add_option("--task", o.task, "lb, glb, scb, scb_pw, bob, mdp_lm or mdp_mnl");
  cmd->add_option("--gamma", o.gamma, "discount factor or 'auto'");
  cmd->add_option("--trials", o.trials, "independent trials");
  cmd->add_option("--seed", o.seed, "base seed");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--threads", o.threads, "worker threads (0 = all cores)");
}

ExperimentConfig resolve(const Overrides& o) {
  ExperimentConfig cfg = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
  if (o.task) cfg.task = *o.task;
  if (o.T) {
    if (cfg.is_mdp()) {
      cfg.K = *o.T;
    } else {
      cfg.T = *o.T;
    }
  }
  if (o.gamma) {
    if (*o.gamma == "auto") {
      cfg.gamma.reset();
    } else {
      try {
        cfg.gamma = std::stod(*o.gamma);
      } catch (const std::exception&) {
        throw ConfigError("--gamma must be a number or 'auto'");
      }
    }
  }
  if (o.trials) cfg.trials = *o.trials;
  if (o.seed) cfg.base_seed = *o.seed;
  if (o.out) cfg.out = *o.out;
  if (o.threads) cfg.threads = *o.threads;
  cfg.validate();
  return cfg;
}

void print_summary(const ExperimentResult& r) {
  std::printf("%-14s %10s %14s %12s %8s\n", "algorithm", "gamma", "final_mean", "final_sd", "failed");
  for (const AlgorithmSummary& s : r.summaries) {
    std::printf("%-14s %10.6f %14.4f %12.4f %8d\n", s.algorithm.c_str(), s.gamma, s.final_mean,
                s.final_sd, s.failures);
  }
}

std::vector<long> parse_list(const std::string& text) {
  std::vector<long> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stol(item));
    } catch (const std::exception&) {
      throw ConfigError("bad horizon '" + item + "' in --T list");
    }
  }
  return out;
}

int selftest() {
#ifdef DRIFTBANDIT_WITH_ORACLES
  struct Row {
    const char* name;
    oracles::SuiteReport report;
  };
  const Row rows[] = {
      {"estimator equivalence", oracles::estimator_equivalence_suite(11, 100, 1e-8)},
      {"weighted potential", oracles::potential_suite(12, 200)},
      {"trace bound", oracles::trace_suite(13, 200)},
      {"determinant bound", oracles::determinant_suite(14, 200)},
  };
  int bad = 0;
  for (const Row& r : rows) {
    const bool ok = r.report.violations == 0;
    bad += ok ? 0 : 1;
    std::printf("%-24s %s  cases=%d violations=%d worst=%.3g\n", r.name, ok ? "PASS" : "FAIL",
                r.report.cases, r.report.violations, r.report.worst);
  }
  return bad == 0 ? 0 : 1;
#else
  std::fprintf(stderr, "built without the design oracles\n");
  return 2;
#endif
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discounted bandit and episodic MDP simulator"};
  app.require_subcommand(1);

  Overrides run_o;
  CLI::App* run = app.add_subcommand("run", "run one experiment and write CSV plus summary");
  add_common(run, run_o);
  run->add_option("--T", run_o.T, "horizon (episodes K for MDP tasks)");

  Overrides sweep_o;
  std::string t_list;
  CLI::App* sweep = app.add_subcommand("sweep", "fit log-regret against log-T");
  add_common(sweep, sweep_o);
  sweep->add_option("--T", t_list, "comma-separated horizons")->required();

  app.add_subcommand("selftest", "run the design inequality property suites");
  app.add_subcommand("version", "print the build version");

  CLI11_PARSE(app, argc, argv);
  try {
    if (run->parsed()) {
      const ExperimentResult r = run_experiment(resolve(run_o));
      const std::string csv = write_outputs(r);
      print_summary(r);
      std::printf("wrote %s\n", csv.c_str());
      return 0;
    }
    if (sweep->parsed()) {
      const SweepResult s = scaling_sweep(resolve(sweep_o), parse_list(t_list));
      for (std::size_t i = 0; i < s.T.size(); ++i) {
        std::printf("T=%ld mean_final_regret=%.4f\n", s.T[i], s.mean_regret[i]);
      }
      std::printf("slope=%.4f intercept=%.4f r2=%.4f\n", s.fit.slope, s.fit.intercept, s.fit.r2);
      return 0;
    }
    if (app.got_subcommand("selftest")) return selftest();
    if (app.got_subcommand("version")) {
      std::printf("%s\n", git_describe().c_str());
      return 0;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
