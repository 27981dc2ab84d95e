#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace driftbandit {

/// One experiment. Bandit tasks use T; MDP tasks use K and H.
struct ExperimentConfig {
  std::string task = "lb";  ///< lb, glb, scb, scb_pw, bob, mdp_lm, mdp_mnl
  long T = 6000;
  long K = 400;
  int H = 5;
  int d = 2;
  int n_arms = 50;
  double S = 1.0;
  double L = 1.0;
  std::optional<double> R;      ///< noise scale; task default when unset
  std::optional<double> gamma;  ///< unset means "auto"
  double delta = 0.05;
  int trials = 20;
  std::uint64_t base_seed = 1;
  std::vector<std::string> algorithms;  ///< empty means the task default
  std::string out = "out";
  int threads = 0;  ///< 0 = hardware concurrency

  int changes = 4;       ///< scb_pw: number of abrupt changes
  int num_states = 5;    ///< MDP tasks
  int num_actions = 3;
  int mdp_d = 4;
  double drift = 1.0;    ///< MDP tasks: parameter cycles over K episodes

  void validate() const;
  /// Task default when `algorithms` is empty.
  std::vector<std::string> resolved_algorithms() const;
  double noise_R() const;
  /// Rounds per trial: T for bandit tasks, K for MDP tasks.
  long horizon() const;
  bool is_mdp() const { return task == "mdp_lm" || task == "mdp_mnl"; }
};

/// Throws ConfigError on unknown keys, wrong types or invalid values.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
std::string config_to_json(const ExperimentConfig& cfg);

struct TrialTrace {
  std::string algorithm;
  int trial = 0;
  std::uint64_t seed = 0;
  std::vector<double> inst_regret;  ///< per round, or per episode
  double seconds = 0.0;
  bool failed = false;
  std::string error;
  std::map<std::string, double> diagnostics;

  double final_regret() const;
};

struct AlgorithmSummary {
  std::string algorithm;
  double gamma = 1.0;
  double lambda = 0.0;
  double final_mean = 0.0;
  double final_sd = 0.0;  ///< sample standard deviation over successful trials
  int completed = 0;
  int failures = 0;
  double mean_seconds = 0.0;
  std::map<std::string, double> diagnostics;  ///< worst case over trials
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<TrialTrace> traces;  ///< ordered by (algorithm, trial)
  std::vector<AlgorithmSummary> summaries;
  double path_length = 0.0;  ///< P_T, Γ_T or Δ depending on the task

  const AlgorithmSummary& summary(const std::string& algorithm) const;
};

/// Runs every (algorithm, trial) pair on a worker pool. Trial i uses seed
/// base_seed + i for noise and meta randomness; the arm set, piecewise path
/// and MDP instance depend on base_seed only.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Long-format CSV: task,algorithm,trial,t,inst_regret,cum_regret.
/// Horizons above 10⁴ keep every ⌈T/1000⌉-th round plus the last one.
void write_csv(const ExperimentResult& result, std::ostream& os);
void write_summary(const ExperimentResult& result, std::ostream& os);
/// Writes <out>/<task>.csv and <out>/<task>_summary.json; returns the CSV path.
std::string write_outputs(const ExperimentResult& result);

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Least squares of log y on log x. Needs at least two distinct positive x.
LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

struct SweepResult {
  std::vector<long> T;
  std::vector<double> mean_regret;  ///< first algorithm's mean final regret
  LogLogFit fit;
};

/// Runs `cfg` at each horizon with γ on auto and fits the growth exponent.
SweepResult scaling_sweep(ExperimentConfig cfg, const std::vector<long>& T_list);

/// Version string baked in at configure time.
std::string git_describe();

}  // namespace driftbandit
