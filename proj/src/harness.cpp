#include "driftbandit/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "driftbandit/bandit_glb.hpp"
#include "driftbandit/bandit_lb.hpp"
#include "driftbandit/bob.hpp"
#include "driftbandit/environments.hpp"
#include "driftbandit/errors.hpp"
#include "driftbandit/ucrl.hpp"

#ifndef DRIFTBANDIT_GIT_DESCRIBE
#define DRIFTBANDIT_GIT_DESCRIBE "unknown"
#endif

namespace driftbandit {

using nlohmann::json;

namespace {

const std::set<std::string> kTasks = {"lb", "glb", "scb", "scb_pw", "bob", "mdp_lm", "mdp_mnl"};

bool is_bandit_glm(const std::string& task) {
  return task == "glb" || task == "scb" || task == "scb_pw";
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::vector<std::string> allowed_algorithms(const ExperimentConfig& cfg) {
  const std::string& t = cfg.task;
  if (t == "lb") return {"weight", "static", "restart"};
  if (t == "glb" || t == "scb") return {"glb_weight", "scb_weight", "glb_static", "scb_static"};
  if (t == "scb_pw") return {"scbpw_weight", "scb_weight", "scb_static"};
  if (t == "bob") {
    std::vector<std::string> out = {"bob"};
    const BobConfig bc = bob_candidates(cfg.d, cfg.T);
    for (int i = 1; i <= bc.N; ++i) out.push_back("candidate_" + std::to_string(i));
    return out;
  }
  return {"weight", "static"};
}

}  // namespace

// ---------------------------------------------------------------- config

void ExperimentConfig::validate() const {
  if (!kTasks.count(task)) throw ConfigError("unknown task '" + task + "'");
  if (T < 1 || K < 1 || H < 1) throw ConfigError("T, K and H must be positive");
  if (d < 1 || n_arms < 1) throw ConfigError("d and n_arms must be positive");
  if (!(S > 0.0) || !(L > 0.0)) throw ConfigError("S and L must be positive");
  if (R && !(*R > 0.0)) throw ConfigError("R must be positive");
  if (gamma && !(*gamma > 0.0 && *gamma <= 1.0)) throw ConfigError("gamma must lie in (0, 1]");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  if (trials < 1) throw ConfigError("trials must be at least 1");
  if (threads < 0) throw ConfigError("threads must be nonnegative");
  if (!is_mdp() && d != 2) throw ConfigError("bandit tasks use a planar path and need d = 2");
  if (task == "scb_pw" && changes < 0) throw ConfigError("changes must be nonnegative");
  if (task == "bob" && T < d) throw ConfigError("bob needs T >= d");
  if (is_mdp() && !(drift >= 0.0)) throw ConfigError("drift must be nonnegative");
  const std::vector<std::string> ok = allowed_algorithms(*this);
  for (const std::string& a : algorithms) {
    if (std::find(ok.begin(), ok.end(), a) == ok.end()) {
      throw ConfigError("algorithm '" + a + "' is not available for task '" + task + "'");
    }
  }
  std::set<std::string> seen(algorithms.begin(), algorithms.end());
  if (seen.size() != algorithms.size()) throw ConfigError("duplicate algorithm names");
}

std::vector<std::string> ExperimentConfig::resolved_algorithms() const {
  if (!algorithms.empty()) return algorithms;
  if (task == "lb") return {"weight", "static"};
  if (task == "glb") return {"glb_weight", "glb_static"};
  if (task == "scb") return {"scb_weight", "scb_static"};
  if (task == "scb_pw") return {"scbpw_weight", "scb_static"};
  if (task == "bob") return allowed_algorithms(*this);
  return {"weight", "static"};
}

double ExperimentConfig::noise_R() const {
  if (R) return *R;
  return is_bandit_glm(task) ? 0.5 : 1.0;
}

long ExperimentConfig::horizon() const { return is_mdp() ? K : T; }

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig c;
  static const std::set<std::string> keys = {
      "task", "T", "K", "H", "d", "n_arms", "S", "L", "R", "gamma", "delta", "trials",
      "base_seed", "algorithms", "out", "threads", "changes", "num_states", "num_actions",
      "mdp_d", "drift"};
  for (const auto& [key, value] : j.items()) {
    if (!keys.count(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  try {
    if (j.contains("task")) c.task = j.at("task").get<std::string>();
    if (j.contains("T")) c.T = j.at("T").get<long>();
    if (j.contains("K")) c.K = j.at("K").get<long>();
    if (j.contains("H")) c.H = j.at("H").get<int>();
    if (j.contains("d")) c.d = j.at("d").get<int>();
    if (j.contains("n_arms")) c.n_arms = j.at("n_arms").get<int>();
    if (j.contains("S")) c.S = j.at("S").get<double>();
    if (j.contains("L")) c.L = j.at("L").get<double>();
    if (j.contains("R") && !j.at("R").is_null()) c.R = j.at("R").get<double>();
    if (j.contains("gamma")) {
      const json& g = j.at("gamma");
      if (g.is_string()) {
        if (g.get<std::string>() != "auto") throw ConfigError("gamma must be a number or \"auto\"");
      } else {
        c.gamma = g.get<double>();
      }
    }
    if (j.contains("delta")) c.delta = j.at("delta").get<double>();
    if (j.contains("trials")) c.trials = j.at("trials").get<int>();
    if (j.contains("base_seed")) c.base_seed = j.at("base_seed").get<std::uint64_t>();
    if (j.contains("algorithms")) c.algorithms = j.at("algorithms").get<std::vector<std::string>>();
    if (j.contains("out")) c.out = j.at("out").get<std::string>();
    if (j.contains("threads")) c.threads = j.at("threads").get<int>();
    if (j.contains("changes")) c.changes = j.at("changes").get<int>();
    if (j.contains("num_states")) c.num_states = j.at("num_states").get<int>();
    if (j.contains("num_actions")) c.num_actions = j.at("num_actions").get<int>();
    if (j.contains("mdp_d")) c.mdp_d = j.at("mdp_d").get<int>();
    if (j.contains("drift")) c.drift = j.at("drift").get<double>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

namespace {

json config_json(const ExperimentConfig& c) {
  json j;
  j["task"] = c.task;
  j["T"] = c.T;
  j["K"] = c.K;
  j["H"] = c.H;
  j["d"] = c.d;
  j["n_arms"] = c.n_arms;
  j["S"] = c.S;
  j["L"] = c.L;
  j["R"] = c.noise_R();
  if (c.gamma) {
    j["gamma"] = *c.gamma;
  } else {
    j["gamma"] = "auto";
  }
  j["delta"] = c.delta;
  j["trials"] = c.trials;
  j["base_seed"] = c.base_seed;
  j["algorithms"] = c.resolved_algorithms();
  j["out"] = c.out;
  j["threads"] = c.threads;
  j["changes"] = c.changes;
  j["num_states"] = c.num_states;
  j["num_actions"] = c.num_actions;
  j["mdp_d"] = c.mdp_d;
  j["drift"] = c.drift;
  return j;
}

}  // namespace

std::string config_to_json(const ExperimentConfig& cfg) { return config_json(cfg).dump(2); }

double TrialTrace::final_regret() const {
  return std::accumulate(inst_regret.begin(), inst_regret.end(), 0.0);
}

const AlgorithmSummary& ExperimentResult::summary(const std::string& algorithm) const {
  for (const auto& s : summaries) {
    if (s.algorithm == algorithm) return s;
  }
  throw ConfigError("no summary for algorithm '" + algorithm + "'");
}

// ---------------------------------------------------------------- runners

namespace {

// Everything shared by the trials of one experiment, built once.
struct Setup {
  ExperimentConfig cfg;
  std::optional<BanditEnv> env;
  std::optional<MixtureMDP> mdp;
  double path_length = 0.0;
  std::map<std::string, std::pair<double, double>> gamma_lambda;
};

struct TrialOutcome {
  std::vector<double> inst;
  std::map<std::string, double> diagnostics;
};

GlbConfig glm_config(const Setup& s, GlbVariant variant, double gamma, double lambda) {
  const ExperimentConfig& c = s.cfg;
  GlbConfig g;
  g.link = LinkModel::make(LinkKind::kLogistic, c.S, c.L);
  g.radius = RadiusParams{c.S, c.L, c.noise_R(), c.delta, c.d};
  g.gamma = gamma;
  g.lambda = lambda;
  g.variant = variant;
  g.horizon = c.T;
  return g;
}

std::pair<double, double> choose_gamma_lambda(const Setup& s, const std::string& algo) {
  const ExperimentConfig& c = s.cfg;
  const double d = c.d;
  const double P = s.path_length;
  auto weighted = [&](double auto_gamma) { return c.gamma ? *c.gamma : auto_gamma; };
  if (c.task == "lb" || c.task == "bob") {
    if (algo == "static" || algo == "restart") return {1.0, d};
    if (algo == "weight") return {weighted(optimal_gamma_lb(c.d, c.T, P)), d};
    if (algo == "bob") return {0.0, d};
    const BobConfig bc = bob_candidates(c.d, c.T);
    const int i = std::stoi(algo.substr(std::string("candidate_").size()));
    return {bc.candidates[static_cast<std::size_t>(i - 1)], d};
  }
  if (is_bandit_glm(c.task)) {
    const LinkModel link = LinkModel::make(LinkKind::kLogistic, c.S, c.L);
    const double lam_glb = d / (link.c_mu * link.c_mu);
    const double lam_scb = d * std::log(static_cast<double>(c.T)) / link.c_mu;
    if (algo == "glb_weight") return {weighted(optimal_gamma_glb(c.d, c.T, P, link)), lam_glb};
    if (algo == "scb_weight") return {weighted(optimal_gamma_scb(c.d, c.T, P, link)), lam_scb};
    if (algo == "scbpw_weight") return {weighted(optimal_gamma_scbpw(c.d, c.T, P)), lam_scb};
    if (algo == "glb_static") return {1.0, d};
    return {1.0, lam_scb};
  }
  const double g = algo == "static" ? 1.0 : weighted(mdp_auto_gamma(P, c.K, c.H));
  return {g, 0.0};
}

Setup build_setup(const ExperimentConfig& cfg) {
  Setup s;
  s.cfg = cfg;
  if (cfg.is_mdp()) {
    DeskSizes sizes;
    sizes.num_states = cfg.num_states;
    sizes.num_actions = cfg.num_actions;
    sizes.H = cfg.H;
    sizes.d = cfg.mdp_d;
    sizes.K = cfg.K;
    const TransitionKind kind =
        cfg.task == "mdp_lm" ? TransitionKind::kLinearMixture : TransitionKind::kMnl;
    s.mdp = build_desk_instance(kind, cfg.base_seed, sizes, cfg.drift);
    s.path_length = s.mdp->total_variation();
  } else {
    Rng arm_rng(cfg.base_seed, Stream::kArms);
    ArmList arms = gen_arms(cfg.n_arms, cfg.d, cfg.L, arm_rng);
    ParameterPath path = cfg.task == "scb_pw"
                             ? ParameterPath::piecewise(cfg.d, cfg.T, cfg.S, cfg.changes, cfg.base_seed)
                             : ParameterPath::rotating(cfg.T, cfg.S);
    s.path_length = cfg.task == "scb_pw" ? path.num_changes() : path.path_length();
    const RewardKind kind =
        is_bandit_glm(cfg.task) ? RewardKind::kBernoulliLogistic : RewardKind::kGaussianLinear;
    s.env.emplace(BanditEnv{std::move(arms), std::move(path), kind, cfg.noise_R()});
  }
  for (const std::string& a : cfg.resolved_algorithms()) s.gamma_lambda[a] = choose_gamma_lambda(s, a);
  return s;
}

TrialOutcome run_bandit_trial(const Setup& s, const std::string& algo, std::uint64_t seed) {
  const ExperimentConfig& c = s.cfg;
  const auto [gamma, lambda] = s.gamma_lambda.at(algo);
  Rng noise(seed, Stream::kNoise);
  TrialOutcome out;
  out.inst.reserve(static_cast<std::size_t>(c.T));
  const RadiusParams rp{c.S, c.L, c.noise_R(), c.delta, c.d};
  if (algo == "bob") {
    Rng meta(seed, Stream::kMeta);
    const BobConfig bc = bob_candidates(c.d, c.T);
    LearnerFactory factory = [&](double g) -> std::unique_ptr<BanditLearner> {
      LbConfig lc;
      lc.radius = rp;
      lc.gamma = g;
      lc.lambda = c.d;
      return std::make_unique<LbLearner>(lc);
    };
    BobResult r = bob_run(bc, factory, *s.env, c.L, c.S, c.noise_R(), noise, meta);
    out.inst = std::move(r.inst_regret);
    out.diagnostics["clipped_meta_rewards"] = static_cast<double>(r.clipped);
    return out;
  }
  std::unique_ptr<BanditLearner> learner;
  GlbLearner* glm = nullptr;
  if (c.task == "lb" || c.task == "bob") {
    LbConfig lc;
    lc.radius = rp;
    lc.gamma = gamma;
    lc.lambda = lambda;
    lc.variant = algo == "static" ? LbVariant::kStatic
                 : algo == "restart" ? LbVariant::kRestart
                                     : LbVariant::kWeighted;
    if (algo == "restart") lc.restart_period = restart_period(c.d, c.T, s.path_length);
    learner = std::make_unique<LbLearner>(lc);
  } else {
    const GlbVariant v = algo.rfind("glb", 0) == 0 ? GlbVariant::kGlb
                         : algo == "scbpw_weight"  ? GlbVariant::kScbPw
                                                   : GlbVariant::kScb;
    auto g = std::make_unique<GlbLearner>(glm_config(s, v, gamma, lambda));
    glm = g.get();
    learner = std::move(g);
  }
  play_rounds(*learner, *s.env, noise, 1, c.T, out.inst);
  if (glm) out.diagnostics["max_score_residual"] = glm->max_residual();
  return out;
}

TrialOutcome run_mdp_trial(const Setup& s, const std::string& algo, std::uint64_t seed) {
  const MixtureMDP& m = *s.mdp;
  UcrlConfig uc = default_ucrl_config(m, s.gamma_lambda.at(algo).first);
  uc.delta = s.cfg.delta;
  UcrlRun run = run_ucrl(m, uc, seed);
  TrialOutcome out;
  out.inst = std::move(run.regret);
  out.diagnostics["q_min"] = run.diagnostics.q_min;
  out.diagnostics["q_max"] = run.diagnostics.q_max;
  if (m.kind == TransitionKind::kMnl) {
    out.diagnostics["max_prob_error"] = run.diagnostics.max_prob_error;
    out.diagnostics["max_score_residual"] = run.diagnostics.max_residual;
  }
  return out;
}

void summarize(ExperimentResult& r, const Setup& s) {
  for (const std::string& algo : r.config.resolved_algorithms()) {
    AlgorithmSummary sum;
    sum.algorithm = algo;
    sum.gamma = s.gamma_lambda.at(algo).first;
    sum.lambda = s.gamma_lambda.at(algo).second;
    if (r.config.is_mdp()) sum.lambda = default_ucrl_config(*s.mdp, sum.gamma).lambda_w;
    std::vector<double> finals;
    double secs = 0.0;
    for (const TrialTrace& t : r.traces) {
      if (t.algorithm != algo) continue;
      secs += t.seconds;
      if (t.failed) {
        ++sum.failures;
        continue;
      }
      finals.push_back(t.final_regret());
      for (const auto& [k, v] : t.diagnostics) {
        auto it = sum.diagnostics.find(k);
        const bool take_min = k == "q_min";
        if (it == sum.diagnostics.end()) {
          sum.diagnostics[k] = v;
        } else {
          it->second = take_min ? std::min(it->second, v) : std::max(it->second, v);
        }
      }
    }
    sum.completed = static_cast<int>(finals.size());
    if (!finals.empty()) {
      sum.final_mean = std::accumulate(finals.begin(), finals.end(), 0.0) / finals.size();
      double ss = 0.0;
      for (double f : finals) ss += (f - sum.final_mean) * (f - sum.final_mean);
      sum.final_sd = finals.size() > 1 ? std::sqrt(ss / (finals.size() - 1)) : 0.0;
    }
    sum.mean_seconds = secs / r.config.trials;
    r.summaries.push_back(sum);
  }
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const Setup setup = build_setup(cfg);
  ExperimentResult result;
  result.config = cfg;
  result.path_length = setup.path_length;
  const std::vector<std::string> algos = cfg.resolved_algorithms();
  for (const std::string& a : algos) {
    for (int i = 0; i < cfg.trials; ++i) {
      TrialTrace t;
      t.algorithm = a;
      t.trial = i;
      t.seed = cfg.base_seed + static_cast<std::uint64_t>(i);
      result.traces.push_back(std::move(t));
    }
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t j = next++; j < result.traces.size(); j = next++) {
      TrialTrace& t = result.traces[j];
      const auto start = std::chrono::steady_clock::now();
      try {
        TrialOutcome o = cfg.is_mdp() ? run_mdp_trial(setup, t.algorithm, t.seed)
                                      : run_bandit_trial(setup, t.algorithm, t.seed);
        t.inst_regret = std::move(o.inst);
        t.diagnostics = std::move(o.diagnostics);
      } catch (const NoConvergence& e) {
        t.failed = true;
        t.error = e.what();
      } catch (const EmptyConfidenceSet& e) {
        t.failed = true;
        t.error = e.what();
      }
      t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
  };
  unsigned n = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                               : std::max(1u, std::thread::hardware_concurrency());
  n = std::min<unsigned>(n, static_cast<unsigned>(result.traces.size()));
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  summarize(result, setup);
  return result;
}

// ---------------------------------------------------------------- output

void write_csv(const ExperimentResult& result, std::ostream& os) {
  os << "task,algorithm,trial,t,inst_regret,cum_regret\n";
  const long horizon = result.config.horizon();
  const long stride = horizon > 10000 ? (horizon + 999) / 1000 : 1;
  for (const TrialTrace& t : result.traces) {
    if (t.failed) continue;
    double cum = 0.0;
    const long n = static_cast<long>(t.inst_regret.size());
    for (long i = 1; i <= n; ++i) {
      const double r = t.inst_regret[static_cast<std::size_t>(i - 1)];
      cum += r;
      if (i % stride != 0 && i != n) continue;
      os << result.config.task << ',' << t.algorithm << ',' << t.trial << ',' << i << ','
         << fmt(r) << ',' << fmt(cum) << '\n';
    }
  }
}

void write_summary(const ExperimentResult& result, std::ostream& os) {
  json j;
  j["config"] = config_json(result.config);
  j["git_describe"] = git_describe();
  j["path_length"] = result.path_length;
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < result.config.trials; ++i) seeds.push_back(result.config.base_seed + i);
  j["seeds"] = {{"base_seed", result.config.base_seed}, {"trial_seeds", seeds}};
  json algos = json::array();
  for (const AlgorithmSummary& s : result.summaries) {
    json a;
    a["algorithm"] = s.algorithm;
    a["gamma"] = s.gamma;
    a["lambda"] = s.lambda;
    a["final_regret_mean"] = s.final_mean;
    a["final_regret_sd"] = s.final_sd;
    a["completed_trials"] = s.completed;
    a["solver_failures"] = s.failures;
    a["mean_seconds"] = s.mean_seconds;
    a["diagnostics"] = s.diagnostics;
    json errors = json::array();
    for (const TrialTrace& t : result.traces) {
      if (t.algorithm == s.algorithm && t.failed) errors.push_back({{"trial", t.trial}, {"error", t.error}});
    }
    a["failures"] = errors;
    algos.push_back(a);
  }
  j["algorithms"] = algos;
  os << j.dump(2) << '\n';
}

std::string write_outputs(const ExperimentResult& result) {
  namespace fs = std::filesystem;
  const fs::path dir(result.config.out);
  fs::create_directories(dir);
  const fs::path csv = dir / (result.config.task + ".csv");
  {
    std::ofstream os(csv, std::ios::binary);
    if (!os) throw ConfigError("cannot write " + csv.string());
    write_csv(result, os);
  }
  std::ofstream js(dir / (result.config.task + "_summary.json"), std::ios::binary);
  if (!js) throw ConfigError("cannot write summary in " + dir.string());
  write_summary(result, js);
  return csv.string();
}

// ---------------------------------------------------------------- sweep

LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidSizes("fit needs two or more points");
  const std::size_t n = x.size();
  std::vector<double> lx(n);
  std::vector<double> ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw InvalidSizes("log-log fit needs positive data");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0.0) throw InvalidSizes("log-log fit needs distinct x values");
  LogLogFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

SweepResult scaling_sweep(ExperimentConfig cfg, const std::vector<long>& T_list) {
  if (T_list.size() < 3) throw ConfigError("a sweep needs at least three horizons");
  cfg.gamma.reset();
  SweepResult out;
  std::vector<double> xs;
  for (long T : T_list) {
    if (cfg.is_mdp()) {
      cfg.K = T;
    } else {
      cfg.T = T;
    }
    const ExperimentResult r = run_experiment(cfg);
    out.T.push_back(T);
    out.mean_regret.push_back(r.summaries.front().final_mean);
    xs.push_back(static_cast<double>(T));
  }
  out.fit = fit_loglog(xs, out.mean_regret);
  return out;
}

std::string git_describe() { return DRIFTBANDIT_GIT_DESCRIBE; }

}  // namespace driftbandit
