// Acceptance suite. Each criterion runs at its stated tolerance and prints
// one PASS/FAIL line; the process exit code reflects the verdict.
//
//   acceptance --criterion N     (N = 1..10)
//   acceptance --all

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "driftbandit/bandit_glb.hpp"
#include "driftbandit/errors.hpp"
#include "driftbandit/harness.hpp"
#include "driftbandit/link_model.hpp"
#include "driftbandit/mdp.hpp"
#include "driftbandit/oracles.hpp"
#include "driftbandit/rng.hpp"
#include "driftbandit/ucrl.hpp"
#include "driftbandit/weighted_design.hpp"

using namespace driftbandit;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string f(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", prec, v);
  return buf;
}

bool within_budget(double secs, double budget, std::string& detail) {
  detail += " time=" + f(secs, 3) + "s/" + f(budget, 3) + "s";
  return secs < budget;
}

// 1. Recursive design vs batch weighted ridge.
Verdict criterion1() {
  const auto start = Clock::now();
  const oracles::SuiteReport r = oracles::estimator_equivalence_suite(101, 100, 1e-8);
  Verdict v;
  v.detail = "cases=" + std::to_string(r.cases) + " violations=" + std::to_string(r.violations) +
             " max_inf_err=" + f(r.worst);
  v.pass = r.cases == 100 && r.violations == 0;
  v.pass = within_budget(seconds_since(start), 5.0, v.detail) && v.pass;
  return v;
}

// 2. Potential, trace and determinant bounds.
Verdict criterion2() {
  const auto start = Clock::now();
  const oracles::SuiteReport p = oracles::potential_suite(201, 200);
  const oracles::SuiteReport t = oracles::trace_suite(202, 200);
  const oracles::SuiteReport d = oracles::determinant_suite(203, 200);
  Verdict v;
  v.detail = "potential " + std::to_string(p.violations) + "/" + std::to_string(p.cases) +
             " (worst ratio " + f(p.worst) + "), trace " + std::to_string(t.violations) + "/" +
             std::to_string(t.cases) + " (worst " + f(t.worst) + "), determinant " +
             std::to_string(d.violations) + "/" + std::to_string(d.cases);
  v.pass = p.cases == 200 && t.cases == 200 && d.cases == 200 && p.violations == 0 &&
           t.violations == 0 && d.violations == 0;
  v.pass = within_budget(seconds_since(start), 10.0, v.detail) && v.pass;
  return v;
}

// 3. Coverage of the drifting-model confidence bound.
Verdict criterion3() {
  const auto start = Clock::now();
  const oracles::CoverageReport r = oracles::estimation_coverage(301, 500, 10, 1000, 0.05);
  Verdict v;
  v.detail = "covered " + std::to_string(r.covered) + "/" + std::to_string(r.runs) +
             " rate=" + f(r.rate()) + " (need >= 0.93)";
  v.pass = r.runs >= 500 && r.rate() >= 0.93;
  v.pass = within_budget(seconds_since(start), 60.0, v.detail) && v.pass;
  return v;
}

// 4. Identity link reduces to ridge; logistic score residuals stay tiny.
Verdict criterion4() {
  const auto start = Clock::now();
  Rng rng(401, Stream::kTest);
  const double gammas[] = {0.5, 0.9, 0.99, 1.0};
  const int dims[] = {1, 2, 5};
  double worst_identity = 0.0;
  double worst_residual = 0.0;
  int solves = 0;
  for (int c = 0; c < 100; ++c) {
    const int d = dims[c % 3];
    const double gamma = gammas[c % 4];
    const double lambda = 0.5 + 3.5 * rng.uniform();
    const long T = 1 + static_cast<long>(rng.below(200));
    for (LinkKind kind : {LinkKind::kIdentity, LinkKind::kLogistic}) {
      GlbConfig cfg;
      cfg.link = LinkModel::make(kind, 1.0, 1.0);
      cfg.radius = RadiusParams{1.0, 1.0, 1.0, 0.05, d};
      cfg.gamma = gamma;
      cfg.lambda = lambda;
      GlbLearner learner(cfg);
      DiscountedDesign ridge(d, gamma, lambda);
      Vec theta(d);
      for (int i = 0; i < d; ++i) theta(i) = rng.normal();
      theta /= std::max(1.0, theta.norm());
      for (long t = 1; t <= T; ++t) {
        Vec x(d);
        for (int i = 0; i < d; ++i) x(i) = rng.normal();
        x /= std::max(1.0, x.norm());
        const double r = kind == LinkKind::kIdentity
                             ? x.dot(theta) + rng.normal()
                             : (rng.bernoulli(sigmoid(x.dot(theta))) ? 1.0 : 0.0);
        learner.observe(x, r);
        ridge.update(x, r);
      }
      const Vec th = learner.solve_score_equation();
      ++solves;
      if (kind == LinkKind::kIdentity) {
        worst_identity = std::max(worst_identity, (th - ridge.ridge_estimate()).cwiseAbs().maxCoeff());
      } else {
        worst_residual = std::max(worst_residual, learner.score_residual(th));
      }
    }
  }
  Verdict v;
  v.detail = "solves=" + std::to_string(solves) + " identity_max_err=" + f(worst_identity) +
             " logistic_max_residual=" + f(worst_residual);
  v.pass = worst_identity <= 1e-8 && worst_residual <= 1e-9;
  v.pass = within_budget(seconds_since(start), 10.0, v.detail) && v.pass;
  return v;
}

ExperimentConfig lb_config() {
  ExperimentConfig c;
  c.task = "lb";
  c.T = 6000;
  c.d = 2;
  c.n_arms = 50;
  c.S = 1.0;
  c.L = 1.0;
  c.trials = 20;
  c.base_seed = 2024;
  return c;
}

// 5. Discounted LB beats the static baseline by more than one pooled sd.
Verdict criterion5() {
  const auto start = Clock::now();
  ExperimentConfig c = lb_config();
  c.algorithms = {"weight", "static"};
  const ExperimentResult r = run_experiment(c);
  const AlgorithmSummary& w = r.summary("weight");
  const AlgorithmSummary& s = r.summary("static");
  const double pooled = std::sqrt(0.5 * (w.final_sd * w.final_sd + s.final_sd * s.final_sd));
  Verdict v;
  v.detail = "weight " + f(w.final_mean) + "+-" + f(w.final_sd) + " (gamma " + f(w.gamma, 6) +
             "), static " + f(s.final_mean) + "+-" + f(s.final_sd) + ", gap " +
             f(s.final_mean - w.final_mean) + " vs pooled sd " + f(pooled);
  v.pass = w.failures == 0 && s.failures == 0 && w.final_mean < s.final_mean &&
           s.final_mean - w.final_mean > pooled;
  v.pass = within_budget(seconds_since(start), 120.0, v.detail) && v.pass;
  return v;
}

// 6. c_μ anchors and SCB beating GLB at S = 5.
Verdict criterion6() {
  const auto start = Clock::now();
  const double inv1 = 1.0 / compute_c_mu(LinkKind::kLogistic, 1.0, 1.0);
  const double inv5 = 1.0 / compute_c_mu(LinkKind::kLogistic, 5.0, 1.0);
  const bool anchors = std::abs(inv1 - 5.0) <= 0.5 && std::abs(inv5 - 152.0) <= 15.2;
  ExperimentConfig c = lb_config();
  c.task = "glb";
  c.S = 5.0;
  c.algorithms = {"glb_weight", "scb_weight"};
  const ExperimentResult r = run_experiment(c);
  const AlgorithmSummary& g = r.summary("glb_weight");
  const AlgorithmSummary& s = r.summary("scb_weight");
  Verdict v;
  v.detail = "1/c_mu(S=1)=" + f(inv1) + " 1/c_mu(S=5)=" + f(inv5) + "; scb " + f(s.final_mean) +
             "+-" + f(s.final_sd) + " (gamma " + f(s.gamma, 6) + "), glb " + f(g.final_mean) +
             "+-" + f(g.final_sd) + " (gamma " + f(g.gamma, 6) + "), failures " +
             std::to_string(g.failures + s.failures);
  v.pass = anchors && g.failures == 0 && s.failures == 0 && s.final_mean < g.final_mean;
  v.pass = within_budget(seconds_since(start), 300.0, v.detail) && v.pass;
  return v;
}

// 7. Regret growth exponent of the discounted LB learner.
Verdict criterion7() {
  const auto start = Clock::now();
  ExperimentConfig c = lb_config();
  c.algorithms = {"weight"};
  const SweepResult s = scaling_sweep(c, {1000, 2000, 4000, 8000});
  Verdict v;
  v.detail = "means";
  for (std::size_t i = 0; i < s.T.size(); ++i) {
    v.detail += " T=" + std::to_string(s.T[i]) + ":" + f(s.mean_regret[i]);
  }
  v.detail += "; slope=" + f(s.fit.slope) + " r2=" + f(s.fit.r2) + " (need [0.6, 0.9])";
  v.pass = s.fit.slope >= 0.6 && s.fit.slope <= 0.9;
  v.pass = within_budget(seconds_since(start), 600.0, v.detail) && v.pass;
  return v;
}

// 8. BOB against the best fixed candidate discount.
Verdict criterion8() {
  const auto start = Clock::now();
  ExperimentConfig c = lb_config();
  c.task = "bob";
  const ExperimentResult r = run_experiment(c);
  const AlgorithmSummary& bob = r.summary("bob");
  const AlgorithmSummary* best = nullptr;
  for (const AlgorithmSummary& s : r.summaries) {
    if (s.algorithm == "bob") continue;
    if (!best || s.final_mean < best->final_mean) best = &s;
  }
  Verdict v;
  v.detail = "bob " + f(bob.final_mean) + "+-" + f(bob.final_sd) + ", best fixed " +
             best->algorithm + " (gamma " + f(best->gamma, 6) + ") " + f(best->final_mean) +
             ", ratio " + f(bob.final_mean / best->final_mean) + " (need <= 3)";
  v.pass = bob.failures == 0 && bob.final_mean <= 3.0 * best->final_mean;
  v.pass = within_budget(seconds_since(start), 300.0, v.detail) && v.pass;
  return v;
}

double quartile_ratio(const ExperimentResult& r, const std::string& algo) {
  const long K = r.config.K;
  const long q = K / 4;
  double first = 0.0;
  double last = 0.0;
  int n = 0;
  for (const TrialTrace& t : r.traces) {
    if (t.algorithm != algo || t.failed) continue;
    ++n;
    for (long k = 0; k < q; ++k) first += t.inst_regret[static_cast<std::size_t>(k)];
    for (long k = K - q; k < K; ++k) last += t.inst_regret[static_cast<std::size_t>(k)];
  }
  return n == 0 || first <= 0.0 ? INFINITY : last / first;
}

// 9. MDP suite on the desk instance.
Verdict criterion9() {
  const auto start = Clock::now();
  Verdict v;
  bool pass = true;

  // (a) MNL normalization over every evaluated row of the instance.
  DeskSizes sizes;
  const MixtureMDP mnl = build_desk_instance(TransitionKind::kMnl, 2024, sizes, 1.0);
  double norm_err = 0.0;
  for (long k = 1; k <= mnl.K; ++k) {
    for (int h = 1; h <= mnl.H; ++h) {
      for (int s = 0; s < mnl.num_states; ++s) {
        for (int a = 0; a < mnl.num_actions; ++a) {
          const std::vector<double> p = mnl.transition(k, h, s, a);
          norm_err = std::max(norm_err, std::abs(std::accumulate(p.begin(), p.end(), 0.0) - 1.0));
        }
      }
    }
  }

  double q_lo = INFINITY;
  double q_hi = -INFINITY;
  double learner_norm_err = 0.0;
  auto track = [&](const ExperimentResult& r) {
    for (const AlgorithmSummary& s : r.summaries) {
      q_lo = std::min(q_lo, s.diagnostics.at("q_min"));
      q_hi = std::max(q_hi, s.diagnostics.at("q_max"));
      if (s.diagnostics.count("max_prob_error")) {
        learner_norm_err = std::max(learner_norm_err, s.diagnostics.at("max_prob_error"));
      }
      if (s.failures > 0) pass = false;
    }
  };

  std::string part_c;
  std::string part_d;
  bool c_ok = true;
  bool d_ok = true;
  for (const char* task : {"mdp_lm", "mdp_mnl"}) {
    ExperimentConfig c;
    c.task = task;
    c.K = 400;
    c.H = 5;
    c.num_states = 5;
    c.num_actions = 3;
    c.mdp_d = 4;
    c.trials = 20;
    c.base_seed = 2024;

    // (c) stationary instance, γ = 1.
    c.drift = 0.0;
    c.algorithms = {"static"};
    const ExperimentResult stat = run_experiment(c);
    track(stat);
    const double ratio = quartile_ratio(stat, "static");
    c_ok = c_ok && ratio <= 0.5;
    part_c += std::string(" ") + task + "=" + f(ratio);

    // (d) drifting instance, auto γ against γ = 1.
    c.drift = 1.0;
    c.algorithms = {"weight", "static"};
    const ExperimentResult drift = run_experiment(c);
    track(drift);
    const AlgorithmSummary& w = drift.summary("weight");
    const AlgorithmSummary& s = drift.summary("static");
    d_ok = d_ok && w.final_mean < s.final_mean;
    part_d += std::string(" ") + task + " weight " + f(w.final_mean) + " (gamma " +
              f(w.gamma, 5) + ") vs static " + f(s.final_mean) + ";";
  }
  const bool a_ok = norm_err <= 1e-12 && learner_norm_err <= 1e-12;
  const bool b_ok = q_lo >= 0.0 && q_hi <= 5.0;
  v.detail = std::string("(a) ") + (a_ok ? "ok" : "FAIL") + " instance_err=" + f(norm_err) +
             " learner_err=" + f(learner_norm_err) + "; (b) " + (b_ok ? "ok" : "FAIL") +
             " Q in [" + f(q_lo) + ", " + f(q_hi) + "]; (c) " + (c_ok ? "ok" : "FAIL") +
             " last/first quartile" + part_c + " (need <= 0.5); (d) " + (d_ok ? "ok" : "FAIL") +
             part_d;
  v.pass = pass && a_ok && b_ok && c_ok && d_ok;
  v.pass = within_budget(seconds_since(start), 600.0, v.detail) && v.pass;
  return v;
}

std::string csv_of(const ExperimentConfig& c) {
  std::ostringstream os;
  write_csv(run_experiment(c), os);
  return os.str();
}

// 10. Byte-identical CSV on re-runs, independent of the thread count.
Verdict criterion10() {
  const auto start = Clock::now();
  std::vector<ExperimentConfig> configs;
  ExperimentConfig lb = lb_config();
  lb.T = 2000;
  lb.trials = 4;
  lb.algorithms = {"weight", "static", "restart"};
  configs.push_back(lb);
  ExperimentConfig glb = lb;
  glb.task = "scb";
  glb.T = 500;
  glb.algorithms = {"glb_weight", "scb_weight"};
  configs.push_back(glb);
  ExperimentConfig pw = glb;
  pw.task = "scb_pw";
  pw.T = 300;
  pw.trials = 2;
  pw.changes = 2;
  pw.algorithms = {"scbpw_weight"};
  configs.push_back(pw);
  ExperimentConfig bob = lb;
  bob.task = "bob";
  bob.algorithms = {};
  configs.push_back(bob);
  for (const char* task : {"mdp_lm", "mdp_mnl"}) {
    ExperimentConfig m;
    m.task = task;
    m.K = 60;
    m.trials = 3;
    configs.push_back(m);
  }
  int identical = 0;
  std::string bad;
  for (ExperimentConfig c : configs) {
    c.threads = 1;
    const std::string a = csv_of(c);
    c.threads = 4;
    const std::string b = csv_of(c);
    const std::string again = csv_of(c);
    if (a == b && b == again && !a.empty()) {
      ++identical;
    } else {
      bad += " " + c.task;
    }
  }
  Verdict v;
  v.detail = std::to_string(identical) + "/" + std::to_string(configs.size()) +
             " configs byte-identical across 3 runs" + (bad.empty() ? "" : "; differing:" + bad);
  v.pass = identical == static_cast<int>(configs.size());
  v.detail += " time=" + f(seconds_since(start), 3) + "s";
  return v;
}

const std::vector<std::pair<const char*, std::function<Verdict()>>>& criteria() {
  static const std::vector<std::pair<const char*, std::function<Verdict()>>> list = {
      {"estimator equivalence", criterion1},
      {"design inequality oracles", criterion2},
      {"drifting confidence coverage", criterion3},
      {"GLB reduction and residuals", criterion4},
      {"LB experiment ordering", criterion5},
      {"SCB vs GLB at S=5", criterion6},
      {"regret scaling exponent", criterion7},
      {"BOB vs best fixed discount", criterion8},
      {"MDP suite", criterion9},
      {"determinism", criterion10},
  };
  return list;
}

int run_one(int n) {
  const auto& [name, fn] = criteria()[static_cast<std::size_t>(n - 1)];
  Verdict v;
  try {
    v = fn();
  } catch (const std::exception& e) {
    v.pass = false;
    v.detail = std::string("exception: ") + e.what();
  }
  std::printf("CRITERION %d %s: %s | %s\n", n, v.pass ? "PASS" : "FAIL", name, v.detail.c_str());
  std::fflush(stdout);
  return v.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string usage = "usage: acceptance --criterion N | --all\n";
  if (argc == 2 && std::string(argv[1]) == "--all") {
    int failed = 0;
    for (int n = 1; n <= static_cast<int>(criteria().size()); ++n) failed += run_one(n);
    return failed == 0 ? 0 : 1;
  }
  if (argc == 3 && std::string(argv[1]) == "--criterion") {
    const int n = std::atoi(argv[2]);
    if (n >= 1 && n <= static_cast<int>(criteria().size())) return run_one(n);
  }
  std::fputs(usage.c_str(), stderr);
  return 2;
}
