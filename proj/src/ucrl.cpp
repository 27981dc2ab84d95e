#include "driftbandit/ucrl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "driftbandit/ball_projection.hpp"
#include "driftbandit/errors.hpp"

namespace driftbandit {

namespace {

constexpr int kNewtonMaxIter = 100;

void check_kind(const MixtureMDP& mdp, TransitionKind kind) {
  if (mdp.kind != kind) throw ConfigError("learner does not match the transition model");
}

std::vector<DiscountedDesign> stage_designs(int H, int d, double gamma, double lambda) {
  return std::vector<DiscountedDesign>(static_cast<std::size_t>(H), DiscountedDesign(d, gamma, lambda));
}

void check_trajectory(const MixtureMDP& mdp, const Trajectory& traj, const PlanTables& tables) {
  const auto H = static_cast<std::size_t>(mdp.H);
  if (traj.states.size() != H + 1 || traj.actions.size() != H || traj.rewards.size() != H ||
      tables.H != mdp.H || tables.num_states != mdp.num_states) {
    throw DimensionMismatch("trajectory or tables do not match the horizon");
  }
}

// Greedy V and policy at stage h once Q(h, ·, ·) is filled.
void finish_stage(PlanTables& t, int h) {
  for (int s = 0; s < t.num_states; ++s) {
    int best = 0;
    for (int a = 1; a < t.num_actions; ++a) {
      if (t.q(h, s, a) > t.q(h, s, best)) best = a;
    }
    t.policy[static_cast<std::size_t>((h - 1) * t.num_states + s)] = best;
    t.v(h, s) = t.q(h, s, best);
  }
}

std::vector<double> stage_values(const PlanTables& t, int h) {
  std::vector<double> v(static_cast<std::size_t>(t.num_states));
  for (int s = 0; s < t.num_states; ++s) v[static_cast<std::size_t>(s)] = t.v(h, s);
  return v;
}

// Weighted log-likelihood loss whose gradient is mnl_score − mnl_target.
double mnl_loss(const MixtureMDP& mdp, const MnlData& data, double lambda_w, const Vec& w) {
  double f = 0.5 * lambda_w * mdp.kappa * w.squaredNorm();
  for (std::size_t sa = 0; sa < data.weight.size(); ++sa) {
    if (data.sa_weight[sa] == 0.0) continue;
    const auto& feats = mdp.mnl_psi[sa];
    std::vector<double> z(feats.size());
    for (std::size_t i = 0; i < feats.size(); ++i) z[i] = feats[i].dot(w);
    const double mx = *std::max_element(z.begin(), z.end());
    double lse = 0.0;
    for (double v : z) lse += std::exp(v - mx);
    lse = mx + std::log(lse);
    for (std::size_t i = 0; i < feats.size(); ++i) f += data.weight[sa][i] * (lse - z[i]);
  }
  return f;
}

}  // namespace

void UcrlConfig::validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in (0, 1]");
  if (!(lambda_theta > 0.0) || !(lambda_w > 0.0)) throw ConfigError("lambda must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
}

UcrlConfig default_ucrl_config(const MixtureMDP& mdp, double gamma) {
  UcrlConfig cfg;
  cfg.gamma = gamma;
  cfg.lambda_theta = mdp.d;
  cfg.lambda_w = mdp.kind == TransitionKind::kLinearMixture
                     ? static_cast<double>(mdp.H) * mdp.H * mdp.d
                     : static_cast<double>(mdp.d);
  return cfg;
}

double mdp_auto_gamma(double total_variation, long K, int H) {
  const double T = static_cast<double>(K) * H;
  return 1.0 - std::max(1.0 / static_cast<double>(K), std::sqrt(total_variation / T));
}

PlanTables::PlanTables(int H_, int S, int A)
    : H(H_),
      num_states(S),
      num_actions(A),
      Q(static_cast<std::size_t>(H_ * S * A), 0.0),
      V(static_cast<std::size_t>((H_ + 1) * S), 0.0),
      policy(static_cast<std::size_t>(H_ * S), 0) {}

double lm_radius_w(double W, int H, double L_psi, int d, double lambda_w, double S_w,
                   double delta) {
  const double inner = 0.5 * std::log(1.0 / delta) +
                       0.25 * d * std::log1p(static_cast<double>(H) * H * L_psi * L_psi * W / (lambda_w * d));
  return H * std::sqrt(inner) + std::sqrt(lambda_w) * S_w;
}

double mnl_radius(double W, int U, double L_psi, int d, double lambda_w, double kappa,
                  double S_w, double delta) {
  const double inner = 0.5 * std::log(1.0 / delta) +
                       0.25 * d * std::log1p(U * L_psi * L_psi * W / (lambda_w * d));
  return std::sqrt(inner) + std::sqrt(lambda_w) * kappa * S_w;
}

void UcrlLearner::record_q(double q) {
  if (diag_.plans == 0 && diag_.q_min == 0.0 && diag_.q_max == 0.0) {
    diag_.q_min = diag_.q_max = q;
  }
  diag_.q_min = std::min(diag_.q_min, q);
  diag_.q_max = std::max(diag_.q_max, q);
}

// ---------------------------------------------------------------- linear mixture

WeightUcrl::WeightUcrl(const MixtureMDP& mdp, const UcrlConfig& cfg)
    : mdp_(mdp),
      cfg_(cfg),
      lambda_(stage_designs(mdp.H, mdp.d, cfg.gamma, cfg.lambda_theta)),
      sigma_(stage_designs(mdp.H, mdp.d, cfg.gamma, cfg.lambda_w)) {
  check_kind(mdp, TransitionKind::kLinearMixture);
  cfg_.validate();
}

Vec WeightUcrl::aggregate(int s, int a, const std::vector<double>& v_next) const {
  Vec out = Vec::Zero(mdp_.d);
  const auto base = static_cast<std::size_t>(mdp_.sa(s, a)) * mdp_.num_states;
  for (int sp = 0; sp < mdp_.num_states; ++sp) {
    out += v_next[static_cast<std::size_t>(sp)] * mdp_.psi[base + sp];
  }
  return out;
}

double WeightUcrl::beta_theta() const {
  return std::sqrt(cfg_.lambda_theta) * mdp_.S_theta;
}

double WeightUcrl::beta_w(int h) const {
  return lm_radius_w(transition_design(h).weight_sum(), mdp_.H, mdp_.L_psi, mdp_.d, cfg_.lambda_w,
                     mdp_.S_w, cfg_.delta);
}

PlanTables WeightUcrl::plan() {
  const int H = mdp_.H;
  PlanTables t(H, mdp_.num_states, mdp_.num_actions);
  const double bt = beta_theta();
  for (int h = H; h >= 1; --h) {
    const DiscountedDesign& rd = reward_design(h);
    const DiscountedDesign& td = transition_design(h);
    const Cholesky rf = rd.factor();
    const Cholesky tf = td.factor();
    const Vec theta_hat = rd.ridge_estimate();
    const Vec w_hat = td.ridge_estimate();
    const double bw = beta_w(h);
    const std::vector<double> v_next = stage_values(t, h + 1);
    for (int s = 0; s < mdp_.num_states; ++s) {
      for (int a = 0; a < mdp_.num_actions; ++a) {
        const Vec& phi = mdp_.phi[static_cast<std::size_t>(mdp_.sa(s, a))];
        const Vec agg = aggregate(s, a, v_next);
        const double raw = phi.dot(theta_hat) + bt * rf.quad_norm(phi) + agg.dot(w_hat) +
                           bw * tf.quad_norm(agg);
        const double q = std::clamp(raw, 0.0, static_cast<double>(H));
        t.q(h, s, a) = q;
        record_q(q);
      }
    }
    finish_stage(t, h);
  }
  ++diag_.plans;
  return t;
}

void WeightUcrl::absorb(const Trajectory& traj, const PlanTables& tables) {
  check_trajectory(mdp_, traj, tables);
  for (int h = 1; h <= mdp_.H; ++h) {
    const auto i = static_cast<std::size_t>(h - 1);
    const int s = traj.states[i];
    const int a = traj.actions[i];
    lambda_[i].update(mdp_.phi[static_cast<std::size_t>(mdp_.sa(s, a))], traj.rewards[i]);
    const std::vector<double> v_next = stage_values(tables, h + 1);
    sigma_[i].update(aggregate(s, a, v_next), v_next[static_cast<std::size_t>(traj.states[i + 1])]);
  }
}

// ---------------------------------------------------------------- MNL

MnlData::MnlData(const MixtureMDP& mdp) : sa_weight(mdp.mnl_psi.size(), 0.0) {
  for (const auto& feats : mdp.mnl_psi) weight.emplace_back(feats.size(), 0.0);
}

void MnlData::add(double gamma, int sa, int outcome) {
  if (gamma != 1.0) {
    for (auto& row : weight) {
      for (double& v : row) v *= gamma;
    }
    for (double& v : sa_weight) v *= gamma;
    total *= gamma;
  }
  weight[static_cast<std::size_t>(sa)][static_cast<std::size_t>(outcome)] += 1.0;
  sa_weight[static_cast<std::size_t>(sa)] += 1.0;
  total += 1.0;
}

Vec mnl_score(const MixtureMDP& mdp, const MnlData& data, double lambda_w, const Vec& w) {
  Vec g = lambda_w * mdp.kappa * w;
  for (std::size_t sa = 0; sa < data.sa_weight.size(); ++sa) {
    const double n = data.sa_weight[sa];
    if (n == 0.0) continue;
    const auto& feats = mdp.mnl_psi[sa];
    const std::vector<double> p = mnl_probs(feats, w);
    for (std::size_t i = 0; i < feats.size(); ++i) g += n * p[i] * feats[i];
  }
  return g;
}

Vec mnl_target(const MixtureMDP& mdp, const MnlData& data) {
  Vec out = Vec::Zero(mdp.d);
  for (std::size_t sa = 0; sa < data.weight.size(); ++sa) {
    for (std::size_t i = 0; i < data.weight[sa].size(); ++i) {
      out += data.weight[sa][i] * mdp.mnl_psi[sa][i];
    }
  }
  return out;
}

Mat mnl_jacobian(const MixtureMDP& mdp, const MnlData& data, double lambda_w, const Vec& w) {
  Mat J = lambda_w * mdp.kappa * Mat::Identity(mdp.d, mdp.d);
  for (std::size_t sa = 0; sa < data.sa_weight.size(); ++sa) {
    const double n = data.sa_weight[sa];
    if (n == 0.0) continue;
    const auto& feats = mdp.mnl_psi[sa];
    const std::vector<double> p = mnl_probs(feats, w);
    Vec mean = Vec::Zero(mdp.d);
    Mat second = Mat::Zero(mdp.d, mdp.d);
    for (std::size_t i = 0; i < feats.size(); ++i) {
      mean += p[i] * feats[i];
      second.noalias() += p[i] * feats[i] * feats[i].transpose();
    }
    J.noalias() += n * (second - mean * mean.transpose());
  }
  return 0.5 * (J + J.transpose());
}

MnlSolve mnl_mle_solve(const MixtureMDP& mdp, const MnlData& data, double lambda_w,
                       const Vec& init) {
  if (!(mdp.kappa > 0.0)) throw ConfigError("kappa must be positive");
  MnlSolve out;
  out.w = Vec::Zero(mdp.d);
  if (data.total == 0.0) return out;
  const double scale = 1.0 + data.total;
  const Vec target = mnl_target(mdp, data);
  Vec w = init;
  for (int it = 0; it < kNewtonMaxIter; ++it) {
    const Vec grad = mnl_score(mdp, data, lambda_w, w) - target;
    out.iterations = it;
    if (grad.cwiseAbs().maxCoeff() <= 1e-13 * scale) break;
    const Vec step = Cholesky(mnl_jacobian(mdp, data, lambda_w, w)).solve(-grad);
    const double f0 = mnl_loss(mdp, data, lambda_w, w);
    const double slope = grad.dot(step);
    double t = 1.0;
    while (t > 1e-12 && mnl_loss(mdp, data, lambda_w, w + t * step) >
                            f0 + 1e-4 * t * slope + 1e-14 * (1.0 + std::abs(f0))) {
      t *= 0.5;
    }
    w += t * step;
    if (t * step.norm() <= 1e-15 * (1.0 + w.norm())) break;
  }
  out.w = w;
  out.residual = (mnl_score(mdp, data, lambda_w, w) - target).norm();
  if (!(out.residual <= 1e-9 * scale)) {
    throw NoConvergence("MNL score residual " + std::to_string(out.residual));
  }
  return out;
}

Vec mnl_project(const MixtureMDP& mdp, const MnlData& data, double lambda_w, const Vec& w_hat,
                const Cholesky& sigma_bar) {
  const double S = mdp.S_w;
  if (w_hat.norm() <= S) return w_hat;
  const Vec target = mnl_score(mdp, data, lambda_w, w_hat);
  auto g = [&](const Vec& w) { return mnl_score(mdp, data, lambda_w, w); };
  auto J = [&](const Vec& w) { return mnl_jacobian(mdp, data, lambda_w, w); };
  return project_to_ball(target, g, J, sigma_bar, S, w_hat * (S / w_hat.norm())).theta;
}

MnlWeightUcrl::MnlWeightUcrl(const MixtureMDP& mdp, const UcrlConfig& cfg)
    : mdp_(mdp),
      cfg_(cfg),
      lambda_(stage_designs(mdp.H, mdp.d, cfg.gamma, cfg.lambda_theta)),
      sigma_(stage_designs(mdp.H, mdp.d, cfg.gamma, cfg.lambda_w)),
      data_(static_cast<std::size_t>(mdp.H), MnlData(mdp)),
      w_hat_(static_cast<std::size_t>(mdp.H), Vec::Zero(mdp.d)),
      w_tilde_(static_cast<std::size_t>(mdp.H), Vec::Zero(mdp.d)) {
  check_kind(mdp, TransitionKind::kMnl);
  cfg_.validate();
  if (!(mdp.kappa > 0.0 && mdp.kappa < 1.0)) throw ConfigError("kappa must lie in (0, 1)");
}

double MnlWeightUcrl::beta_theta() const {
  return std::sqrt(cfg_.lambda_theta) * mdp_.S_theta;
}

double MnlWeightUcrl::beta_w(int h) const {
  return mnl_radius(data(h).total, mdp_.U, mdp_.L_psi, mdp_.d, cfg_.lambda_w, mdp_.kappa, mdp_.S_w,
                    cfg_.delta);
}

PlanTables MnlWeightUcrl::plan() {
  const int H = mdp_.H;
  PlanTables t(H, mdp_.num_states, mdp_.num_actions);
  const double bt = beta_theta();
  for (int h = H; h >= 1; --h) {
    const auto i = static_cast<std::size_t>(h - 1);
    const MnlSolve sol = mnl_mle_solve(mdp_, data_[i], cfg_.lambda_w, w_hat_[i]);
    diag_.max_residual = std::max(diag_.max_residual, sol.residual / (1.0 + data_[i].total));
    w_hat_[i] = sol.w;
    const Cholesky sf = sigma_[i].factor();
    w_tilde_[i] = mnl_project(mdp_, data_[i], cfg_.lambda_w, sol.w, sf);
    const Cholesky rf = lambda_[i].factor();
    const Vec theta_hat = lambda_[i].ridge_estimate();
    const double bonus_scale = H / mdp_.kappa * beta_w(h);
    for (int s = 0; s < mdp_.num_states; ++s) {
      for (int a = 0; a < mdp_.num_actions; ++a) {
        const auto sa = static_cast<std::size_t>(mdp_.sa(s, a));
        const Vec& phi = mdp_.phi[sa];
        const auto& feats = mdp_.mnl_psi[sa];
        const std::vector<double> p = mnl_probs(feats, w_tilde_[i]);
        double ev = 0.0;
        double psum = 0.0;
        double max_norm = 0.0;
        for (std::size_t j = 0; j < feats.size(); ++j) {
          ev += p[j] * t.v(h + 1, mdp_.reachable[sa][j]);
          psum += p[j];
          max_norm = std::max(max_norm, sf.quad_norm(feats[j]));
        }
        diag_.max_prob_error = std::max(diag_.max_prob_error, std::abs(psum - 1.0));
        const double raw = phi.dot(theta_hat) + bt * rf.quad_norm(phi) + ev + bonus_scale * max_norm;
        const double q = std::clamp(raw, 0.0, static_cast<double>(H));
        t.q(h, s, a) = q;
        record_q(q);
      }
    }
    finish_stage(t, h);
  }
  ++diag_.plans;
  return t;
}

void MnlWeightUcrl::absorb(const Trajectory& traj, const PlanTables& tables) {
  check_trajectory(mdp_, traj, tables);
  for (int h = 1; h <= mdp_.H; ++h) {
    const auto i = static_cast<std::size_t>(h - 1);
    const int s = traj.states[i];
    const int a = traj.actions[i];
    const auto sa = static_cast<std::size_t>(mdp_.sa(s, a));
    lambda_[i].update(mdp_.phi[sa], traj.rewards[i]);
    const auto& reach = mdp_.reachable[sa];
    const auto it = std::find(reach.begin(), reach.end(), traj.states[i + 1]);
    if (it == reach.end()) throw DimensionMismatch("next state is not reachable");
    sigma_[i].update_many(mdp_.mnl_psi[sa]);
    data_[i].add(cfg_.gamma, static_cast<int>(sa), static_cast<int>(it - reach.begin()));
  }
}

// ---------------------------------------------------------------- runner

std::unique_ptr<UcrlLearner> make_ucrl_learner(const MixtureMDP& mdp, const UcrlConfig& cfg) {
  if (mdp.kind == TransitionKind::kLinearMixture) return std::make_unique<WeightUcrl>(mdp, cfg);
  return std::make_unique<MnlWeightUcrl>(mdp, cfg);
}

Trajectory rollout(const MixtureMDP& mdp, long k, const Policy& policy, Rng& rng) {
  Trajectory traj;
  int s = mdp.initial_state;
  traj.states.push_back(s);
  for (int h = 1; h <= mdp.H; ++h) {
    const int a = policy[static_cast<std::size_t>((h - 1) * mdp.num_states + s)];
    traj.actions.push_back(a);
    traj.rewards.push_back(mdp.reward(k, h, s, a));
    const std::vector<double> p = mdp.transition(k, h, s, a);
    const double u = rng.uniform();
    double acc = 0.0;
    int next = -1;
    int last_positive = 0;
    for (int sp = 0; sp < mdp.num_states; ++sp) {
      const double ps = p[static_cast<std::size_t>(sp)];
      if (ps > 0.0) last_positive = sp;
      acc += ps;
      if (u < acc) {
        next = sp;
        break;
      }
    }
    s = next < 0 ? last_positive : next;
    traj.states.push_back(s);
  }
  return traj;
}

UcrlRun run_ucrl(const MixtureMDP& mdp, const UcrlConfig& cfg, std::uint64_t seed) {
  auto learner = make_ucrl_learner(mdp, cfg);
  Rng noise(seed, Stream::kNoise);
  UcrlRun out;
  out.regret.reserve(static_cast<std::size_t>(mdp.K));
  for (long k = 1; k <= mdp.K; ++k) {
    const PlanTables tables = learner->plan();
    const double best = dp_oracle(mdp, k).value;
    const double mine = policy_eval(mdp, k, tables.policy);
    out.regret.push_back(best - mine);
    const Trajectory traj = rollout(mdp, k, tables.policy, noise);
    learner->absorb(traj, tables);
  }
  out.diagnostics = learner->diagnostics();
  return out;
}

}  // namespace driftbandit
