#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "driftbandit/mdp.hpp"
#include "driftbandit/rng.hpp"
#include "driftbandit/weighted_design.hpp"

namespace driftbandit {

struct UcrlConfig {
  double gamma = 1.0;
  double lambda_theta = 1.0;
  double lambda_w = 1.0;
  double delta = 0.05;

  void validate() const;
};

/// λ_θ = d and λ_w = H²d (linear mixture) or d (MNL).
UcrlConfig default_ucrl_config(const MixtureMDP& mdp, double gamma);

/// γ = 1 − max{1/K, √(Δ/(KH))}.
double mdp_auto_gamma(double total_variation, long K, int H);

struct Trajectory {
  std::vector<int> states;   ///< s_1..s_{H+1}
  std::vector<int> actions;  ///< a_1..a_H
  std::vector<double> rewards;
};

/// Optimistic tables of one episode. V has H+1 stages; stage H+1 is zero.
struct PlanTables {
  int H = 0;
  int num_states = 0;
  int num_actions = 0;
  std::vector<double> Q;  ///< [((h-1)·S + s)·A + a]
  std::vector<double> V;  ///< [(h-1)·S + s], h = 1..H+1
  Policy policy;          ///< [(h-1)·S + s]

  PlanTables(int H, int S, int A);
  double& q(int h, int s, int a) { return Q[static_cast<std::size_t>(((h - 1) * num_states + s) * num_actions + a)]; }
  double q(int h, int s, int a) const { return Q[static_cast<std::size_t>(((h - 1) * num_states + s) * num_actions + a)]; }
  double& v(int h, int s) { return V[static_cast<std::size_t>((h - 1) * num_states + s)]; }
  double v(int h, int s) const { return V[static_cast<std::size_t>((h - 1) * num_states + s)]; }
  int action(int h, int s) const { return policy[static_cast<std::size_t>((h - 1) * num_states + s)]; }
};

struct UcrlDiagnostics {
  double q_min = 0.0;
  double q_max = 0.0;
  double max_prob_error = 0.0;  ///< MNL: max |Σp − 1| over evaluated rows
  double max_residual = 0.0;    ///< MNL: largest MLE score residual
  long plans = 0;
};

/// H·√(½log(1/δ) + (d/4)·log(1 + H²L_ψ²W/(λ_w d))) + √λ_w·S_w.
double lm_radius_w(double W, int H, double L_psi, int d, double lambda_w, double S_w,
                   double delta);

/// √(½log(1/δ) + (d/4)·log(1 + U·L_ψ²·W/(λ_w d))) + √λ_w·κ·S_w.
double mnl_radius(double W, int U, double L_psi, int d, double lambda_w, double kappa,
                  double S_w, double delta);

/// Base class of both weighted UCRL learners. `plan` uses data through the
/// previous episode; `absorb` adds the episode that was just played.
class UcrlLearner {
 public:
  virtual ~UcrlLearner() = default;
  virtual PlanTables plan() = 0;
  virtual void absorb(const Trajectory& traj, const PlanTables& tables) = 0;
  const UcrlDiagnostics& diagnostics() const { return diag_; }

 protected:
  void record_q(double q);
  UcrlDiagnostics diag_;
};

/// Linear mixture learner with per-stage discounted designs.
class WeightUcrl : public UcrlLearner {
 public:
  WeightUcrl(const MixtureMDP& mdp, const UcrlConfig& cfg);

  PlanTables plan() override;
  void absorb(const Trajectory& traj, const PlanTables& tables) override;

  /// ψ_V(s,a) = Σ_{s′} ψ(s′|s,a)·V(s′) with V given on all states.
  Vec aggregate(int s, int a, const std::vector<double>& v_next) const;
  const DiscountedDesign& reward_design(int h) const { return lambda_[static_cast<std::size_t>(h - 1)]; }
  const DiscountedDesign& transition_design(int h) const { return sigma_[static_cast<std::size_t>(h - 1)]; }
  double beta_theta() const;
  double beta_w(int h) const;

 private:
  const MixtureMDP& mdp_;
  UcrlConfig cfg_;
  std::vector<DiscountedDesign> lambda_;
  std::vector<DiscountedDesign> sigma_;
};

/// Discounted multinomial data of one stage, aggregated by (s, a, outcome).
/// Each episode multiplies every weight by γ before adding the new record,
/// which equals Σ_j γ^{k−1−j} over stored records.
struct MnlData {
  std::vector<std::vector<double>> weight;  ///< [sa][reachable index]
  std::vector<double> sa_weight;            ///< Σ over outcomes
  double total = 0.0;                       ///< Σ_j α_j

  MnlData() = default;
  explicit MnlData(const MixtureMDP& mdp);
  void add(double gamma, int sa, int outcome);
};

/// λκw + Σ_sa n_sa Σ_{s′} p(s′)ψ(s′).
Vec mnl_score(const MixtureMDP& mdp, const MnlData& data, double lambda_w, const Vec& w);
/// Σ_sa Σ_o c_{sa,o} ψ_o: the score target.
Vec mnl_target(const MixtureMDP& mdp, const MnlData& data);
/// λκI + Σ_sa n_sa (Σpψψᵀ − (Σpψ)(Σpψ)ᵀ).
Mat mnl_jacobian(const MixtureMDP& mdp, const MnlData& data, double lambda_w, const Vec& w);

struct MnlSolve {
  Vec w;
  double residual = 0.0;
  int iterations = 0;
};

/// Regularized weighted maximum likelihood by damped Newton.
/// Throws NoConvergence when the score residual stays above 1e-9·(1 + W).
MnlSolve mnl_mle_solve(const MixtureMDP& mdp, const MnlData& data, double lambda_w,
                       const Vec& init);

/// argmin_{‖w‖≤S_w} ‖g(ŵ) − g(w)‖_{Σ̄⁻¹}; identity when ŵ is feasible.
Vec mnl_project(const MixtureMDP& mdp, const MnlData& data, double lambda_w, const Vec& w_hat,
                const Cholesky& sigma_bar);

/// MNL learner: per-stage reward designs, Σ̄ designs and multinomial data.
class MnlWeightUcrl : public UcrlLearner {
 public:
  MnlWeightUcrl(const MixtureMDP& mdp, const UcrlConfig& cfg);

  PlanTables plan() override;
  void absorb(const Trajectory& traj, const PlanTables& tables) override;

  const DiscountedDesign& reward_design(int h) const { return lambda_[static_cast<std::size_t>(h - 1)]; }
  const DiscountedDesign& sigma_bar(int h) const { return sigma_[static_cast<std::size_t>(h - 1)]; }
  const MnlData& data(int h) const { return data_[static_cast<std::size_t>(h - 1)]; }
  /// Projected estimate used by the last plan.
  const Vec& w_tilde(int h) const { return w_tilde_[static_cast<std::size_t>(h - 1)]; }
  double beta_theta() const;
  double beta_w(int h) const;

 private:
  const MixtureMDP& mdp_;
  UcrlConfig cfg_;
  std::vector<DiscountedDesign> lambda_;
  std::vector<DiscountedDesign> sigma_;
  std::vector<MnlData> data_;
  std::vector<Vec> w_hat_;
  std::vector<Vec> w_tilde_;
};

/// Greedy max over actions with ties to the lowest index, Q clamped to [0, H].
std::unique_ptr<UcrlLearner> make_ucrl_learner(const MixtureMDP& mdp, const UcrlConfig& cfg);

/// Samples one episode of the true MDP k under the plan's policy.
Trajectory rollout(const MixtureMDP& mdp, long k, const Policy& policy, Rng& rng);

struct UcrlRun {
  std::vector<double> regret;  ///< per episode: V*_1 − V^π_1
  UcrlDiagnostics diagnostics;
};

/// Plans, rolls out and absorbs K episodes; next states use the kNoise stream.
UcrlRun run_ucrl(const MixtureMDP& mdp, const UcrlConfig& cfg, std::uint64_t seed);

}  // namespace driftbandit
