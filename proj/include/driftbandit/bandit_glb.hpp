#pragma once

#include <optional>
#include <vector>

#include "driftbandit/bandit.hpp"
#include "driftbandit/link_model.hpp"
#include "driftbandit/weighted_design.hpp"

namespace driftbandit {

enum class GlbVariant { kGlb, kScb, kScbPw };

struct GlbConfig {
  LinkModel link;
  RadiusParams radius;  ///< S and L must agree with `link`
  double gamma = 1.0;
  double lambda = 1.0;
  GlbVariant variant = GlbVariant::kGlb;
  long horizon = 1;        ///< T, used by the piecewise variant for D
  int grid_radii = 64;     ///< piecewise variant, d = 2 only
  int grid_angles = 256;
};

struct ScbPwChoice {
  int index;
  Vec witness;
};

/// Discounted GLM learner covering the GLB, SCB and piecewise SCB rules.
///
/// Each select() re-solves the weighted score equation over the stored
/// history (warm-started), projects onto the S-ball and scores the arms.
class GlbLearner final : public BanditLearner {
 public:
  explicit GlbLearner(const GlbConfig& cfg);

  int select(const ArmList& arms) override;
  void observe(const Vec& x, double reward) override;

  /// g(θ) = λc_μθ + Σ γ^{t-1-s} μ(X_sᵀθ)X_s.
  Vec score_g(const Vec& theta) const;
  /// H(θ) = λc_μI + Σ γ^{t-1-s} μ′(X_sᵀθ)X_sX_sᵀ; also the Jacobian of g.
  Mat scb_H(const Vec& theta) const;
  /// Root of λc_μθ + Σ w_s(μ(X_sᵀθ) − r_s)X_s = 0.
  Vec solve_score_equation();
  /// ∞-norm of the estimating equation at θ.
  double score_residual(const Vec& theta) const;
  Vec project_glb(const Vec& theta_hat) const;
  Vec project_scb(const Vec& theta_hat) const;
  ScbPwChoice scbpw_select(const ArmList& arms);
  /// ‖g(θ) − g(θ̂)‖_{H(θ)⁻¹}, the confidence-set statistic.
  double scbpw_statistic(const Vec& theta, const Vec& g_hat) const;

  /// Radius in force for the next selection (β̄, β̃ or ρ by variant).
  double radius() const;
  double weight_total() const;
  long rounds() const { return static_cast<long>(rs_.size()); }
  const DiscountedDesign& design() const { return design_; }
  const Vec& theta_tilde() const { return theta_tilde_; }
  const Vec& theta_hat() const { return theta_hat_; }
  const GlbConfig& config() const { return cfg_; }
  double max_residual() const { return max_residual_; }

 private:
  Eigen::Map<const Mat> history() const;
  double loss(const Vec& theta) const;
  void refresh_weights();
  std::optional<ScbPwChoice> scbpw_search(const ArmList& arms, const Vec& g_hat, double rho,
                                          int radii, int angles) const;

  GlbConfig cfg_;
  DiscountedDesign design_;
  double lc_;  // λ·c_μ
  std::vector<double> xs_;  // column-major d × n
  std::vector<double> rs_;
  Vec weights_;             // γ^{n-1-s}, refreshed per select
  Vec theta_hat_;
  Vec theta_tilde_;
  double max_residual_ = 0.0;
};

/// β̄ = √λ·c_μ·S + R√(2log(1/δ) + d log(1 + L²W/(λd))).
double glb_radius(const LinkModel& link, const RadiusParams& p, double lambda, double W);

/// β̃ = √(λc)/(2m) + (2m/√(λc))(log(1/δ) + d log 2)
///     + (dm/√(λc)) log(1 + L²k_μW/(λcd)) + √(λc)·S.
double scb_radius(const LinkModel& link, double lambda, double W, double delta, int d);

/// ρ for the piecewise confidence set with D = log T / log(1/γ); γ < 1.
double scbpw_radius(const LinkModel& link, double lambda, double gamma, long T, double delta,
                    int d);

double optimal_gamma_glb(int d, long T, double P_T, const LinkModel& link);
double optimal_gamma_scb(int d, long T, double P_T, const LinkModel& link);
double optimal_gamma_scbpw(int d, long T, double Gamma_T);

}  // namespace driftbandit
