#pragma once

#include <span>

#include "driftbandit/numerics.hpp"

namespace driftbandit {

/// Confidence-radius inputs shared by every bandit learner.
struct RadiusParams {
  double S = 1.0;      ///< bound on the parameter norm
  double L = 1.0;      ///< bound on the arm norm
  double R = 1.0;      ///< sub-Gaussian noise scale
  double delta = 0.05;
  int d = 1;

  void validate() const;
};

/// Discounted second-moment design: the learner's memory.
///
/// After t updates with arms X_1..X_t and rewards r_1..r_t,
///   V = λI + Σ γ^{t-s} X_s X_sᵀ,  b = Σ γ^{t-s} r_s X_s,  W = Σ γ^{t-s}.
/// γ = 1 is admitted and gives the undiscounted design.
class DiscountedDesign {
 public:
  DiscountedDesign(int d, double gamma, double lambda);

  /// V ← γV + xxᵀ + (1-γ)λI, b ← γb + r·x, W ← γW + 1.
  void update(const Vec& x, double r);

  /// One discount step absorbing several outer products at once:
  /// V ← γV + Σ_i x_i x_iᵀ + (1-γ)λI, b ← γb, W ← γW + 1.
  void update_many(std::span<const Vec> xs);

  /// Back to the empty design with the same (d, γ, λ).
  void reset();

  /// θ̂ = V⁻¹b; the zero vector before any update.
  Vec ridge_estimate() const;

  Cholesky factor() const { return Cholesky(v_); }

  int dim() const { return d_; }
  double gamma() const { return gamma_; }
  double lambda() const { return lambda_; }
  long t() const { return t_; }
  double weight_sum() const { return w_; }
  const Mat& V() const { return v_; }
  const Vec& b() const { return b_; }

 private:
  int d_;
  double gamma_;
  double lambda_;
  long t_ = 0;
  double w_ = 0.0;
  Mat v_;
  Vec b_;
};

/// β = √λ·S + R·√(2 log(1/δ) + d log(1 + L²W/(λd))).
double lb_radius(const RadiusParams& p, double lambda, double W);

/// 2·max(1, L²/λ)·d·(T log(1/γ) + log(1 + L²W_T/(dλ))).
double weighted_potential_bound(long T, double gamma, double lambda, double L,
                                int d, double W_T);

}  // namespace driftbandit
