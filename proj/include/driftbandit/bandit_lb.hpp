#pragma once

#include <optional>

#include "driftbandit/bandit.hpp"
#include "driftbandit/weighted_design.hpp"

namespace driftbandit {

enum class LbVariant { kWeighted, kStatic, kRestart };

struct LbConfig {
  RadiusParams radius;
  double gamma = 1.0;   ///< ignored (forced to 1) by the static variant
  double lambda = 1.0;
  LbVariant variant = LbVariant::kWeighted;
  long restart_period = 0;  ///< H_r, restart variant only
};

/// Discounted linear UCB. The restart variant re-initializes its design
/// every `restart_period` rounds.
class LbLearner final : public BanditLearner {
 public:
  explicit LbLearner(const LbConfig& cfg);

  int select(const ArmList& arms) override;
  void observe(const Vec& x, double reward) override;

  /// UCB index ⟨x, θ̂⟩ + β‖x‖_{V⁻¹} for every arm, in order.
  std::vector<double> ucb_indices(const ArmList& arms) const;

  const DiscountedDesign& design() const { return design_; }
  const Vec& theta_hat() const { return theta_hat_; }
  double beta() const { return beta_; }
  const LbConfig& config() const { return cfg_; }

 private:
  void refresh();

  LbConfig cfg_;
  DiscountedDesign design_;
  Vec theta_hat_;
  double beta_ = 0.0;
  std::optional<Cholesky> factor_;
};

/// 1 − max{1/T, √(P_T/(dT))}, clamped to [1/T, 1 − 1/T]; 0.5 when T = 1.
double optimal_gamma_lb(int d, long T, double P_T);

/// ⌈d^{1/4}·√(T/(1+P_T))⌉, at least 1.
long restart_period(int d, long T, double P_T);

/// Shared clamp used by every tuned discount.
double clamp_gamma(double one_minus_gamma, long T);

}  // namespace driftbandit
