#pragma once

#include <cstdint>
#include <vector>

#include "driftbandit/numerics.hpp"
#include "driftbandit/rng.hpp"

namespace driftbandit {

using ArmList = std::vector<Vec>;

double sigmoid(double z);

/// S·(cos 2π(t-1)/T, sin 2π(t-1)/T) for 1 ≤ t ≤ T.
Vec rotating_theta(long t, long T, double S);

/// Σ_{t=2}^{n} ‖θ_{t-1} − θ_t‖₂.
double path_length(const std::vector<Vec>& thetas);

/// Ground-truth parameter sequence θ_1..θ_T, fully materialized.
class ParameterPath {
 public:
  enum class Kind { kConstant, kRotating, kPiecewise };

  static ParameterPath constant(const Vec& theta, long T);
  static ParameterPath rotating(long T, double S);
  /// `changes` switch points spaced uniformly over [1, T]; segment values
  /// are uniform on the radius-S sphere, drawn from `seed`.
  static ParameterPath piecewise(int d, long T, double S, int changes, std::uint64_t seed);

  Kind kind() const { return kind_; }
  long T() const { return static_cast<long>(thetas_.size()); }
  int dim() const { return static_cast<int>(thetas_.front().size()); }
  /// 1-based accessor.
  const Vec& at(long t) const { return thetas_[static_cast<std::size_t>(t - 1)]; }
  const std::vector<Vec>& thetas() const { return thetas_; }
  double path_length() const { return driftbandit::path_length(thetas_); }
  /// Number of rounds t ≥ 2 with θ_t ≠ θ_{t-1}.
  int num_changes() const;

 private:
  ParameterPath(Kind kind, std::vector<Vec> thetas) : kind_(kind), thetas_(std::move(thetas)) {}

  Kind kind_;
  std::vector<Vec> thetas_;
};

/// n i.i.d. standard normal vectors rescaled to norm exactly L.
ArmList gen_arms(int n, int d, double L, Rng& rng);

enum class RewardKind { kGaussianLinear, kBernoulliLogistic };

/// Gaussian: xᵀθ + R·N(0,1). Bernoulli: 1 with probability σ(xᵀθ).
double sample_reward(RewardKind kind, const Vec& x, const Vec& theta, Rng& rng, double R = 1.0);

/// Expected reward of an arm: xᵀθ or σ(xᵀθ).
double expected_reward(RewardKind kind, const Vec& x, const Vec& theta);

/// max_x E[r | x] − E[r | chosen], computed from the true parameter.
double instant_regret(const ArmList& arms, const Vec& theta, int chosen, RewardKind kind);

}  // namespace driftbandit
