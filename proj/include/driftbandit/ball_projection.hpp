#pragma once

#include <functional>

#include "driftbandit/numerics.hpp"

namespace driftbandit {

struct BallProjectionOptions {
  double tol = 1e-7;
  int max_iter = 500;
};

struct BallProjectionResult {
  Vec theta;
  double objective = 0.0;
  double residual = 0.0;  ///< projected-gradient stationarity measure
  int iterations = 0;
};

/// Projected gradient descent for
///   min_{‖θ‖≤S} ‖target − g(θ)‖²_{M⁻¹}
/// where `jacobian(θ)` is the symmetric Jacobian of g and M is fixed.
/// Step sizes come from Barzilai-Borwein with Armijo backtracking.
/// Throws NoConvergence when the residual stays above 100·tol.
BallProjectionResult project_to_ball(const Vec& target,
                                     const std::function<Vec(const Vec&)>& g,
                                     const std::function<Mat(const Vec&)>& jacobian,
                                     const Cholesky& metric, double S, const Vec& init,
                                     const BallProjectionOptions& opts = {});

/// θ·S/max(S, ‖θ‖).
Vec ball_clip(const Vec& theta, double S);

}  // namespace driftbandit
