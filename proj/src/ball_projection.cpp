#include "driftbandit/ball_projection.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "driftbandit/errors.hpp"

namespace driftbandit {

Vec ball_clip(const Vec& theta, double S) {
  const double n = theta.norm();
  return n <= S ? theta : Vec(theta * (S / n));
}

namespace {

struct Eval {
  double f;
  Vec grad;
};

}  // namespace

BallProjectionResult project_to_ball(const Vec& target,
                                     const std::function<Vec(const Vec&)>& g,
                                     const std::function<Mat(const Vec&)>& jacobian,
                                     const Cholesky& metric, double S, const Vec& init,
                                     const BallProjectionOptions& opts) {
  auto evaluate = [&](const Vec& th) {
    const Vec r = target - g(th);
    const Vec u = metric.solve(r);
    return Eval{r.dot(u), -2.0 * (jacobian(th) * u)};
  };
  auto objective = [&](const Vec& th) {
    const Vec r = target - g(th);
    return r.dot(metric.solve(r));
  };

  Vec theta = ball_clip(init, S);

  // Reference curvature 2‖J M⁻¹ J‖_F fixes the scale of the stationarity test.
  const Mat J0 = jacobian(theta);
  Mat MinvJ(J0.rows(), J0.cols());
  for (Eigen::Index c = 0; c < J0.cols(); ++c) MinvJ.col(c) = metric.solve(J0.col(c));
  const double ell = std::max(2.0 * (J0 * MinvJ).norm(), 1e-300);
  const double tol = opts.tol * std::max(1.0, S);

  auto residual_of = [&](const Vec& th, const Vec& grad) {
    return (th - ball_clip(th - grad / ell, S)).norm();
  };

  Eval cur = evaluate(theta);
  double alpha = 1.0 / ell;
  BallProjectionResult res;
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    if (residual_of(theta, cur.grad) <= tol) break;
    double step = alpha;
    bool accepted = false;
    Vec next;
    double f_next = 0.0;
    for (int halvings = 0; halvings < 60; ++halvings) {
      next = ball_clip(theta - step * cur.grad, S);
      f_next = objective(next);
      if (f_next <= cur.f + 1e-4 * cur.grad.dot(next - theta)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    Eval nxt = evaluate(next);
    const Vec s = next - theta;
    const Vec y = nxt.grad - cur.grad;
    const double sy = s.dot(y);
    alpha = sy > 0.0 ? std::clamp(s.squaredNorm() / sy, 1e-6 / ell, 1e6 / ell) : 1.0 / ell;
    theta = std::move(next);
    cur = std::move(nxt);
    cur.f = f_next;
  }
  res.theta = theta;
  res.objective = cur.f;
  res.residual = residual_of(theta, cur.grad);
  res.iterations = it;
  if (!(res.residual <= 100.0 * tol)) {
    throw NoConvergence("ball projection did not converge, residual " +
                        std::to_string(res.residual));
  }
  return res;
}

}  // namespace driftbandit
