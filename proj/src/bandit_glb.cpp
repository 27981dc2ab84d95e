#include "driftbandit/bandit_glb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "driftbandit/ball_projection.hpp"
#include "driftbandit/bandit_lb.hpp"
#include "driftbandit/errors.hpp"

namespace driftbandit {

namespace {

constexpr int kNewtonMaxIter = 100;
constexpr int kScbOuterIter = 5;
constexpr int kGridWidenings = 2;

}  // namespace

GlbLearner::GlbLearner(const GlbConfig& cfg)
    : cfg_(cfg),
      design_(cfg.radius.d, cfg.gamma, cfg.lambda),
      lc_(cfg.lambda * cfg.link.c_mu),
      theta_hat_(Vec::Zero(cfg.radius.d)),
      theta_tilde_(Vec::Zero(cfg.radius.d)) {
  cfg_.radius.validate();
  if (!(cfg_.link.c_mu > 0.0)) throw ConfigError("c_mu must be positive");
  if (cfg_.variant == GlbVariant::kScbPw) {
    if (cfg_.radius.d != 2) throw InvalidSizes("piecewise SCB selection supports d = 2 only");
    if (!(cfg_.gamma < 1.0)) throw ConfigError("piecewise SCB requires gamma < 1");
    if (cfg_.horizon < 2) throw ConfigError("piecewise SCB requires a horizon T >= 2");
  }
}

Eigen::Map<const Mat> GlbLearner::history() const {
  return {xs_.data(), cfg_.radius.d, static_cast<Eigen::Index>(rs_.size())};
}

void GlbLearner::observe(const Vec& x, double reward) {
  if (x.size() != cfg_.radius.d) throw DimensionMismatch("arm dimension mismatch");
  design_.update(x, reward);
  xs_.insert(xs_.end(), x.data(), x.data() + x.size());
  rs_.push_back(reward);
  refresh_weights();
}

void GlbLearner::refresh_weights() {
  const auto n = static_cast<Eigen::Index>(rs_.size());
  Vec w(n);
  if (n > 0) {
    w(n - 1) = 1.0;
    for (Eigen::Index s = n - 2; s >= 0; --s) w(s) = cfg_.gamma * w(s + 1);
  }
  weights_ = std::move(w);
}

double GlbLearner::weight_total() const { return weights_.size() == 0 ? 0.0 : weights_.sum(); }

Vec GlbLearner::score_g(const Vec& theta) const {
  Vec g = lc_ * theta;
  if (rs_.empty()) return g;
  const auto X = history();
  const Vec z = X.transpose() * theta;
  const Vec coef = weights_.cwiseProduct(z.unaryExpr([&](double v) { return cfg_.link.mu(v); }));
  g.noalias() += X * coef;
  return g;
}

Mat GlbLearner::scb_H(const Vec& theta) const {
  const int d = cfg_.radius.d;
  Mat h = lc_ * Mat::Identity(d, d);
  if (rs_.empty()) return h;
  const auto X = history();
  const Vec z = X.transpose() * theta;
  const Vec coef =
      weights_.cwiseProduct(z.unaryExpr([&](double v) { return cfg_.link.mu_prime(v); }));
  h.noalias() += X * coef.asDiagonal() * X.transpose();
  return h;
}

double GlbLearner::score_residual(const Vec& theta) const {
  Vec grad = score_g(theta);
  if (!rs_.empty()) {
    const Eigen::Map<const Vec> r(rs_.data(), static_cast<Eigen::Index>(rs_.size()));
    grad.noalias() -= history() * weights_.cwiseProduct(r);
  }
  return grad.cwiseAbs().maxCoeff();
}

double GlbLearner::loss(const Vec& theta) const {
  double f = 0.5 * lc_ * theta.squaredNorm();
  if (rs_.empty()) return f;
  const auto X = history();
  const Vec z = X.transpose() * theta;
  for (Eigen::Index s = 0; s < z.size(); ++s) {
    f += weights_(s) * (cfg_.link.cumulant(z(s)) - rs_[static_cast<std::size_t>(s)] * z(s));
  }
  return f;
}

Vec GlbLearner::solve_score_equation() {
  const int d = cfg_.radius.d;
  if (rs_.empty()) return Vec::Zero(d);
  const double scale = 1.0 + weight_total();
  const Eigen::Map<const Vec> r(rs_.data(), static_cast<Eigen::Index>(rs_.size()));
  const Vec wr_x = history() * weights_.cwiseProduct(r);
  Vec theta = theta_hat_;
  for (int it = 0; it < kNewtonMaxIter; ++it) {
    const Vec grad = score_g(theta) - wr_x;
    if (grad.cwiseAbs().maxCoeff() <= 1e-13 * scale) break;
    const Vec step = Cholesky(scb_H(theta)).solve(-grad);
    const double f0 = loss(theta);
    const double slope = grad.dot(step);
    double t = 1.0;
    while (t > 1e-12 && loss(theta + t * step) > f0 + 1e-4 * t * slope + 1e-14 * (1.0 + std::abs(f0))) {
      t *= 0.5;
    }
    theta += t * step;
    if (t * step.norm() <= 1e-15 * (1.0 + theta.norm())) break;
  }
  const double res = score_residual(theta);
  max_residual_ = std::max(max_residual_, res / scale);
  if (!(res <= 1e-10 * scale)) {
    throw NoConvergence("score equation residual " + std::to_string(res));
  }
  return theta;
}

Vec GlbLearner::project_glb(const Vec& theta_hat) const {
  const double S = cfg_.link.S;
  if (theta_hat.norm() <= S) return theta_hat;
  const Vec target = score_g(theta_hat);
  const Cholesky metric(design_.V());
  auto g = [this](const Vec& th) { return score_g(th); };
  auto J = [this](const Vec& th) { return scb_H(th); };
  return project_to_ball(target, g, J, metric, S, theta_hat * (S / theta_hat.norm())).theta;
}

Vec GlbLearner::project_scb(const Vec& theta_hat) const {
  const double S = cfg_.link.S;
  if (theta_hat.norm() <= S) return theta_hat;
  const Vec target = score_g(theta_hat);
  auto g = [this](const Vec& th) { return score_g(th); };
  auto J = [this](const Vec& th) { return scb_H(th); };
  Vec theta = theta_hat * (S / theta_hat.norm());
  for (int outer = 0; outer < kScbOuterIter; ++outer) {
    const Cholesky metric(scb_H(theta));
    theta = project_to_ball(target, g, J, metric, S, theta).theta;
  }
  return theta;
}

double GlbLearner::radius() const {
  const double W = design_.weight_sum();
  switch (cfg_.variant) {
    case GlbVariant::kGlb:
      return glb_radius(cfg_.link, cfg_.radius, cfg_.lambda, W);
    case GlbVariant::kScb:
      return scb_radius(cfg_.link, cfg_.lambda, W, cfg_.radius.delta, cfg_.radius.d);
    case GlbVariant::kScbPw:
      return scbpw_radius(cfg_.link, cfg_.lambda, cfg_.gamma, cfg_.horizon, cfg_.radius.delta,
                          cfg_.radius.d);
  }
  return 0.0;
}

int GlbLearner::select(const ArmList& arms) {
  if (arms.empty()) throw EmptyArmSet();
  if (cfg_.variant == GlbVariant::kScbPw) return scbpw_select(arms).index;
  theta_hat_ = solve_score_equation();
  theta_tilde_ =
      cfg_.variant == GlbVariant::kGlb ? project_glb(theta_hat_) : project_scb(theta_hat_);
  const LinkModel& lk = cfg_.link;
  const double scale = cfg_.variant == GlbVariant::kGlb
                           ? 2.0 * lk.k_mu / lk.c_mu
                           : 2.0 * std::sqrt(1.0 + 2.0 * lk.S) * lk.k_mu / std::sqrt(lk.c_mu);
  const double bonus = scale * radius();
  const Cholesky factor = design_.factor();
  std::vector<double> idx;
  idx.reserve(arms.size());
  for (const Vec& x : arms) idx.push_back(lk.mu(x.dot(theta_tilde_)) + bonus * factor.quad_norm(x));
  return argmax_lowest(idx);
}

double GlbLearner::scbpw_statistic(const Vec& theta, const Vec& g_hat) const {
  return quad_norm(scb_H(theta), score_g(theta) - g_hat);
}

std::optional<ScbPwChoice> GlbLearner::scbpw_search(const ArmList& arms, const Vec& g_hat,
                                                   double rho, int radii, int angles) const {
  const double S = cfg_.link.S;
  std::vector<Vec> grid;
  grid.reserve(static_cast<std::size_t>(radii) * angles + 2);
  grid.push_back(Vec::Zero(2));
  for (int i = 1; i <= radii; ++i) {
    const double rad = S * i / radii;
    for (int j = 0; j < angles; ++j) {
      const double a = 2.0 * std::numbers::pi * j / angles;
      Vec p(2);
      p << rad * std::cos(a), rad * std::sin(a);
      grid.push_back(std::move(p));
    }
  }
  if (theta_hat_.norm() <= S) grid.push_back(theta_hat_);

  std::vector<signed char> member(grid.size(), -1);
  auto is_member = [&](std::size_t i) {
    if (member[i] < 0) member[i] = scbpw_statistic(grid[i], g_hat) <= rho ? 1 : 0;
    return member[i] == 1;
  };

  std::optional<ScbPwChoice> best;
  double best_value = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> order(grid.size());
  std::vector<double> score(grid.size());
  for (std::size_t a = 0; a < arms.size(); ++a) {
    for (std::size_t i = 0; i < grid.size(); ++i) score[i] = arms[a].dot(grid[i]);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t l, std::size_t r) { return score[l] > score[r]; });
    for (std::size_t i : order) {
      const double value = cfg_.link.mu(score[i]);
      if (best && value <= best_value) break;  // cannot beat the incumbent
      if (!is_member(i)) continue;
      if (!best || value > best_value) {
        best_value = value;
        best = ScbPwChoice{static_cast<int>(a), grid[i]};
      }
      break;
    }
  }
  return best;
}

ScbPwChoice GlbLearner::scbpw_select(const ArmList& arms) {
  if (arms.empty()) throw EmptyArmSet();
  if (cfg_.radius.d != 2) throw InvalidSizes("piecewise SCB selection supports d = 2 only");
  theta_hat_ = solve_score_equation();
  const Vec g_hat = score_g(theta_hat_);
  const double rho = radius();
  int radii = cfg_.grid_radii;
  int angles = cfg_.grid_angles;
  for (int attempt = 0; attempt <= kGridWidenings; ++attempt) {
    if (auto choice = scbpw_search(arms, g_hat, rho, radii, angles)) {
      theta_tilde_ = choice->witness;
      return *choice;
    }
    radii *= 2;
    angles *= 2;
  }
  throw EmptyConfidenceSet("no grid point satisfies the confidence-set inequality");
}

double glb_radius(const LinkModel& link, const RadiusParams& p, double lambda, double W) {
  RadiusParams q = p;
  q.S = link.c_mu * p.S;
  return lb_radius(q, lambda, W);
}

double scb_radius(const LinkModel& link, double lambda, double W, double delta, int d) {
  const double lc = lambda * link.c_mu;
  const double slc = std::sqrt(lc);
  const double m = link.m;
  const double L = link.L;
  return slc / (2.0 * m) + (2.0 * m / slc) * (std::log(1.0 / delta) + d * std::log(2.0)) +
         (d * m / slc) * std::log1p(L * L * link.k_mu * W / (lc * d)) + slc * link.S;
}

double scbpw_radius(const LinkModel& link, double lambda, double gamma, long T, double delta,
                    int d) {
  if (!(gamma < 1.0)) throw ConfigError("piecewise radius requires gamma < 1");
  const double lc = lambda * link.c_mu;
  const double slc = std::sqrt(lc);
  const double m = link.m;
  const double L = link.L;
  const double S = link.S;
  // γ^D with D = log T / log(1/γ) is exactly 1/T.
  const double D = std::log(static_cast<double>(T)) / std::log(1.0 / gamma);
  const double gD = std::pow(gamma, D);
  const double drift = gD / (1.0 - gamma);
  const double breve =
      (d * m / slc) *
          std::log1p(L * L * link.k_mu * (1.0 - gD * gD) / (lc * d * (1.0 - gamma))) +
      slc / (2.0 * m) + (2.0 * m / slc) * std::log(1.0 / delta) +
      (2.0 * m / slc) * d * std::log(2.0) + slc * S;
  return (2.0 * L * L * S * link.k_mu / slc) * drift + (L * m / slc) * drift + breve;
}

double optimal_gamma_glb(int d, long T, double P_T, const LinkModel& link) {
  const double Td = static_cast<double>(T);
  return clamp_gamma(std::max(1.0 / Td, std::sqrt(link.k_mu * link.c_mu * P_T / (d * Td))), T);
}

double optimal_gamma_scb(int d, long T, double P_T, const LinkModel& link) {
  const double Td = static_cast<double>(T);
  return clamp_gamma(std::max(1.0 / Td, std::sqrt(link.k_mu * P_T / (d * Td))), T);
}

double optimal_gamma_scbpw(int d, long T, double Gamma_T) {
  const double Td = static_cast<double>(T);
  return clamp_gamma(std::max(1.0 / Td, std::pow(Gamma_T / (d * Td), 2.0 / 3.0)), T);
}

}  // namespace driftbandit
