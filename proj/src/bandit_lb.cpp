#include "driftbandit/bandit_lb.hpp"

#include <algorithm>
#include <cmath>

#include "driftbandit/errors.hpp"

namespace driftbandit {

int argmax_lowest(std::span<const double> values) {
  if (values.empty()) throw EmptyArmSet();
  int best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
  }
  return best;
}

namespace {

double effective_gamma(const LbConfig& cfg) {
  return cfg.variant == LbVariant::kStatic ? 1.0 : cfg.gamma;
}

}  // namespace

LbLearner::LbLearner(const LbConfig& cfg)
    : cfg_(cfg), design_(cfg.radius.d, effective_gamma(cfg), cfg.lambda) {
  cfg_.radius.validate();
  if (cfg_.variant == LbVariant::kRestart && cfg_.restart_period < 1) {
    throw ConfigError("restart period must be at least 1");
  }
  refresh();
}

void LbLearner::refresh() {
  factor_.emplace(design_.V());
  theta_hat_ = design_.t() == 0 ? Vec::Zero(design_.dim()) : factor_->solve(design_.b());
  beta_ = lb_radius(cfg_.radius, design_.lambda(), design_.weight_sum());
}

std::vector<double> LbLearner::ucb_indices(const ArmList& arms) const {
  std::vector<double> idx;
  idx.reserve(arms.size());
  for (const Vec& x : arms) idx.push_back(x.dot(theta_hat_) + beta_ * factor_->quad_norm(x));
  return idx;
}

int LbLearner::select(const ArmList& arms) {
  if (arms.empty()) throw EmptyArmSet();
  const std::vector<double> idx = ucb_indices(arms);
  return argmax_lowest(idx);
}

void LbLearner::observe(const Vec& x, double reward) {
  design_.update(x, reward);
  if (cfg_.variant == LbVariant::kRestart && design_.t() >= cfg_.restart_period) design_.reset();
  refresh();
}

double clamp_gamma(double one_minus_gamma, long T) {
  if (T <= 1) return 0.5;
  const double lo = 1.0 / static_cast<double>(T);
  return std::clamp(1.0 - one_minus_gamma, lo, 1.0 - lo);
}

double optimal_gamma_lb(int d, long T, double P_T) {
  const double Td = static_cast<double>(T);
  return clamp_gamma(std::max(1.0 / Td, std::sqrt(P_T / (d * Td))), T);
}

long restart_period(int d, long T, double P_T) {
  const double h = std::pow(static_cast<double>(d), 0.25) *
                   std::sqrt(static_cast<double>(T) / (1.0 + P_T));
  return std::max(1L, static_cast<long>(std::ceil(h)));
}

}  // namespace driftbandit
