#include "driftbandit/weighted_design.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "driftbandit/errors.hpp"

namespace driftbandit {

void RadiusParams::validate() const {
  if (!(S > 0.0) || !(L > 0.0) || !(R >= 0.0) || !(delta > 0.0 && delta < 1.0) || d < 1) {
    throw ConfigError("radius parameters must be positive with delta in (0,1)");
  }
}

DiscountedDesign::DiscountedDesign(int d, double gamma, double lambda)
    : d_(d), gamma_(gamma), lambda_(lambda) {
  if (d < 1) throw DimensionMismatch("design dimension must be positive");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in (0, 1]");
  if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
  reset();
}

void DiscountedDesign::reset() {
  t_ = 0;
  w_ = 0.0;
  v_ = lambda_ * Mat::Identity(d_, d_);
  b_ = Vec::Zero(d_);
}

void DiscountedDesign::update(const Vec& x, double r) {
  if (x.size() != d_) {
    throw DimensionMismatch("arm has dimension " + std::to_string(x.size()) +
                            ", design has " + std::to_string(d_));
  }
  v_ *= gamma_;
  v_.noalias() += x * x.transpose();
  v_.diagonal().array() += (1.0 - gamma_) * lambda_;
  b_ = gamma_ * b_ + r * x;
  w_ = gamma_ * w_ + 1.0;
  ++t_;
}

void DiscountedDesign::update_many(std::span<const Vec> xs) {
  v_ *= gamma_;
  for (const Vec& x : xs) {
    if (x.size() != d_) {
      throw DimensionMismatch("feature has dimension " + std::to_string(x.size()) +
                              ", design has " + std::to_string(d_));
    }
    v_.noalias() += x * x.transpose();
  }
  v_.diagonal().array() += (1.0 - gamma_) * lambda_;
  b_ *= gamma_;
  w_ = gamma_ * w_ + 1.0;
  ++t_;
}

Vec DiscountedDesign::ridge_estimate() const {
  if (t_ == 0) return Vec::Zero(d_);
  return spd_solve(v_, b_);
}

double lb_radius(const RadiusParams& p, double lambda, double W) {
  const double log_term = 2.0 * std::log(1.0 / p.delta) +
                          p.d * std::log1p(p.L * p.L * W / (lambda * p.d));
  return std::sqrt(lambda) * p.S + p.R * std::sqrt(log_term);
}

double weighted_potential_bound(long T, double gamma, double lambda, double L,
                                int d, double W_T) {
  const double drift = gamma >= 1.0 ? 0.0 : static_cast<double>(T) * std::log(1.0 / gamma);
  return 2.0 * std::max(1.0, L * L / lambda) * d *
         (drift + std::log1p(L * L * W_T / (d * lambda)));
}

}  // namespace driftbandit
