#include "driftbandit/environments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "driftbandit/errors.hpp"

namespace driftbandit {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

Vec rotating_theta(long t, long T, double S) {
  const double a = 2.0 * std::numbers::pi * static_cast<double>(t - 1) / static_cast<double>(T);
  Vec theta(2);
  theta << S * std::cos(a), S * std::sin(a);
  return theta;
}

double path_length(const std::vector<Vec>& thetas) {
  double total = 0.0;
  for (std::size_t i = 1; i < thetas.size(); ++i) total += (thetas[i - 1] - thetas[i]).norm();
  return total;
}

ParameterPath ParameterPath::constant(const Vec& theta, long T) {
  if (T < 1) throw InvalidSizes("path horizon must be positive");
  return {Kind::kConstant, std::vector<Vec>(static_cast<std::size_t>(T), theta)};
}

ParameterPath ParameterPath::rotating(long T, double S) {
  if (T < 1) throw InvalidSizes("path horizon must be positive");
  std::vector<Vec> thetas;
  thetas.reserve(static_cast<std::size_t>(T));
  for (long t = 1; t <= T; ++t) thetas.push_back(rotating_theta(t, T, S));
  return {Kind::kRotating, std::move(thetas)};
}

ParameterPath ParameterPath::piecewise(int d, long T, double S, int changes, std::uint64_t seed) {
  if (T < 1 || d < 1 || changes < 0) throw InvalidSizes("invalid piecewise path sizes");
  Rng rng(seed, Stream::kPath);
  auto draw = [&] {
    Vec v(d);
    for (int i = 0; i < d; ++i) v(i) = rng.normal();
    return Vec(S * v / v.norm());
  };
  std::vector<Vec> thetas;
  thetas.reserve(static_cast<std::size_t>(T));
  Vec current = draw();
  int next = 1;
  for (long t = 1; t <= T; ++t) {
    // Segment j starts at round 1 + floor(j·T/(changes+1)).
    if (next <= changes && t == 1 + (static_cast<long>(next) * T) / (changes + 1)) {
      current = draw();
      ++next;
    }
    thetas.push_back(current);
  }
  return {Kind::kPiecewise, std::move(thetas)};
}

int ParameterPath::num_changes() const {
  int n = 0;
  for (std::size_t i = 1; i < thetas_.size(); ++i) {
    if (thetas_[i] != thetas_[i - 1]) ++n;
  }
  return n;
}

ArmList gen_arms(int n, int d, double L, Rng& rng) {
  if (n < 1 || d < 1) throw InvalidSizes("arm count and dimension must be positive");
  ArmList arms;
  arms.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Vec x(d);
    double norm = 0.0;
    do {
      for (int j = 0; j < d; ++j) x(j) = rng.normal();
      norm = x.norm();
    } while (norm == 0.0);
    arms.push_back(L * x / norm);
  }
  return arms;
}

double expected_reward(RewardKind kind, const Vec& x, const Vec& theta) {
  const double z = x.dot(theta);
  return kind == RewardKind::kGaussianLinear ? z : sigmoid(z);
}

double sample_reward(RewardKind kind, const Vec& x, const Vec& theta, Rng& rng, double R) {
  if (x.size() != theta.size()) throw DimensionMismatch("arm and parameter dimensions differ");
  const double z = x.dot(theta);
  if (kind == RewardKind::kGaussianLinear) return z + R * rng.normal();
  return rng.bernoulli(sigmoid(z)) ? 1.0 : 0.0;
}

double instant_regret(const ArmList& arms, const Vec& theta, int chosen, RewardKind kind) {
  double best = -std::numeric_limits<double>::infinity();
  for (const Vec& x : arms) best = std::max(best, expected_reward(kind, x, theta));
  return best - expected_reward(kind, arms.at(static_cast<std::size_t>(chosen)), theta);
}

}  // namespace driftbandit
