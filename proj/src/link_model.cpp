#include "driftbandit/link_model.hpp"

#include <cmath>

#include "driftbandit/environments.hpp"
#include "driftbandit/errors.hpp"

namespace driftbandit {

double compute_c_mu(LinkKind kind, double S, double L) {
  switch (kind) {
    case LinkKind::kIdentity:
      return 1.0;
    case LinkKind::kLogistic: {
      const double s = sigmoid(L * S);
      return s * (1.0 - s);
    }
  }
  throw UnsupportedLink("unknown link kind");
}

LinkModel LinkModel::make(LinkKind kind, double S, double L, double m) {
  if (!(S > 0.0) || !(L > 0.0) || !(m > 0.0)) throw ConfigError("S, L and m must be positive");
  LinkModel lm;
  lm.kind = kind;
  lm.S = S;
  lm.L = L;
  lm.m = m;
  lm.k_mu = kind == LinkKind::kIdentity ? 1.0 : 0.25;
  lm.c_mu = compute_c_mu(kind, S, L);
  return lm;
}

double LinkModel::mu(double z) const { return kind == LinkKind::kIdentity ? z : sigmoid(z); }

double LinkModel::mu_prime(double z) const {
  if (kind == LinkKind::kIdentity) return 1.0;
  const double s = sigmoid(z);
  return s * (1.0 - s);
}

double LinkModel::mu_second(double z) const {
  if (kind == LinkKind::kIdentity) return 0.0;
  const double s = sigmoid(z);
  return s * (1.0 - s) * (1.0 - 2.0 * s);
}

double LinkModel::cumulant(double z) const {
  if (kind == LinkKind::kIdentity) return 0.5 * z * z;
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

}  // namespace driftbandit
