#pragma once

namespace driftbandit {

enum class LinkKind { kIdentity, kLogistic };

/// inf of μ′ over |z| ≤ L·S. Identity gives 1; logistic gives σ(LS)(1−σ(LS)).
double compute_c_mu(LinkKind kind, double S, double L);

/// Inverse link together with the constants the confidence radii need.
struct LinkModel {
  LinkKind kind = LinkKind::kLogistic;
  double S = 1.0;
  double L = 1.0;
  double m = 1.0;  ///< reward upper bound
  double k_mu = 0.25;
  double c_mu = 0.0;

  static LinkModel make(LinkKind kind, double S, double L, double m = 1.0);

  double mu(double z) const;
  double mu_prime(double z) const;
  double mu_second(double z) const;
  /// Cumulant b with b′ = μ: z²/2 or softplus.
  double cumulant(double z) const;
};

}  // namespace driftbandit
