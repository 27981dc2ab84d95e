#pragma once

// Test-only oracles. They need the true parameter path, which no learner
// sees, so they sit behind the DRIFTBANDIT_WITH_ORACLES build option.

#include <cstdint>
#include <vector>

#include "driftbandit/numerics.hpp"
#include "driftbandit/weighted_design.hpp"

namespace driftbandit::oracles {

/// Full estimation-error bound for the discounted ridge estimate at round t.
///
/// `design` has absorbed rounds 1..t-1. `path` holds θ_1..θ_t, so the drift
/// sum Σ_{p=1}^{t-1} runs over every consecutive pair of the path.
double estimation_bound_oracle(const std::vector<Vec>& path, const DiscountedDesign& design,
                         const Vec& x, const RadiusParams& p);

/// Drift part of the bound alone: L²√(d/λ)·Σ_p √(Σ_{s≤p} γ^{t-1-s})·‖θ_p − θ_{p+1}‖.
double estimation_bias(const std::vector<Vec>& path, const DiscountedDesign& design, double L);

struct DetBound {
  double logdet;
  double bound;
};

/// (logdet V, d·log(λ + L²W/d)).
DetBound det_bound_oracle(const DiscountedDesign& design, double L);

/// argmin_θ λ‖θ‖² + Σ γ^{t-s}(X_sᵀθ − r_s)², formed from explicit weighted
/// normal equations over the stored history.
Vec batch_weighted_ridge(const std::vector<Vec>& xs, const std::vector<double>& rs,
                         double gamma, double lambda);

/// V = λI + Σ γ^{t-s} X_sX_sᵀ formed directly from the history.
Mat batch_design(const std::vector<Vec>& xs, double gamma, double lambda);

struct SuiteReport {
  int cases = 0;
  int violations = 0;
  double worst = 0.0;  ///< largest error, or largest lhs/rhs ratio for bounds
};

/// Recursive design vs batch ridge on random histories.
SuiteReport estimator_equivalence_suite(std::uint64_t seed, int cases, double tol);

/// Σ‖X_t‖²_{V_{t-1}^{-1}} against the weighted potential bound.
SuiteReport potential_suite(std::uint64_t seed, int cases);

/// Σ_{s≤p}‖A_s‖²_{U^{-1}} ≤ d for every prefix p.
SuiteReport trace_suite(std::uint64_t seed, int cases);

/// logdet V ≤ d·log(λ + L²W/d) after every update.
SuiteReport determinant_suite(std::uint64_t seed, int cases);

struct CoverageReport {
  int runs = 0;
  int covered = 0;  ///< runs where the bound held at every checkpoint and arm
  double rate() const { return runs == 0 ? 0.0 : static_cast<double>(covered) / runs; }
};

/// Drifting linear model on the rotating path with uniformly random arm pulls;
/// checks |xᵀ(θ̂_t − θ_t)| against the full bound for every arm at each checkpoint.
CoverageReport estimation_coverage(std::uint64_t seed, int runs, int checkpoints, long T,
                               double delta);

}  // namespace driftbandit::oracles
