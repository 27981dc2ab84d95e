#pragma once

#include <cstdint>
#include <vector>

#include "driftbandit/numerics.hpp"

namespace driftbandit {

enum class TransitionKind { kLinearMixture, kMnl };

/// Episodic MDP with linear rewards r = φ(s,a)ᵀθ_h^k and either linear
/// mixture transitions P = ψ(s′|s,a)ᵀw_h^k or MNL transitions over a
/// reachable set. Stages h and episodes k are 1-based.
///
/// φ, ψ and the reachable sets are public; θ and w are the hidden truth.
struct MixtureMDP {
  int num_states = 0;
  int num_actions = 0;
  int H = 0;
  long K = 0;
  int d = 0;
  TransitionKind kind = TransitionKind::kLinearMixture;
  int initial_state = 0;

  std::vector<Vec> phi;  ///< [s·A + a]
  std::vector<Vec> psi;  ///< linear mixture: [(s·A + a)·S + s′]
  std::vector<std::vector<int>> reachable;  ///< MNL: [s·A + a]
  std::vector<std::vector<Vec>> mnl_psi;    ///< MNL: aligned with `reachable`

  std::vector<Vec> theta;  ///< [(k-1)·H + (h-1)]
  std::vector<Vec> w;      ///< [(k-1)·H + (h-1)]

  double S_theta = 1.0;
  double S_w = 1.0;
  double L_phi = 1.0;
  double L_psi = 1.0;
  double kappa = 1.0;  ///< MNL only
  int U = 0;           ///< MNL only: largest reachable set

  int sa(int s, int a) const { return s * num_actions + a; }
  const Vec& theta_at(long k, int h) const;
  const Vec& w_at(long k, int h) const;
  double reward(long k, int h, int s, int a) const;
  /// Full next-state distribution over all states.
  std::vector<double> transition(long k, int h, int s, int a) const;
  /// Δ = Σ_k Σ_h (‖θ_h^k − θ_h^{k+1}‖ + ‖w_h^k − w_h^{k+1}‖).
  double total_variation() const;
  void validate() const;
};

/// Softmax of ψᵀw over a reachable set, computed with a max shift.
std::vector<double> mnl_probs(const std::vector<Vec>& features, const Vec& w);

/// Deterministic per-stage policy: [(h-1)·S + s] → action.
using Policy = std::vector<int>;

struct DpResult {
  double value;  ///< V*_1(s_1)
  Policy policy;
};

/// Exact finite-horizon dynamic programming on the true MDP of episode k.
DpResult dp_oracle(const MixtureMDP& mdp, long k);

/// V^π_1(s_1) on the true MDP of episode k.
double policy_eval(const MixtureMDP& mdp, long k, const Policy& policy);

struct DeskSizes {
  int num_states = 5;
  int num_actions = 3;
  int H = 5;
  int d = 4;
  long K = 400;
  double phi_sharpness = 1.0;  ///< spread of the reward features on the simplex
  double kernel_sharpness = 2.0;  ///< spread of the base-kernel rows
  int mnl_reachable = 2;   ///< reachable set size per (s, a)
  double mnl_S_w = 0.5;    ///< norm of the MNL transition parameter
};

/// Small synthetic instance. `drift` is the number of full cycles the
/// parameters trace over the K episodes; drift = 0 is stationary.
MixtureMDP build_desk_instance(TransitionKind kind, std::uint64_t seed, const DeskSizes& sizes,
                               double drift);

/// Lower bound on min p(s′)p(s″) over the reachable sets and the S_w ball:
/// p(s′) ≥ 1 / (1 + Σ_{s̃≠s′} exp(S_w‖ψ(s̃) − ψ(s′)‖)).
double certified_kappa(const MixtureMDP& mdp);

/// Grid estimate of min p(s′)p(s″) over w on a lattice inside the ball.
double grid_kappa(const MixtureMDP& mdp, int points_per_axis);

}  // namespace driftbandit
