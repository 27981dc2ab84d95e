#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "driftbandit/bandit.hpp"
#include "driftbandit/rng.hpp"

namespace driftbandit {

struct BobConfig {
  long T = 1;
  int d = 1;
  long delta = 1;  ///< episode length Δ
  std::vector<double> candidates;
  int N = 1;

  long episodes() const { return (T + delta - 1) / delta; }
};

/// Δ = ⌈d√T⌉, N = ⌈log₂(T/√d)⌉ + 1, γ_i = 1 − d^{-1/2}·2^{1-i}, floored at 1/T.
BobConfig bob_candidates(int d, long T);

/// Exponential weights with implicit exploration over N candidates.
class Exp3Ix {
 public:
  Exp3Ix(int n, double eta, double gamma_ix);

  /// η = √(2 log N / (N·E)), γ_ix = η/2 for E episodes.
  static Exp3Ix tuned(int n, long episodes);

  std::vector<double> probabilities() const;
  int sample(Rng& rng) const;
  /// `reward` must already lie in [0, 1]; the loss is 1 − reward.
  void update(int index, double reward);

  int size() const { return static_cast<int>(log_w_.size()); }
  double eta() const { return eta_; }
  double gamma_ix() const { return gamma_ix_; }

 private:
  std::vector<double> log_w_;
  double eta_;
  double gamma_ix_;
};

/// Everything the simulator needs to play one bandit trial.
struct BanditEnv {
  ArmList arms;
  ParameterPath path;
  RewardKind kind = RewardKind::kGaussianLinear;
  double noise_R = 1.0;
};

/// Plays rounds [t_begin, t_end] (1-based, inclusive) and appends the
/// instantaneous regret of each round to `inst`. Returns the reward sum.
double play_rounds(BanditLearner& learner, const BanditEnv& env, Rng& noise, long t_begin,
                   long t_end, std::vector<double>& inst);

struct BobResult {
  std::vector<double> inst_regret;
  std::vector<int> picks;  ///< candidate index per episode
  long clipped = 0;        ///< meta rewards that left [0, 1] before clipping
};

using LearnerFactory = std::function<std::unique_ptr<BanditLearner>(double gamma)>;

/// Episode-wise γ tuning: every episode builds a fresh learner with the
/// sampled candidate and feeds its reward, mapped through
/// (R + L_max)/(2·L_max), to Exp3-IX.
/// L_max = L·S·Δ + 2R√(Δ ln(T/√Δ)).
BobResult bob_run(const BobConfig& cfg, const LearnerFactory& factory, const BanditEnv& env,
                  double L, double S, double R, Rng& noise, Rng& meta);

double bob_reward_scale(long delta, long T, double L, double S, double R);

}  // namespace driftbandit
