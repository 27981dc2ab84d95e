#include "driftbandit/bob.hpp"

#include <algorithm>
#include <cmath>

#include "driftbandit/errors.hpp"

namespace driftbandit {

BobConfig bob_candidates(int d, long T) {
  if (d < 1 || T < d) throw ConfigError("BOB requires T >= d >= 1");
  BobConfig cfg;
  cfg.T = T;
  cfg.d = d;
  const double Td = static_cast<double>(T);
  const double sd = std::sqrt(static_cast<double>(d));
  cfg.delta = std::max(1L, static_cast<long>(std::ceil(d * std::sqrt(Td))));
  cfg.N = std::max(1, static_cast<int>(std::ceil(std::log2(Td / sd))) + 1);
  for (int i = 1; i <= cfg.N; ++i) {
    const double g = 1.0 - std::pow(2.0, 1.0 - i) / sd;
    cfg.candidates.push_back(std::max(g, 1.0 / Td));
  }
  return cfg;
}

Exp3Ix::Exp3Ix(int n, double eta, double gamma_ix)
    : log_w_(static_cast<std::size_t>(n), 0.0), eta_(eta), gamma_ix_(gamma_ix) {
  if (n < 1) throw ConfigError("Exp3-IX needs at least one candidate");
}

Exp3Ix Exp3Ix::tuned(int n, long episodes) {
  const double eta =
      std::sqrt(2.0 * std::log(static_cast<double>(n)) / (n * static_cast<double>(episodes)));
  return {n, eta, eta / 2.0};
}

std::vector<double> Exp3Ix::probabilities() const {
  const double mx = *std::max_element(log_w_.begin(), log_w_.end());
  std::vector<double> p(log_w_.size());
  double z = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) z += p[i] = std::exp(log_w_[i] - mx);
  for (double& v : p) v /= z;
  return p;
}

int Exp3Ix::sample(Rng& rng) const {
  const std::vector<double> p = probabilities();
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(p.size()) - 1;
}

void Exp3Ix::update(int index, double reward) {
  const std::vector<double> p = probabilities();
  const auto i = static_cast<std::size_t>(index);
  const double loss_hat = (1.0 - reward) / (p[i] + gamma_ix_);
  log_w_[i] -= eta_ * loss_hat;
}

double play_rounds(BanditLearner& learner, const BanditEnv& env, Rng& noise, long t_begin,
                   long t_end, std::vector<double>& inst) {
  double total = 0.0;
  for (long t = t_begin; t <= t_end; ++t) {
    const Vec& theta = env.path.at(t);
    const int k = learner.select(env.arms);
    const Vec& x = env.arms[static_cast<std::size_t>(k)];
    const double r = sample_reward(env.kind, x, theta, noise, env.noise_R);
    learner.observe(x, r);
    inst.push_back(instant_regret(env.arms, theta, k, env.kind));
    total += r;
  }
  return total;
}

double bob_reward_scale(long delta, long T, double L, double S, double R) {
  const double dd = static_cast<double>(delta);
  const double log_arg = std::max(1.0, static_cast<double>(T) / std::sqrt(dd));
  return L * S * dd + 2.0 * R * std::sqrt(dd * std::log(log_arg));
}

BobResult bob_run(const BobConfig& cfg, const LearnerFactory& factory, const BanditEnv& env,
                  double L, double S, double R, Rng& noise, Rng& meta) {
  if (cfg.candidates.empty() || static_cast<int>(cfg.candidates.size()) != cfg.N) {
    throw ConfigError("candidate list does not match N");
  }
  if (env.path.T() < cfg.T) throw InvalidSizes("path shorter than the BOB horizon");
  const double l_max = bob_reward_scale(cfg.delta, cfg.T, L, S, R);
  Exp3Ix exp3 = Exp3Ix::tuned(cfg.N, cfg.episodes());
  BobResult out;
  out.inst_regret.reserve(static_cast<std::size_t>(cfg.T));
  for (long start = 1; start <= cfg.T; start += cfg.delta) {
    const long end = std::min(cfg.T, start + cfg.delta - 1);
    const int pick = exp3.sample(meta);
    out.picks.push_back(pick);
    auto learner = factory(cfg.candidates[static_cast<std::size_t>(pick)]);
    const double reward = play_rounds(*learner, env, noise, start, end, out.inst_regret);
    double scaled = (reward + l_max) / (2.0 * l_max);
    if (scaled < 0.0 || scaled > 1.0) {
      ++out.clipped;
      scaled = std::clamp(scaled, 0.0, 1.0);
    }
    exp3.update(pick, scaled);
  }
  return out;
}

}  // namespace driftbandit
