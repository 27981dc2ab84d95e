#include "driftbandit/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "driftbandit/errors.hpp"
#include "driftbandit/rng.hpp"

namespace driftbandit {

const Vec& MixtureMDP::theta_at(long k, int h) const {
  return theta[static_cast<std::size_t>((k - 1) * H + (h - 1))];
}

const Vec& MixtureMDP::w_at(long k, int h) const {
  return w[static_cast<std::size_t>((k - 1) * H + (h - 1))];
}

double MixtureMDP::reward(long k, int h, int s, int a) const {
  return phi[static_cast<std::size_t>(sa(s, a))].dot(theta_at(k, h));
}

std::vector<double> MixtureMDP::transition(long k, int h, int s, int a) const {
  std::vector<double> p(static_cast<std::size_t>(num_states), 0.0);
  const Vec& wk = w_at(k, h);
  const auto idx = static_cast<std::size_t>(sa(s, a));
  if (kind == TransitionKind::kLinearMixture) {
    for (int sp = 0; sp < num_states; ++sp) {
      p[static_cast<std::size_t>(sp)] = psi[idx * num_states + sp].dot(wk);
    }
  } else {
    const std::vector<double> q = mnl_probs(mnl_psi[idx], wk);
    for (std::size_t i = 0; i < q.size(); ++i) {
      p[static_cast<std::size_t>(reachable[idx][i])] = q[i];
    }
  }
  return p;
}

double MixtureMDP::total_variation() const {
  double total = 0.0;
  for (long k = 1; k < K; ++k) {
    for (int h = 1; h <= H; ++h) {
      total += (theta_at(k, h) - theta_at(k + 1, h)).norm() + (w_at(k, h) - w_at(k + 1, h)).norm();
    }
  }
  return total;
}

void MixtureMDP::validate() const {
  if (num_states < 1 || num_actions < 1 || H < 1 || K < 1 || d < 1) {
    throw InvalidSizes("MDP sizes must be positive");
  }
  if (static_cast<long>(theta.size()) != K * H || static_cast<long>(w.size()) != K * H) {
    throw InvalidSizes("parameter paths must hold K*H entries");
  }
  for (long k = 1; k <= K; ++k) {
    for (int h = 1; h <= H; ++h) {
      for (int s = 0; s < num_states; ++s) {
        for (int a = 0; a < num_actions; ++a) {
          const double r = reward(k, h, s, a);
          if (r < -1e-12 || r > 1.0 + 1e-12) throw InvalidSizes("reward outside [0, 1]");
          const std::vector<double> p = transition(k, h, s, a);
          double sum = 0.0;
          for (double v : p) {
            if (v < -1e-12) throw InvalidSizes("negative transition probability");
            sum += v;
          }
          if (std::abs(sum - 1.0) > 1e-10) throw InvalidSizes("transition row does not sum to 1");
        }
      }
    }
  }
}

std::vector<double> mnl_probs(const std::vector<Vec>& features, const Vec& w) {
  if (features.empty()) throw InvalidSizes("reachable set is empty");
  std::vector<double> logits(features.size());
  for (std::size_t i = 0; i < features.size(); ++i) logits[i] = features[i].dot(w);
  const double mx = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double& v : logits) z += v = std::exp(v - mx);
  for (double& v : logits) v /= z;
  return logits;
}

namespace {

// Backward induction with an arbitrary action rule; returns V_1(s_1).
template <typename ChooseAction>
double backward(const MixtureMDP& mdp, long k, ChooseAction&& choose) {
  const int S = mdp.num_states;
  std::vector<double> next(static_cast<std::size_t>(S), 0.0);
  std::vector<double> cur(static_cast<std::size_t>(S), 0.0);
  std::vector<double> q(static_cast<std::size_t>(mdp.num_actions));
  for (int h = mdp.H; h >= 1; --h) {
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < mdp.num_actions; ++a) {
        const std::vector<double> p = mdp.transition(k, h, s, a);
        double ev = 0.0;
        for (int sp = 0; sp < S; ++sp) ev += p[static_cast<std::size_t>(sp)] * next[static_cast<std::size_t>(sp)];
        q[static_cast<std::size_t>(a)] = mdp.reward(k, h, s, a) + ev;
      }
      const int a = choose(h, s, q);
      cur[static_cast<std::size_t>(s)] = q[static_cast<std::size_t>(a)];
    }
    std::swap(cur, next);
  }
  return next[static_cast<std::size_t>(mdp.initial_state)];
}

// softmax(c·z) with z standard normal; larger c concentrates the mass.
Vec random_simplex(int d, double sharpness, Rng& rng) {
  Vec v(d);
  for (int i = 0; i < d; ++i) v(i) = std::exp(sharpness * rng.normal());
  return v / v.sum();
}

}  // namespace

DpResult dp_oracle(const MixtureMDP& mdp, long k) {
  DpResult out;
  out.policy.assign(static_cast<std::size_t>(mdp.H * mdp.num_states), 0);
  out.value = backward(mdp, k, [&](int h, int s, const std::vector<double>& q) {
    int best = 0;
    for (std::size_t a = 1; a < q.size(); ++a) {
      if (q[a] > q[static_cast<std::size_t>(best)]) best = static_cast<int>(a);
    }
    out.policy[static_cast<std::size_t>((h - 1) * mdp.num_states + s)] = best;
    return best;
  });
  return out;
}

double policy_eval(const MixtureMDP& mdp, long k, const Policy& policy) {
  if (static_cast<int>(policy.size()) != mdp.H * mdp.num_states) {
    throw InvalidSizes("policy table has the wrong size");
  }
  return backward(mdp, k, [&](int h, int s, const std::vector<double>&) {
    return policy[static_cast<std::size_t>((h - 1) * mdp.num_states + s)];
  });
}

MixtureMDP build_desk_instance(TransitionKind kind, std::uint64_t seed, const DeskSizes& sizes,
                               double drift) {
  if (sizes.num_states < 2 || sizes.num_states > 10 || sizes.num_actions < 1 ||
      sizes.num_actions > 4 || sizes.H < 1 || sizes.H > 8 || sizes.d < 2 || sizes.d > 6 ||
      sizes.K < 1) {
    throw InvalidSizes("desk instance needs 2<=|S|<=10, |A|<=4, H<=8, 2<=d<=6, K>=1");
  }
  if (drift < 0.0) throw InvalidSizes("drift must be nonnegative");
  Rng rng(seed, Stream::kInstance);
  MixtureMDP m;
  m.num_states = sizes.num_states;
  m.num_actions = sizes.num_actions;
  m.H = sizes.H;
  m.K = sizes.K;
  m.d = sizes.d;
  m.kind = kind;
  const int S = m.num_states;
  const int A = m.num_actions;
  const int d = m.d;
  const double two_pi = 2.0 * std::numbers::pi;

  for (int i = 0; i < S * A; ++i) m.phi.push_back(random_simplex(d, sizes.phi_sharpness, rng));

  // θ_h^k(i) = 0.5 + 0.4·sin(2π·drift·(k-1)/K + phase_{h,i}) stays in [0.1, 0.9].
  std::vector<double> theta_phase(static_cast<std::size_t>(m.H * d));
  for (double& p : theta_phase) p = two_pi * rng.uniform();

  if (kind == TransitionKind::kLinearMixture) {
    // d base kernels with peaked random rows; ψ(s′|s,a) stacks their probabilities.
    m.psi.assign(static_cast<std::size_t>(S * A * S), Vec::Zero(d));
    for (int i = 0; i < d; ++i) {
      for (int row = 0; row < S * A; ++row) {
        std::vector<double> p(static_cast<std::size_t>(S));
        double z = 0.0;
        for (double& v : p) z += v = std::exp(sizes.kernel_sharpness * rng.normal());
        for (int sp = 0; sp < S; ++sp) {
          m.psi[static_cast<std::size_t>(row * S + sp)](i) = p[static_cast<std::size_t>(sp)] / z;
        }
      }
    }
  } else {
    for (int row = 0; row < S * A; ++row) {
      const int size = std::min(S, sizes.mnl_reachable);
      std::vector<int> states(static_cast<std::size_t>(S));
      for (int s = 0; s < S; ++s) states[static_cast<std::size_t>(s)] = s;
      for (int j = 0; j < size; ++j) {  // partial Fisher-Yates
        const auto pick = j + static_cast<int>(rng.below(static_cast<std::uint64_t>(S - j)));
        std::swap(states[static_cast<std::size_t>(j)], states[static_cast<std::size_t>(pick)]);
      }
      states.resize(static_cast<std::size_t>(size));
      std::vector<Vec> feats;
      for (int j = 0; j < size; ++j) {
        Vec v(d);
        for (int i = 0; i < d; ++i) v(i) = rng.normal();
        feats.push_back(v / v.norm());
      }
      m.reachable.push_back(std::move(states));
      m.mnl_psi.push_back(std::move(feats));
    }
    m.U = std::min(S, sizes.mnl_reachable);
    m.S_w = sizes.mnl_S_w;
    m.L_psi = 1.0;
  }

  // Transition parameters: simplex path (linear mixture) or a circle of
  // radius S_w in a random plane (MNL).
  std::vector<double> w_phase(static_cast<std::size_t>(m.H * d));
  for (double& p : w_phase) p = two_pi * rng.uniform();
  std::vector<Vec> plane_u;
  std::vector<Vec> plane_v;
  for (int h = 0; h < m.H; ++h) {
    Vec u(d);
    Vec v(d);
    for (int i = 0; i < d; ++i) {
      u(i) = rng.normal();
      v(i) = rng.normal();
    }
    u /= u.norm();
    v -= v.dot(u) * u;
    v /= v.norm();
    plane_u.push_back(u);
    plane_v.push_back(v);
  }

  for (long k = 1; k <= m.K; ++k) {
    const double angle = two_pi * drift * static_cast<double>(k - 1) / static_cast<double>(m.K);
    for (int h = 1; h <= m.H; ++h) {
      Vec th(d);
      for (int i = 0; i < d; ++i) {
        th(i) = 0.5 + 0.4 * std::sin(angle + theta_phase[static_cast<std::size_t>((h - 1) * d + i)]);
      }
      m.theta.push_back(std::move(th));
      Vec wv(d);
      if (kind == TransitionKind::kLinearMixture) {
        for (int i = 0; i < d; ++i) {
          wv(i) = 1.0 + 0.8 * std::sin(angle + w_phase[static_cast<std::size_t>((h - 1) * d + i)]);
        }
        wv /= wv.sum();
      } else {
        const double a = angle + w_phase[static_cast<std::size_t>((h - 1) * d)];
        const auto hi = static_cast<std::size_t>(h - 1);
        wv = m.S_w * (std::cos(a) * plane_u[hi] + std::sin(a) * plane_v[hi]);
      }
      m.w.push_back(std::move(wv));
    }
  }
  // Norm bounds are the tightest ones the instance admits.
  m.S_theta = 0.0;
  for (const Vec& th : m.theta) m.S_theta = std::max(m.S_theta, th.norm());
  m.L_phi = 0.0;
  for (const Vec& f : m.phi) m.L_phi = std::max(m.L_phi, f.norm());
  if (kind == TransitionKind::kLinearMixture) {
    m.S_w = 0.0;
    for (const Vec& wv : m.w) m.S_w = std::max(m.S_w, wv.norm());
    m.L_psi = 0.0;
    for (const Vec& f : m.psi) m.L_psi = std::max(m.L_psi, f.norm());
  } else {
    m.kappa = certified_kappa(m);
  }
  m.validate();
  return m;
}

double certified_kappa(const MixtureMDP& mdp) {
  double kappa = 1.0;
  for (const auto& feats : mdp.mnl_psi) {
    for (std::size_t i = 0; i < feats.size(); ++i) {
      double denom = 1.0;
      for (std::size_t j = 0; j < feats.size(); ++j) {
        if (j != i) denom += std::exp(mdp.S_w * (feats[j] - feats[i]).norm());
      }
      const double p_min = 1.0 / denom;
      // Pairs with s′ = s″ are included, so the bound is p_min².
      kappa = std::min(kappa, p_min * p_min);
    }
  }
  return kappa;
}

double grid_kappa(const MixtureMDP& mdp, int points_per_axis) {
  const int d = mdp.d;
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  Vec w(d);
  while (true) {
    for (int i = 0; i < d; ++i) {
      w(i) = mdp.S_w * (-1.0 + 2.0 * idx[static_cast<std::size_t>(i)] / (points_per_axis - 1));
    }
    if (w.norm() <= mdp.S_w) {
      for (const auto& feats : mdp.mnl_psi) {
        const std::vector<double> p = mnl_probs(feats, w);
        const double pm = *std::min_element(p.begin(), p.end());
        best = std::min(best, pm * pm);
      }
    }
    int pos = 0;
    while (pos < d && ++idx[static_cast<std::size_t>(pos)] == points_per_axis) {
      idx[static_cast<std::size_t>(pos)] = 0;
      ++pos;
    }
    if (pos == d) break;
  }
  return best;
}

}  // namespace driftbandit
