#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "driftbandit/bandit_glb.hpp"
#include "driftbandit/bandit_lb.hpp"
#include "driftbandit/errors.hpp"
#include "driftbandit/link_model.hpp"
#include "driftbandit/rng.hpp"

using namespace driftbandit;

namespace {

GlbConfig make_cfg(LinkKind kind, double S, GlbVariant variant, double gamma = 0.95,
                   double lambda = 1.0) {
  GlbConfig cfg;
  cfg.link = LinkModel::make(kind, S, 1.0);
  cfg.radius.S = S;
  cfg.radius.L = 1.0;
  cfg.radius.R = 1.0;
  cfg.radius.d = 2;
  cfg.gamma = gamma;
  cfg.lambda = lambda;
  cfg.variant = variant;
  cfg.horizon = 1000;
  return cfg;
}

Vec unit(double angle) { return Vec{{std::cos(angle), std::sin(angle)}}; }

void feed(GlbLearner& g, Rng& rng, int n, bool bernoulli) {
  for (int i = 0; i < n; ++i) {
    const Vec x = unit(2.0 * std::numbers::pi * rng.uniform());
    const double r = bernoulli ? (rng.bernoulli(0.5 + 0.3 * x(0)) ? 1.0 : 0.0) : rng.normal();
    g.observe(x, r);
  }
}

// Minimum of f over a polar grid of the radius-S disk.
template <class F>
Vec polar_grid_min(F f, double S, int radii, int angles) {
  Vec best = Vec::Zero(2);
  double fb = f(best);
  for (int i = 1; i <= radii; ++i) {
    for (int j = 0; j < angles; ++j) {
      const Vec p = (S * i / radii) * unit(2.0 * std::numbers::pi * j / angles);
      const double v = f(p);
      if (v < fb) {
        fb = v;
        best = p;
      }
    }
  }
  return best;
}

}  // namespace

TEST_CASE("c_mu for the identity and logistic links") {
  CHECK(compute_c_mu(LinkKind::kIdentity, 3.0, 2.0) == 1.0);
  CHECK(1.0 / compute_c_mu(LinkKind::kLogistic, 1.0, 1.0) == doctest::Approx(5.0).epsilon(0.1));
  CHECK(1.0 / compute_c_mu(LinkKind::kLogistic, 5.0, 1.0) == doctest::Approx(152.0).epsilon(0.1));
}

TEST_CASE("score with no data is the regularizer") {
  GlbLearner g(make_cfg(LinkKind::kLogistic, 1.0, GlbVariant::kGlb, 0.9, 2.0));
  const Vec th{{0.3, -0.4}};
  const double lc = 2.0 * g.config().link.c_mu;
  CHECK((g.score_g(th) - lc * th).norm() < 1e-15);
  CHECK((g.scb_H(th) - lc * Mat::Identity(2, 2)).norm() < 1e-15);
  CHECK(g.solve_score_equation().norm() == 0.0);
}

TEST_CASE("identity link score equals the design matrix product") {
  GlbLearner g(make_cfg(LinkKind::kIdentity, 1.0, GlbVariant::kGlb, 0.8, 1.5));
  Rng rng(51, Stream::kTest);
  feed(g, rng, 30, false);
  const Vec th{{0.7, 0.2}};
  CHECK((g.score_g(th) - g.design().V() * th).norm() < 1e-10);
  CHECK((g.scb_H(th) - g.design().V()).norm() < 1e-10);
}

TEST_CASE("logistic Jacobian at zero is a quarter of the weighted Gram matrix") {
  GlbLearner g(make_cfg(LinkKind::kLogistic, 1.0, GlbVariant::kScb, 0.9, 1.0));
  Rng rng(52, Stream::kTest);
  std::vector<Vec> xs;
  for (int i = 0; i < 12; ++i) {
    xs.push_back(unit(rng.uniform() * 6.0));
    g.observe(xs.back(), 1.0);
  }
  Mat want = g.config().link.c_mu * Mat::Identity(2, 2);
  for (int s = 0; s < 12; ++s) {
    want += 0.25 * std::pow(0.9, 11 - s) * xs[static_cast<std::size_t>(s)] *
            xs[static_cast<std::size_t>(s)].transpose();
  }
  CHECK((g.scb_H(Vec::Zero(2)) - want).norm() < 1e-12);
}

TEST_CASE("symmetric pair cancels in the logistic score at zero") {
  GlbLearner g(make_cfg(LinkKind::kLogistic, 1.0, GlbVariant::kGlb, 1.0, 1.0));
  const Vec x{{0.6, 0.8}};
  g.observe(x, 1.0);
  g.observe(-x, 1.0);
  // Weights 1 and 1 at γ = 1: 0.5·x + 0.5·(−x) = 0.
  CHECK(g.score_g(Vec::Zero(2)).norm() < 1e-15);
}

TEST_CASE("identity link score root equals the ridge estimate") {
  Rng rng(53, Stream::kTest);
  for (double gamma : {0.7, 0.95, 1.0}) {
    GlbLearner g(make_cfg(LinkKind::kIdentity, 1.0, GlbVariant::kGlb, gamma, 1.3));
    feed(g, rng, 60, false);
    CHECK((g.solve_score_equation() - g.design().ridge_estimate()).norm() < 1e-9);
  }
}

TEST_CASE("logistic root for balanced outcomes is near zero") {
  GlbConfig cfg = make_cfg(LinkKind::kLogistic, 1.0, GlbVariant::kGlb, 1.0, 1e-3);
  cfg.radius.d = 1;
  GlbLearner g(cfg);
  g.observe(Vec{{1.0}}, 1.0);
  g.observe(Vec{{1.0}}, 0.0);
  const Vec th = g.solve_score_equation();
  CHECK(std::abs(th(0)) < 1e-12);
  CHECK(g.score_residual(th) < 1e-10);
}

TEST_CASE("logistic solve leaves a tiny residual") {
  GlbLearner g(make_cfg(LinkKind::kLogistic, 2.0, GlbVariant::kGlb, 0.97, 0.5));
  Rng rng(54, Stream::kTest);
  feed(g, rng, 200, true);
  const Vec th = g.solve_score_equation();
  CHECK(g.score_residual(th) <= 1e-10 * (1.0 + g.weight_total()));
}

TEST_CASE("projection keeps feasible estimates") {
  GlbLearner g(make_cfg(LinkKind::kLogistic, 1.0, GlbVariant::kGlb));
  Rng rng(55, Stream::kTest);
  feed(g, rng, 20, true);
  const Vec th{{0.3, 0.4}};
  CHECK(g.project_glb(th) == th);
  CHECK(g.project_scb(th) == th);
  GlbLearner wide(make_cfg(LinkKind::kIdentity, 1e6, GlbVariant::kGlb));
  const Vec far{{30.0, -40.0}};
  CHECK(wide.project_glb(far) == far);
}

TEST_CASE("identity projection is the V-norm projection onto the disk") {
  GlbLearner g(make_cfg(LinkKind::kIdentity, 1.0, GlbVariant::kGlb, 0.9, 1.0));
  Rng rng(56, Stream::kTest);
  for (int i = 0; i < 25; ++i) g.observe(Vec{{1.0, 0.1 * rng.normal()}}, 0.0);
  const Mat V = g.design().V();
  for (const Vec& th_hat : {Vec{{3.0, 1.0}}, Vec{{-0.5, 2.0}}, Vec{{1.2, -1.2}}}) {
    auto f = [&](const Vec& th) { return (th_hat - th).dot(V * (th_hat - th)); };
    const Vec grid = polar_grid_min(f, 1.0, 400, 2000);
    const Vec got = g.project_glb(th_hat);
    CHECK(got.norm() <= 1.0 + 1e-12);
    CHECK(f(got) <= f(grid) + 1e-6);
    CHECK((got - grid).norm() < 5e-3);
  }
}

TEST_CASE("identity link SCB projection matches the GLB projection") {
  GlbLearner g(make_cfg(LinkKind::kIdentity, 1.0, GlbVariant::kScb, 0.9, 1.0));
  Rng rng(57, Stream::kTest);
  feed(g, rng, 30, false);
  const Vec th_hat{{2.0, -1.5}};
  CHECK((g.project_scb(th_hat) - g.project_glb(th_hat)).norm() < 1e-5);
}

TEST_CASE("logistic SCB projection matches a polar grid search") {
  GlbLearner g(make_cfg(LinkKind::kLogistic, 1.0, GlbVariant::kScb, 0.95, 1.0));
  Rng rng(58, Stream::kTest);
  feed(g, rng, 80, true);
  const Vec th_hat{{2.5, 0.5}};
  const Vec target = g.score_g(th_hat);
  auto f = [&](const Vec& th) { return quad_norm(g.scb_H(th), target - g.score_g(th)); };
  const Vec grid = polar_grid_min(f, 1.0, 200, 1000);
  const Vec got = g.project_scb(th_hat);
  CHECK(got.norm() <= 1.0 + 1e-12);
  CHECK(f(got) <= f(grid) + 1e-3);
  CHECK((got - grid).norm() < 1e-2);
}

TEST_CASE("glb_radius hand values") {
  RadiusParams p;
  p.S = 2.0;
  p.R = 0.5;
  p.delta = 0.1;
  p.d = 2;
  const LinkModel id = LinkModel::make(LinkKind::kIdentity, 2.0, 1.0);
  CHECK(glb_radius(id, p, 3.0, 17.0) == doctest::Approx(lb_radius(p, 3.0, 17.0)));
  const LinkModel lg = LinkModel::make(LinkKind::kLogistic, 2.0, 1.0);
  CHECK(glb_radius(lg, p, 3.0, 0.0) ==
        doctest::Approx(std::sqrt(3.0) * lg.c_mu * 2.0 + 0.5 * std::sqrt(2.0 * std::log(10.0))));
  CHECK(glb_radius(lg, p, 3.0, 10.0) > glb_radius(lg, p, 3.0, 1.0));
}

TEST_CASE("scb_radius hand values") {
  LinkModel lk = LinkModel::make(LinkKind::kIdentity, 1.0, 1.0);
  // λc_μ = 4, m = 1, d = 1, δ = 1, W = 0, S = 1.
  CHECK(scb_radius(lk, 4.0, 0.0, 1.0, 1) == doctest::Approx(3.6931471805599454));
  const LinkModel lg = LinkModel::make(LinkKind::kLogistic, 1.0, 1.0);
  const double slc = std::sqrt(2.0 * lg.c_mu);
  CHECK(scb_radius(lg, 2.0, 0.0, 1.0, 3) ==
        doctest::Approx(slc / 2.0 + (2.0 / slc) * 3.0 * std::log(2.0) + slc));
  double prev = 0.0;
  for (double W : {0.0, 1.0, 10.0, 1000.0}) {
    const double r = scb_radius(lg, 2.0, W, 0.05, 2);
    CHECK(r > prev);
    prev = r;
  }
}

TEST_CASE("optimal discounts for the GLM learners") {
  const LinkModel lg = LinkModel::make(LinkKind::kLogistic, 1.0, 1.0);
  CHECK(optimal_gamma_glb(2, 500, 0.0, lg) == doctest::Approx(1.0 - 1.0 / 500));
  CHECK(optimal_gamma_scb(2, 500, 0.0, lg) == doctest::Approx(1.0 - 1.0 / 500));
  CHECK(optimal_gamma_scbpw(2, 500, 0.0) == doctest::Approx(1.0 - 1.0 / 500));
  const double two_pi = 2.0 * std::numbers::pi;
  CHECK(optimal_gamma_glb(2, 6000, two_pi, lg) == doctest::Approx(0.994926890314776));
  CHECK(optimal_gamma_scb(2, 6000, two_pi, lg) == doctest::Approx(0.9885588595892029));
  CHECK(optimal_gamma_scbpw(2, 100, 200.0) == doctest::Approx(0.01));
}

TEST_CASE("logistic selection at t = 0 ties to the first unit arm") {
  GlbLearner g(make_cfg(LinkKind::kLogistic, 1.0, GlbVariant::kGlb));
  const ArmList arms{unit(0.3), unit(1.2), unit(-2.0)};
  CHECK(g.select(arms) == 0);
  GlbLearner s(make_cfg(LinkKind::kLogistic, 1.0, GlbVariant::kScb));
  CHECK(s.select(arms) == 0);
  CHECK(s.select(ArmList{unit(0.7)}) == 0);
  CHECK_THROWS_AS(s.select(ArmList{}), EmptyArmSet);
}

TEST_CASE("identity GLB with halved radius picks the LB arm") {
  // Bonus scale 2k_μ/c_μ = 2, so halving the LB radius matches.
  Rng rng(59, Stream::kTest);
  GlbLearner g(make_cfg(LinkKind::kIdentity, 10.0, GlbVariant::kGlb, 0.9, 1.0));
  LbConfig lc;
  lc.radius = g.config().radius;
  lc.gamma = 0.9;
  lc.lambda = 1.0;
  LbLearner lb(lc);
  ArmList arms;
  for (int i = 0; i < 10; ++i) arms.push_back(unit(0.6 * i));
  for (int t = 0; t < 40; ++t) {
    const int gi = g.select(arms);
    std::vector<double> idx;
    const Cholesky f = lb.design().factor();
    for (const Vec& x : arms) {
      idx.push_back(x.dot(lb.theta_hat()) + g.radius() * f.quad_norm(x) * 2.0);
    }
    CHECK(gi == argmax_lowest(idx));
    const double r = arms[static_cast<std::size_t>(gi)](0) + 0.3 * rng.normal();
    g.observe(arms[static_cast<std::size_t>(gi)], r);
    lb.observe(arms[static_cast<std::size_t>(gi)], r);
  }
}

TEST_CASE("GLB and SCB estimates stay inside the ball") {
  for (GlbVariant v : {GlbVariant::kGlb, GlbVariant::kScb}) {
    GlbLearner g(make_cfg(LinkKind::kLogistic, 1.0, v, 0.9, 0.05));
    Rng rng(60, Stream::kTest);
    ArmList arms;
    for (int i = 0; i < 8; ++i) arms.push_back(unit(0.8 * i));
    for (int t = 0; t < 150; ++t) {
      const int i = g.select(arms);
      CHECK(g.theta_tilde().norm() <= 1.0 + 1e-9);
      g.observe(arms[static_cast<std::size_t>(i)], rng.bernoulli(0.9) ? 1.0 : 0.0);
    }
  }
}

TEST_CASE("piecewise selection with an unbounded set picks the longest arm") {
  GlbConfig cfg = make_cfg(LinkKind::kIdentity, 1.0, GlbVariant::kScbPw, 0.9, 1.0);
  cfg.radius.delta = 1e-300;
  GlbLearner g(cfg);
  const ArmList arms{Vec{{0.5, 0.0}}, Vec{{0.0, 0.9}}, Vec{{-0.3, 0.3}}};
  const ScbPwChoice c = g.scbpw_select(arms);
  CHECK(c.index == 1);
  CHECK(c.witness(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(c.witness(1) == doctest::Approx(1.0));
  const ScbPwChoice single = g.scbpw_select(ArmList{Vec{{0.5, 0.0}}});
  CHECK(single.index == 0);
  CHECK(single.witness(0) == doctest::Approx(1.0));
}

TEST_CASE("piecewise witnesses satisfy the membership inequality") {
  GlbConfig cfg = make_cfg(LinkKind::kLogistic, 1.0, GlbVariant::kScbPw, 0.98, 2.0);
  GlbLearner g(cfg);
  Rng rng(61, Stream::kTest);
  ArmList arms;
  for (int i = 0; i < 6; ++i) arms.push_back(unit(1.1 * i));
  for (int t = 0; t < 60; ++t) {
    const ScbPwChoice c = g.scbpw_select(arms);
    const Vec g_hat = g.score_g(g.theta_hat());
    CHECK(c.witness.norm() <= 1.0 + 1e-12);
    CHECK(g.scbpw_statistic(c.witness, g_hat) <= g.radius());
    g.observe(arms[static_cast<std::size_t>(c.index)], rng.bernoulli(0.7) ? 1.0 : 0.0);
  }
}

TEST_CASE("piecewise learner rejects unsupported settings") {
  GlbConfig cfg = make_cfg(LinkKind::kLogistic, 1.0, GlbVariant::kScbPw, 1.0);
  CHECK_THROWS_AS(GlbLearner{cfg}, ConfigError);
  cfg = make_cfg(LinkKind::kLogistic, 1.0, GlbVariant::kScbPw, 0.9);
  cfg.radius.d = 3;
  CHECK_THROWS_AS(GlbLearner{cfg}, InvalidSizes);
}
