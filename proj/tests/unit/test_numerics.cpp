#include <cmath>

#include "doctest.h"
#include "driftbandit/errors.hpp"
#include "driftbandit/numerics.hpp"
#include "driftbandit/rng.hpp"

using namespace driftbandit;

namespace {

Mat random_spd(int d, Rng& rng) {
  Mat m(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) m(i, j) = rng.normal();
  }
  return m.transpose() * m + 0.5 * Mat::Identity(d, d);
}

// Cofactor expansion along the first row.
double det_cofactor(const Mat& a) {
  const int n = static_cast<int>(a.rows());
  if (n == 1) return a(0, 0);
  double det = 0.0;
  for (int j = 0; j < n; ++j) {
    Mat minor(n - 1, n - 1);
    for (int r = 1; r < n; ++r) {
      int cc = 0;
      for (int c = 0; c < n; ++c) {
        if (c == j) continue;
        minor(r - 1, cc++) = a(r, c);
      }
    }
    det += ((j % 2 == 0) ? 1.0 : -1.0) * a(0, j) * det_cofactor(minor);
  }
  return det;
}

Mat adjugate_inverse(const Mat& a) {
  const int n = static_cast<int>(a.rows());
  Mat inv(n, n);
  const double det = det_cofactor(a);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Mat minor(n - 1, n - 1);
      int rr = 0;
      for (int r = 0; r < n; ++r) {
        if (r == i) continue;
        int cc = 0;
        for (int c = 0; c < n; ++c) {
          if (c == j) continue;
          minor(rr, cc++) = a(r, c);
        }
        ++rr;
      }
      inv(j, i) = (((i + j) % 2 == 0) ? 1.0 : -1.0) * det_cofactor(minor) / det;
    }
  }
  return inv;
}

}  // namespace

TEST_CASE("spd_solve on identity and scaled identity") {
  const Vec x = spd_solve(Mat::Identity(2, 2), Vec{{3.0, -1.0}});
  CHECK(x(0) == doctest::Approx(3.0));
  CHECK(x(1) == doctest::Approx(-1.0));

  const Vec y = spd_solve(2.0 * Mat::Identity(2, 2), Vec{{2.0, 4.0}});
  CHECK(y(0) == doctest::Approx(1.0));
  CHECK(y(1) == doctest::Approx(2.0));
}

TEST_CASE("spd_solve agrees with the adjugate inverse") {
  Rng rng(7, Stream::kTest);
  for (int rep = 0; rep < 20; ++rep) {
    const Mat a = random_spd(5, rng);
    Vec b(5);
    for (int i = 0; i < 5; ++i) b(i) = rng.normal();
    const Vec want = adjugate_inverse(a) * b;
    CHECK((spd_solve(a, b) - want).norm() <= 1e-9 * (1.0 + want.norm()));
  }
}

TEST_CASE("quad_norm hand values") {
  CHECK(quad_norm(Mat::Identity(2, 2), Vec{{3.0, 4.0}}) == doctest::Approx(5.0));
  CHECK(quad_norm(4.0 * Mat::Identity(2, 2), Vec{{2.0, 0.0}}) == doctest::Approx(1.0));
}

TEST_CASE("quad_norm is absolutely homogeneous") {
  Rng rng(8, Stream::kTest);
  const Mat a = random_spd(4, rng);
  Vec x(4);
  for (int i = 0; i < 4; ++i) x(i) = rng.normal();
  for (double c : {-3.0, 0.0, 0.25, 7.0}) {
    CHECK(quad_norm(a, c * x) == doctest::Approx(std::abs(c) * quad_norm(a, x)).epsilon(1e-12));
  }
}

TEST_CASE("logdet hand values and cofactor oracle") {
  CHECK(logdet(Mat::Identity(3, 3)) == doctest::Approx(0.0));
  Mat d2 = Mat::Zero(2, 2);
  d2(0, 0) = 2.0;
  d2(1, 1) = 3.0;
  CHECK(logdet(d2) == doctest::Approx(std::log(6.0)));

  Rng rng(9, Stream::kTest);
  for (int rep = 0; rep < 10; ++rep) {
    const Mat a = random_spd(4, rng);
    CHECK(logdet(a) == doctest::Approx(std::log(det_cofactor(a))).epsilon(1e-10));
  }
}

TEST_CASE("Cholesky of a nearly singular Gram matrix succeeds") {
  Rng rng(10, Stream::kTest);
  Mat m(3, 6);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 6; ++j) m(i, j) = rng.normal();
  }
  const Mat a = m.transpose() * m + 1e-8 * Mat::Identity(6, 6);
  CHECK_NOTHROW(Cholesky{a});
}

TEST_CASE("Cholesky rejects indefinite, asymmetric and non-square input") {
  Mat indef = Mat::Identity(2, 2);
  indef(1, 1) = -1.0;
  CHECK_THROWS_AS(Cholesky{indef}, NotPositiveDefinite);

  Mat asym = Mat::Identity(2, 2);
  asym(0, 1) = 0.5;
  CHECK_THROWS_AS(Cholesky{asym}, NotPositiveDefinite);

  CHECK_THROWS_AS(Cholesky{Mat::Identity(2, 3)}, DimensionMismatch);
}

TEST_CASE("Rng streams are reproducible and distinct") {
  Rng a(1, Stream::kNoise), b(1, Stream::kNoise), c(1, Stream::kMeta);
  for (int i = 0; i < 10; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    CHECK(x != c.next_u64());
  }
  Rng u(2, Stream::kTest);
  for (int i = 0; i < 1000; ++i) {
    const double v = u.uniform();
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
    CHECK(u.below(7) < 7u);
  }
}
