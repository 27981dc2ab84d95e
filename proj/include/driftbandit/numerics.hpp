#pragma once

#include <Eigen/Dense>

namespace driftbandit {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Cholesky factor of a symmetric positive definite matrix.
///
/// Construction throws NotPositiveDefinite when a pivot is not strictly
/// positive or the input is not symmetric, and DimensionMismatch when it is
/// not square. A factor is immutable and may be shared between threads.
class Cholesky {
 public:
  explicit Cholesky(const Mat& a);

  int dim() const { return static_cast<int>(llt_.rows()); }

  Vec solve(const Vec& b) const;

  /// sqrt(x^T A^{-1} x), evaluated as ||L^{-1} x||.
  double quad_norm(const Vec& x) const;

  double logdet() const;

 private:
  Eigen::LLT<Mat> llt_;
};

Vec spd_solve(const Mat& a, const Vec& b);
double quad_norm(const Mat& a, const Vec& x);
double logdet(const Mat& a);

}  // namespace driftbandit
