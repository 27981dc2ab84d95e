#include "driftbandit/numerics.hpp"

#include <cmath>
#include <string>

#include "driftbandit/errors.hpp"

namespace driftbandit {

namespace {

constexpr double kSymmetryTol = 1e-12;

void check_symmetric(const Mat& a) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw DimensionMismatch("matrix must be square and non-empty, got " +
                            std::to_string(a.rows()) + "x" +
                            std::to_string(a.cols()));
  }
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < a.cols(); ++j) {
      if (std::abs(a(i, j) - a(j, i)) > kSymmetryTol * scale) {
        throw NotPositiveDefinite("matrix is not symmetric");
      }
    }
  }
}

}  // namespace

Cholesky::Cholesky(const Mat& a) {
  check_symmetric(a);
  if (!a.allFinite()) throw NotPositiveDefinite("matrix has non-finite entries");
  llt_.compute(a);
  if (llt_.info() != Eigen::Success) {
    throw NotPositiveDefinite("Cholesky pivot <= 0");
  }
  // Eigen accepts tiny positive pivots produced by cancellation; treat a
  // non-positive or non-finite diagonal of L as failure as well.
  const auto diag = llt_.matrixLLT().diagonal();
  for (Eigen::Index i = 0; i < diag.size(); ++i) {
    if (!(diag(i) > 0.0) || !std::isfinite(diag(i))) {
      throw NotPositiveDefinite("Cholesky pivot <= 0");
    }
  }
}

Vec Cholesky::solve(const Vec& b) const {
  if (b.size() != llt_.rows()) {
    throw DimensionMismatch("rhs has dimension " + std::to_string(b.size()) +
                            ", matrix has " + std::to_string(llt_.rows()));
  }
  return llt_.solve(b);
}

double Cholesky::quad_norm(const Vec& x) const {
  if (x.size() != llt_.rows()) {
    throw DimensionMismatch("vector has dimension " + std::to_string(x.size()) +
                            ", matrix has " + std::to_string(llt_.rows()));
  }
  return llt_.matrixL().solve(x).norm();
}

double Cholesky::logdet() const {
  return 2.0 * llt_.matrixLLT().diagonal().array().log().sum();
}

Vec spd_solve(const Mat& a, const Vec& b) { return Cholesky(a).solve(b); }

double quad_norm(const Mat& a, const Vec& x) {
  return Cholesky(a).quad_norm(x);
}

double logdet(const Mat& a) { return Cholesky(a).logdet(); }

}  // namespace driftbandit
