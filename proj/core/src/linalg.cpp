#include "descest/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace descest {

namespace {

void require_finite(const Mat& A, const char* who) {
  if (!A.allFinite()) {
    throw ContractViolation(std::string(who) + ": non-finite entries in input");
  }
}

}  // namespace

double rank_threshold(const Mat& A, double sigma_max, double tol) {
  if (tol > 0.0) return tol * sigma_max;
  const double eps = std::numeric_limits<double>::epsilon();
  return static_cast<double>(std::max(A.rows(), A.cols())) * eps * sigma_max;
}

SvdFactorization svd_factor(const Mat& A, double tol) {
  require_finite(A, "svd_factor");
  if (tol < 0.0) throw ContractViolation("svd_factor: tol must be >= 0");

  Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.info() != Eigen::Success) {
    throw NumericalError("svd_factor: decomposition did not converge");
  }

  SvdFactorization f;
  f.left = svd.matrixU();
  f.right = svd.matrixV().transpose();
  f.lambda = Mat::Zero(A.rows(), A.cols());

  const Vec& sv = svd.singularValues();
  const double sigma_max = sv.size() > 0 ? sv(0) : 0.0;
  const double thr = rank_threshold(A, sigma_max, tol);

  f.rank = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > thr) {
      f.lambda(i, i) = sv(i);
      ++f.rank;
    }
  }
  return f;
}

Mat pinv(const Mat& A, double tol) {
  SvdFactorization f = svd_factor(A, tol);
  Mat lambda_pinv = Mat::Zero(A.cols(), A.rows());
  for (Index i = 0; i < f.rank; ++i) {
    lambda_pinv(i, i) = 1.0 / f.lambda(i, i);
  }
  // A+ = right' * lambda+ * left'
  return f.right.transpose() * lambda_pinv * f.left.transpose();
}

Index numerical_rank(const Mat& A, double tol) {
  return svd_factor(A, tol).rank;
}

SymEig eig_sym(const Mat& A) {
  require_finite(A, "eig_sym");
  if (A.rows() != A.cols()) {
    throw ContractViolation("eig_sym: matrix must be square");
  }
  Mat sym = 0.5 * (A + A.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(sym);
  if (es.info() != Eigen::Success) {
    throw NumericalError("eig_sym: eigendecomposition did not converge");
  }
  // Eigen reports ascending order; flip to non-increasing.
  SymEig out;
  out.values = es.eigenvalues().reverse();
  out.vectors = es.eigenvectors().rowwise().reverse();
  return out;
}

Vec solve_spd(const Mat& A, const Vec& b) {
  require_finite(A, "solve_spd");
  if (A.rows() != A.cols() || A.rows() != b.size()) {
    throw ContractViolation("solve_spd: dimension mismatch");
  }
  Eigen::LLT<Mat> llt(A);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("solve_spd: matrix is not positive definite");
  }
  return llt.solve(b);
}

}  // namespace descest
