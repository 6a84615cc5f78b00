#ifndef DESCEST_LINALG_HPP
#define DESCEST_LINALG_HPP

#include <Eigen/Dense>

#include "descest/errors.hpp"

namespace descest {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Index = Eigen::Index;

/**
 * Full SVD of a real matrix, A = left * lambda * right, where left (m x m)
 * and right (n x n) are orthogonal and lambda (m x n) carries the singular
 * values on its leading diagonal, non-increasing, zero past `rank`.
 *
 * Note right is the transpose of the usual V factor, so the product
 * left * lambda * right reconstructs A directly.
 */
struct SvdFactorization {
  Mat left;    ///< m x m orthogonal
  Mat lambda;  ///< m x n, diagonal singular values
  Mat right;   ///< n x n orthogonal
  Index rank;  ///< numerical rank
};

struct SymEig {
  Vec values;   ///< eigenvalues, non-increasing
  Mat vectors;  ///< orthonormal eigenvectors, column i pairs with values[i]
};

/// Singular values at or below this threshold are treated as zero.
/// tol <= 0 selects the default max(m,n) * eps relative threshold.
double rank_threshold(const Mat& singular_values_or_A, double sigma_max, double tol);

SvdFactorization svd_factor(const Mat& A, double tol = 0.0);

/// Moore-Penrose pseudoinverse via svd_factor.
Mat pinv(const Mat& A, double tol = 0.0);

/// Numerical rank under a relative singular-value threshold.
Index numerical_rank(const Mat& A, double tol = 0.0);

/// Eigendecomposition of (A + A') / 2. Throws ContractViolation for
/// non-square input.
SymEig eig_sym(const Mat& A);

/// Cholesky solve; throws NumericalError if A is not SPD.
Vec solve_spd(const Mat& A, const Vec& b);

}  // namespace descest

#endif
