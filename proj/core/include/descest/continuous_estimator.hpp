#ifndef DESCEST_CONTINUOUS_ESTIMATOR_HPP
#define DESCEST_CONTINUOUS_ESTIMATOR_HPP

#include <utility>
#include <vector>

#include "descest/model.hpp"

namespace descest {

/// Uniform grid with K+1 nodes on [t0, T].
struct Grid {
  double t0 = 0.0;
  double T = 1.0;
  int K = 2;

  double h() const { return (T - t0) / K; }
  double node(int j) const { return t0 + j * h(); }
};

/**
 * SVD of the constant descriptor matrix F and the induced 2x2 block
 * partition of left' * C(t) * right' at the numerical rank r:
 *
 *   C1: r x r,   C2: r x (n-r),   C3: (m-r) x r,   C4: (m-r) x (n-r).
 */
struct BlockDecomposition {
  SvdFactorization svd;
  int m = 0;  ///< rows of F
  int n = 0;  ///< cols of F
  int r = 0;  ///< rank of F
  std::vector<Mat> C1, C2, C3, C4;  ///< one entry per grid node
};

/// Two-point BVP solution on a grid. The a priori solver fills z, p, d,
/// u_hat and sigma2; the a posteriori solver fills x_hat (original
/// coordinates) and q (partitioned frame, [q1; q2]).
struct BvpSolution {
  Grid grid;
  std::vector<Vec> z;
  std::vector<Vec> p;
  Vec d;
  std::vector<Vec> u_hat;
  double sigma2 = 0.0;
  std::vector<Vec> x_hat;
  std::vector<Vec> q;
};

BlockDecomposition block_decompose(const ContinuousModel& model);

/**
 * Range-closedness test: samples epsilon on a log grid in (0, 1) and tracks
 * sup over grid nodes of || (eps^2 I + C4' C4)^{-1} C2' ||. Divergence as
 * eps -> 0 (ratio between the two smallest samples above 10) means the test
 * fails. Returns {holds, largest sampled sup}.
 */
std::pair<bool, double> check_condition_a(const BlockDecomposition& blocks,
                                          int eps_samples = 50);

/**
 * A priori minimax estimator: solves the discretized two-point BVP
 *
 *   d/dt F'z = -C'(t) z + H'(t) Q2(t) H(t) p - l(t)
 *   d/dt F p =  C(t) p + Q1(t)^{-1} z
 *   F'z(T) = 0,  F p(t0) = Q0^{-1} (F F^+ z(t0) + d),  F'd = 0
 *
 * with an implicit-midpoint stencil assembled as one sparse system, then
 * u_hat = Q2 H p and sigma2 = integral of (l, p) by the trapezoid rule.
 */
BvpSolution apriori_solve(const ContinuousModel& model, const Grid& grid);

/**
 * A posteriori minimax estimator under the identity-weight, full-state
 * normalization y(t) = x(t) + eta(t). Solves the coupled (x1, q1) BVP in
 * the SVD frame, recovers x2 and q2 pointwise, and returns x_hat rotated
 * back to original coordinates.
 */
BvpSolution aposteriori_solve(const ContinuousModel& model,
                              const std::vector<Vec>& y, const Grid& grid);

/// Trapezoid-rule integral of (l(t), x_hat(t)).
double functional_estimate(const BvpSolution& sol, const std::vector<Vec>& ell);

}  // namespace descest

#endif
