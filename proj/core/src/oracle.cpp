#include "descest/oracle.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace descest {
namespace oracle {

StackedSolution stacked_minimize(const DescriptorModel& model,
                                 const UncertaintyWeights& w,
                                 const MeasurementSequence& y) {
  const int n = model.n;
  const int N = model.steps;
  if (static_cast<int>(y.y.size()) != N + 1) {
    throw ContractViolation("stacked_minimize: need N+1 measurements");
  }
  const int M = n * (N + 1);

  // J(x) = x' A x - 2 b' x + c
  Mat A = Mat::Zero(M, M);
  Vec b = Vec::Zero(M);
  double c = 0.0;

  auto blk = [n](int k) { return n * k; };

  A.block(blk(0), blk(0), n, n) += model.F[0].transpose() * w.S * model.F[0];

  for (int i = 0; i < N; ++i) {
    const Mat& F = model.F[i + 1];
    const Mat& C = model.C[i];
    const Mat& Si = w.S_seq[i];
    Mat FSF = F.transpose() * Si * F;
    Mat CSC = C.transpose() * Si * C;
    Mat CSF = C.transpose() * Si * F;
    A.block(blk(i + 1), blk(i + 1), n, n) += FSF;
    A.block(blk(i), blk(i), n, n) += CSC;
    A.block(blk(i), blk(i + 1), n, n) -= CSF;
    A.block(blk(i + 1), blk(i), n, n) -= CSF.transpose();
  }

  for (int i = 0; i <= N; ++i) {
    const Mat& H = model.H[i];
    const Mat& R = w.R_seq[i];
    if (y.y[i].size() != H.rows()) {
      throw ContractViolation("stacked_minimize: measurement dimension mismatch at i=" +
                              std::to_string(i));
    }
    A.block(blk(i), blk(i), n, n) += H.transpose() * R * H;
    b.segment(blk(i), n) += H.transpose() * R * y.y[i];
    c += y.y[i].dot(R * y.y[i]);
  }

  A = 0.5 * (A + A.transpose());

  StackedSolution s;
  s.n = n;
  s.N = N;
  s.x_stack = pinv(A) * b;
  s.min_cost = std::max(0.0, c - b.dot(s.x_stack));

  if (N == 0) {
    s.marginal_Q = A;
    s.marginal_alpha = c;
    s.marginal_center = s.x_stack;
  } else {
    const int head = n * N;
    Mat A11 = A.topLeftCorner(head, head);
    Mat A12 = A.topRightCorner(head, n);
    Mat A22 = A.bottomRightCorner(n, n);
    Vec b1 = b.head(head);
    Vec b2 = b.tail(n);
    Mat A11_pinv = pinv(A11);
    s.marginal_Q = A22 - A12.transpose() * A11_pinv * A12;
    s.marginal_Q = 0.5 * (s.marginal_Q + s.marginal_Q.transpose());
    Vec b_marg = b2 - A12.transpose() * A11_pinv * b1;
    s.marginal_alpha = c - b1.dot(A11_pinv * b1);
    s.marginal_center = pinv(s.marginal_Q) * b_marg;
  }
  return s;
}

double marginal_form(const StackedSolution& s, const Vec& x) {
  if (x.size() != s.n) throw ContractViolation("marginal_form: dimension mismatch");
  Vec b = s.marginal_Q * s.marginal_center;
  return x.dot(s.marginal_Q * x) - 2.0 * b.dot(x) + s.marginal_alpha;
}

DirectionalInterval direction_interval(const StackedSolution& s, const Vec& ell) {
  if (ell.size() != s.n) throw ContractViolation("direction_interval: dimension mismatch");
  DirectionalInterval iv;
  const double inf = std::numeric_limits<double>::infinity();
  if (ell.isZero(0.0)) {
    return iv;  // [0, 0]
  }
  Mat Q_pinv = pinv(s.marginal_Q);
  Vec proj = Q_pinv * (s.marginal_Q * ell);
  if ((proj - ell).norm() > 1e-8 * ell.norm()) {
    iv.lo = -inf;
    iv.hi = inf;
    return iv;
  }
  double center = ell.dot(s.marginal_center);
  double slack = std::max(0.0, 1.0 - s.min_cost);
  double hw = std::sqrt(slack * std::max(0.0, ell.dot(Q_pinv * ell)));
  iv.lo = center - hw;
  iv.hi = center + hw;
  return iv;
}

double sampled_radius(const Ellipsoid& e, int samples, std::uint64_t seed) {
  if (samples < 1) throw ContractViolation("sampled_radius: samples must be >= 1");
  const int n = static_cast<int>(e.Q.rows());
  SymEig eig = eig_sym(e.Q);
  if (eig.values(n - 1) <= 0.0) {
    throw ContractViolation("sampled_radius: ellipsoid form must be positive definite");
  }
  // (Q (x - c), x - c) <= slack; boundary via x = c + sqrt(slack) Q^{-1/2} u.
  double slack = std::max(0.0, 1.0 - e.alpha + e.center.dot(e.Q * e.center));
  Mat inv_sqrt = eig.vectors *
                 eig.values.array().pow(-0.5).matrix().asDiagonal() *
                 eig.vectors.transpose();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double best = 0.0;
  for (int s = 0; s < samples; ++s) {
    Vec u(n);
    do {
      for (int i = 0; i < n; ++i) u(i) = gauss(rng);
    } while (u.norm() == 0.0);
    u.normalize();
    double dist = std::sqrt(slack) * (inv_sqrt * u).norm();
    best = std::max(best, dist);
  }
  return best;
}

}  // namespace oracle
}  // namespace descest
