#include <doctest.h>

#include <cmath>

#include "descest/oracle.hpp"
#include "test_util.hpp"

using namespace descest;
using namespace descest::testutil;
using namespace descest::oracle;

namespace {

Mat scalar(double v) {
  Mat m(1, 1);
  m(0, 0) = v;
  return m;
}

Vec scalar_vec(double v) {
  Vec x(1);
  x(0) = v;
  return x;
}

}  // namespace

TEST_CASE("stacked minimizer of the worked scalar chain") {
  auto model = DescriptorModel::constant(scalar(1), scalar(1), scalar(1), 1);
  auto w = UncertaintyWeights::constant(scalar(1), scalar(1), scalar(1), 1);
  MeasurementSequence y{{scalar_vec(0), scalar_vec(1)}};
  StackedSolution s = stacked_minimize(model, w, y);

  CHECK(s.x_stack(0) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(s.x_stack(1) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(s.min_cost == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(s.marginal_Q(0, 0) == doctest::Approx(5.0 / 3.0).epsilon(1e-12));
  CHECK(s.marginal_center(0) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(s.marginal_alpha == doctest::Approx(1.0).epsilon(1e-12));

  DirectionalInterval iv = direction_interval(s, scalar_vec(1));
  CHECK(iv.lo == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(iv.hi == doctest::Approx(1.2).epsilon(1e-12));
}

TEST_CASE("zero measurements give the zero minimizer") {
  auto model = DescriptorModel::constant(scalar(1), scalar(1), scalar(1), 3);
  auto w = UncertaintyWeights::constant(scalar(1), scalar(1), scalar(1), 3);
  MeasurementSequence y{{scalar_vec(0), scalar_vec(0), scalar_vec(0), scalar_vec(0)}};
  StackedSolution s = stacked_minimize(model, w, y);
  CHECK(s.x_stack.norm() == doctest::Approx(0.0));
  CHECK(s.min_cost == doctest::Approx(0.0));
}

TEST_CASE("single-step problem minimizes x^2 + (1-x)^2") {
  auto model = DescriptorModel::constant(scalar(1), scalar(1), scalar(1), 0);
  auto w = UncertaintyWeights::constant(scalar(1), scalar(1), scalar(1), 0);
  MeasurementSequence y{{scalar_vec(1)}};
  StackedSolution s = stacked_minimize(model, w, y);
  CHECK(s.x_stack(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(s.min_cost == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("Schur consistency: marginal form equals the partial minimum of J") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    int n = 1 + static_cast<int>(rng() % 3);
    int N = 1 + static_cast<int>(rng() % 5);
    DescriptorModel model;
    model.n = n;
    model.steps = N;
    for (int k = 0; k <= N; ++k) {
      model.F.push_back(random_matrix(rng, n, n));
      model.H.push_back(random_matrix(rng, n, n));
    }
    for (int k = 0; k < N; ++k) model.C.push_back(random_matrix(rng, n, n));
    UncertaintyWeights w;
    w.S = random_spd(rng, n);
    for (int k = 0; k < N; ++k) w.S_seq.push_back(random_spd(rng, n));
    for (int k = 0; k <= N; ++k) w.R_seq.push_back(random_spd(rng, n));
    MeasurementSequence y;
    for (int k = 0; k <= N; ++k) y.y.push_back(0.3 * random_vector(rng, n));

    StackedSolution s = stacked_minimize(model, w, y);

    auto stacked_cost = [&](const Vec& xs) {
      double c = (w.S.llt().matrixL().transpose() * (model.F[0] * xs.head(n))).squaredNorm();
      Vec q = model.F[0] * xs.head(n);
      c = q.dot(w.S * q);
      for (int i = 0; i < N; ++i) {
        Vec f = model.F[i + 1] * xs.segment(n * (i + 1), n) - model.C[i] * xs.segment(n * i, n);
        c += f.dot(w.S_seq[i] * f);
      }
      for (int i = 0; i <= N; ++i) {
        Vec g = y.y[i] - model.H[i] * xs.segment(n * i, n);
        c += g.dot(w.R_seq[i] * g);
      }
      return c;
    };

    for (int rep = 0; rep < 10; ++rep) {
      Vec xN = random_vector(rng, n);
      // minimize J over x_0..x_{N-1} at fixed x_N, by direct dense solve
      const int head = n * N;
      const int M = n * (N + 1);
      Mat A = Mat::Zero(M, M);
      Vec b = Vec::Zero(M);
      A.block(0, 0, n, n) += model.F[0].transpose() * w.S * model.F[0];
      for (int i = 0; i < N; ++i) {
        const Mat& F = model.F[i + 1];
        const Mat& C = model.C[i];
        const Mat& Si = w.S_seq[i];
        A.block(n * (i + 1), n * (i + 1), n, n) += F.transpose() * Si * F;
        A.block(n * i, n * i, n, n) += C.transpose() * Si * C;
        A.block(n * i, n * (i + 1), n, n) -= C.transpose() * Si * F;
        A.block(n * (i + 1), n * i, n, n) -= F.transpose() * Si * C;
      }
      for (int i = 0; i <= N; ++i) {
        A.block(n * i, n * i, n, n) += model.H[i].transpose() * w.R_seq[i] * model.H[i];
        b.segment(n * i, n) += model.H[i].transpose() * w.R_seq[i] * y.y[i];
      }
      Mat A11 = A.topLeftCorner(head, head);
      Vec rhs = b.head(head) - A.topRightCorner(head, n) * xN;
      Vec x_head = pinv(A11) * rhs;
      Vec full(M);
      full.head(head) = x_head;
      full.tail(n) = xN;
      double direct = stacked_cost(full);
      double marg = marginal_form(s, xN);
      CHECK(std::abs(direct - marg) <= 1e-9 * (1.0 + std::abs(direct)));
    }

    // the marginal form at its own center reproduces the global minimum
    CHECK(std::abs(marginal_form(s, s.marginal_center) - s.min_cost) <=
          1e-10 * (1.0 + s.min_cost));
  }
}

TEST_CASE("boundary-feasible data collapses the interval") {
  auto model = DescriptorModel::constant(scalar(1), scalar(1), scalar(1), 0);
  auto w = UncertaintyWeights::constant(scalar(1), scalar(1), scalar(1), 0);
  MeasurementSequence y{{scalar_vec(std::sqrt(2.0))}};  // min cost = 1 exactly
  StackedSolution s = stacked_minimize(model, w, y);
  CHECK(s.min_cost == doctest::Approx(1.0));
  DirectionalInterval iv = direction_interval(s, scalar_vec(1));
  CHECK(iv.hi - iv.lo <= 1e-7);
}

TEST_CASE("null-space directions give the unbounded interval") {
  // H = diag(1, 0) with F = I, N = 0: second coordinate is unobserved.
  Mat H = Mat::Zero(2, 2);
  H(0, 0) = 1.0;
  DescriptorModel model = DescriptorModel::constant(Mat::Identity(2, 2),
                                                    Mat::Identity(2, 2), H, 0);
  UncertaintyWeights w;
  w.S = Mat::Zero(2, 2);
  w.S(0, 0) = 1.0;  // PSD but flat along e2
  w.R_seq.push_back(Mat::Identity(2, 2));
  MeasurementSequence y{{Vec{{1.0, 0.0}}}};
  StackedSolution s = stacked_minimize(model, w, y);
  DirectionalInterval iv = direction_interval(s, Vec{{0.0, 1.0}});
  CHECK(std::isinf(iv.lo));
  CHECK(std::isinf(iv.hi));
}

TEST_CASE("sampled radius of simple ellipsoids") {
  Ellipsoid disk;
  disk.Q = Mat::Identity(2, 2);
  disk.center = Vec::Zero(2);
  disk.alpha = 0.0;
  disk.radius = 1.0;
  double r = sampled_radius(disk, 10000);
  CHECK(r <= 1.0 + 1e-12);
  CHECK(r >= 0.999);

  Ellipsoid stretched;
  stretched.Q = Vec{{4.0, 1.0}}.asDiagonal();
  stretched.center = Vec::Zero(2);
  stretched.alpha = 0.0;  // level set {4x^2 + y^2 <= 1}
  double r2 = sampled_radius(stretched, 10000);
  CHECK(r2 <= 1.0 + 1e-12);
  CHECK(r2 >= 0.99);

  Ellipsoid degenerate = disk;
  degenerate.alpha = 1.0;  // zero slack, single point
  CHECK(sampled_radius(degenerate, 1000) == doctest::Approx(0.0));
}

TEST_CASE("sampled radius is deterministic in the seed") {
  Ellipsoid disk;
  disk.Q = Mat::Identity(3, 3);
  disk.center = Vec::Zero(3);
  disk.alpha = 0.0;
  CHECK(sampled_radius(disk, 500, 42) == sampled_radius(disk, 500, 42));
}
