#include <benchmark/benchmark.h>

#include <random>

#include "descest/continuous_estimator.hpp"
#include "descest/discrete_estimator.hpp"
#include "descest/linalg.hpp"
#include "descest/model.hpp"

using namespace descest;

namespace {

Mat random_matrix(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat M(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) M(i, j) = g(rng);
  return M;
}

void BM_pinv(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(1);
  Mat A = random_matrix(rng, n, n / 2) * random_matrix(rng, n / 2, n);
  for (auto _ : state) benchmark::DoNotOptimize(pinv(A));
}
BENCHMARK(BM_pinv)->Arg(8)->Arg(32)->Arg(128);

void BM_filter_step(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(2);
  auto model = DescriptorModel::constant(random_matrix(rng, n, n),
                                         random_matrix(rng, n, n),
                                         random_matrix(rng, n, n), 2);
  auto w = UncertaintyWeights::constant(Mat::Identity(n, n), Mat::Identity(n, n),
                                        Mat::Identity(n, n), 2);
  Vec y0 = Vec::Zero(n);
  Vec y1 = Vec::Ones(n) * 0.1;
  EstimatorState s0 = init(model, w, y0);
  for (auto _ : state) benchmark::DoNotOptimize(step(s0, model, w, y1));
}
BENCHMARK(BM_filter_step)->Arg(4)->Arg(16)->Arg(64);

void BM_apriori_solve(benchmark::State& state) {
  const int K = static_cast<int>(state.range(0));
  ContinuousModel m;
  m.F = Mat::Identity(1, 1);
  m.C.assign(K + 1, Mat::Zero(1, 1));
  m.H.assign(K + 1, Mat::Identity(1, 1));
  m.Q0 = Mat::Identity(1, 1);
  m.Q1.assign(K + 1, Mat::Identity(1, 1));
  m.Q2.assign(K + 1, Mat::Identity(1, 1));
  m.ell.assign(K + 1, Vec::Ones(1));
  Grid grid{0.0, 1.0, K};
  for (auto _ : state) benchmark::DoNotOptimize(apriori_solve(m, grid));
}
BENCHMARK(BM_apriori_solve)->Arg(100)->Arg(400)->Arg(1600);

}  // namespace

BENCHMARK_MAIN();
