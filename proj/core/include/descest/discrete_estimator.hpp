#ifndef DESCEST_DISCRETE_ESTIMATOR_HPP
#define DESCEST_DISCRETE_ESTIMATOR_HPP

#include <vector>

#include "descest/model.hpp"

namespace descest {

/// Tolerances shared by the recursion and its diagnostics. rank_tol <= 0
/// selects the default relative singular-value threshold.
struct EstimatorOptions {
  double rank_tol = 0.0;
  double obs_tol = 1e-8;
};

/// Running state (Q_k, P_k, r_k, alpha_k) of the recursive a posteriori
/// estimator. Immutable value; step() returns a new state.
struct EstimatorState {
  int k = 0;
  int n = 0;
  Mat Q;      ///< n x n, symmetric PSD
  Mat P;      ///< Q + C_k' S_k C_k, present while k < N
  Vec r;
  double alpha = 0.0;
};

struct MinimaxEstimate {
  double value = 0.0;      ///< (l, Q_N^+ r_N)
  double error = 0.0;      ///< worst-case error, +inf if unobservable
  bool observable = false; ///< Q_N^+ Q_N l = l within tolerance
};

/// A posteriori set {x : (Q x, x) - 2 (Q center, x) + alpha <= 1}.
struct Ellipsoid {
  Mat Q;
  Vec center;
  double alpha = 0.0;
  double radius = 0.0;  ///< Chebyshev radius, +inf unless Q is PD
};

EstimatorState init(const DescriptorModel& model, const UncertaintyWeights& w,
                    const Vec& y0, const EstimatorOptions& opt = {});

EstimatorState step(const EstimatorState& state, const DescriptorModel& model,
                    const UncertaintyWeights& w, const Vec& y_next,
                    const EstimatorOptions& opt = {});

/// Runs init + N steps over a full measurement record.
EstimatorState run_filter(const DescriptorModel& model, const UncertaintyWeights& w,
                          const MeasurementSequence& y, const EstimatorOptions& opt = {});

/// Minimax estimate of (l, x_N) with its guaranteed error. Unobservable
/// directions get value 0 and error +inf.
MinimaxEstimate estimate(const EstimatorState& state, const Vec& ell,
                         const EstimatorOptions& opt = {});

/// Index of noncausality I_N = rank(Q_N); the model is causal at N iff
/// the index equals n.
int noncausality_index(const EstimatorState& state, const EstimatorOptions& opt = {});

/// Set-valued output: center Q^+ r and Chebyshev radius
/// sqrt(1 - alpha + (Q c, c)) / sqrt(lambda_min).
Ellipsoid posterior_ellipsoid(const EstimatorState& state, const EstimatorOptions& opt = {});

}  // namespace descest

#endif
