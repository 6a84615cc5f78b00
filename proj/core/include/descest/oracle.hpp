#ifndef DESCEST_ORACLE_HPP
#define DESCEST_ORACLE_HPP

#include <cstdint>

#include "descest/discrete_estimator.hpp"
#include "descest/model.hpp"

namespace descest {
namespace oracle {

/**
 * Brute-force reference solution: minimizes the stacked disturbance cost
 *
 *   J(x_0..x_N) = (S F0 x0, F0 x0)
 *               + sum_i (S_i (F_{i+1} x_{i+1} - C_i x_i), .)
 *               + sum_i (R_i (y_i - H_i x_i), .)
 *
 * over all trajectories at once, by dense normal equations and
 * pseudoinverse (minimum-norm minimizer on flat directions). The marginal
 * quadratic form in x_N comes from the Schur complement over x_0..x_{N-1}.
 *
 * Deliberately independent of the recursive estimator: nothing here touches
 * the Q/r/alpha recursions.
 */
struct StackedSolution {
  Vec x_stack;          ///< all of x_0..x_N concatenated
  double min_cost = 0;  ///< minimum of J
  Mat marginal_Q;       ///< quadratic coefficient of the marginal form in x_N
  Vec marginal_center;  ///< minimizer of the marginal form
  double marginal_alpha = 0;  ///< constant term of the marginal form
  int n = 0;
  int N = 0;
};

struct DirectionalInterval {
  double lo = 0;
  double hi = 0;
};

StackedSolution stacked_minimize(const DescriptorModel& model,
                                 const UncertaintyWeights& w,
                                 const MeasurementSequence& y);

/// Evaluates the marginal form at an arbitrary x_N:
/// (Q x, x) - 2 (b, x) + alpha with b = Q * center adjusted for flat parts.
double marginal_form(const StackedSolution& s, const Vec& x);

/// Interval {(l, x_N) : marginal form <= 1}; unbounded when l has a
/// component in the null space of the marginal form.
DirectionalInterval direction_interval(const StackedSolution& s, const Vec& ell);

/// Monte-Carlo lower bound on the Chebyshev radius: max distance from the
/// center over boundary samples of the ellipsoid. Deterministic in seed.
double sampled_radius(const Ellipsoid& e, int samples, std::uint64_t seed = 12345);

}  // namespace oracle
}  // namespace descest

#endif
