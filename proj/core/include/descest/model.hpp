#ifndef DESCEST_MODEL_HPP
#define DESCEST_MODEL_HPP

#include <string>
#include <utility>
#include <vector>

#include "descest/linalg.hpp"

namespace descest {

/**
 * Discrete-time descriptor plant
 *
 *   F[k+1] x[k+1] - C[k] x[k] = f[k],   F[0] x[0] = q,
 *   y[k] = H[k] x[k] + g[k],            k = 0..N.
 *
 * Row counts may vary per step; F[k+1] and C[k] must agree row-wise and
 * every matrix has n columns.
 */
struct DescriptorModel {
  int n = 0;          ///< state dimension
  int steps = 0;      ///< horizon N
  std::vector<Mat> F;  ///< F[0..N]
  std::vector<Mat> C;  ///< C[0..N-1]
  std::vector<Mat> H;  ///< H[0..N]
  bool time_invariant = false;

  /// Convenience builder replicating single matrices over the horizon.
  static DescriptorModel constant(const Mat& F, const Mat& C, const Mat& H, int N);
};

/// Weights of the disturbance budget
/// G = (S q, q) + sum_i (S_i f_i, f_i) + (R_i g_i, g_i).
struct UncertaintyWeights {
  Mat S;
  std::vector<Mat> S_seq;  ///< S_0..S_{N-1}
  std::vector<Mat> R_seq;  ///< R_0..R_N

  static UncertaintyWeights constant(const Mat& S, const Mat& Si, const Mat& Ri, int N);
};

struct MeasurementSequence {
  std::vector<Vec> y;  ///< y[0..N]
};

struct Trajectory {
  std::vector<Vec> x;  ///< x[0..N]
};

struct DisturbanceRealization {
  Vec q;
  std::vector<Vec> f;  ///< f[0..N-1]
  std::vector<Vec> g;  ///< g[0..N]
};

/// Continuous-time descriptor plant d/dt F x = C(t) x + f on [t0, T] with
/// time-varying data sampled on K+1 uniform grid nodes.
struct ContinuousModel {
  Mat F;                ///< constant m x n
  std::vector<Mat> C;   ///< C(t_j), node samples
  std::vector<Mat> H;   ///< H(t_j)
  Mat Q0;               ///< weight on F x(t0)
  std::vector<Mat> Q1;  ///< weight on f(t), node samples
  std::vector<Mat> Q2;  ///< weight on noise, node samples
  double t0 = 0.0;
  double T = 1.0;
  std::vector<Vec> ell;  ///< direction l(t), node samples
};

/// Dimension/definiteness diagnostics; empty means the pair conforms.
std::vector<std::string> validate(const DescriptorModel& model,
                                  const UncertaintyWeights& w);

/// Evaluates the quadratic budget G on a disturbance realization.
double disturbance_cost(const UncertaintyWeights& w, const DisturbanceRealization& d);

/// Inverts the plant equations: q = F0 x0, f_k = F_{k+1} x_{k+1} - C_k x_k,
/// g_k = y_k - H_k x_k.
DisturbanceRealization residuals_of(const DescriptorModel& model,
                                    const Trajectory& x,
                                    const MeasurementSequence& y);

/// Forward simulation. Each step solves F_{k+1} x_{k+1} = C_k x_k + f_k by
/// minimum-norm particular solution plus the projection of x_free onto the
/// null space of F_{k+1}. Throws InfeasibleError on an unsolvable step.
std::pair<Trajectory, MeasurementSequence> simulate(const DescriptorModel& model,
                                                    const DisturbanceRealization& d,
                                                    const Vec& x_free);

}  // namespace descest

#endif
