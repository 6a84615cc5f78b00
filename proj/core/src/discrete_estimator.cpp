#include "descest/discrete_estimator.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace descest {

namespace {

constexpr double kBracketClamp = -1e-9;

/// 1 - alpha + (Q^+ r, r); clamped at zero for boundary-feasible roundoff,
/// an error further below (the measurement record is inconsistent with the
/// disturbance budget).
double feasibility_bracket(const EstimatorState& s, const Vec& q_pinv_r) {
  double bracket = 1.0 - s.alpha + q_pinv_r.dot(s.r);
  if (bracket < kBracketClamp) {
    throw InfeasibleError(
        "measurement record infeasible: 1 - alpha_N + (Q^+ r, r) = " +
        std::to_string(bracket));
  }
  return std::max(bracket, 0.0);
}

}  // namespace

EstimatorState init(const DescriptorModel& model, const UncertaintyWeights& w,
                    const Vec& y0, const EstimatorOptions&) {
  if (model.F.empty() || model.H.empty() || w.R_seq.empty()) {
    throw ContractViolation("init: empty model or weights");
  }
  const Mat& F0 = model.F[0];
  const Mat& H0 = model.H[0];
  const Mat& R0 = w.R_seq[0];
  if (F0.cols() != model.n || H0.cols() != model.n) {
    throw ContractViolation("init: F0/H0 must have n columns");
  }
  if (w.S.rows() != F0.rows() || R0.rows() != H0.rows() || y0.size() != H0.rows()) {
    throw ContractViolation("init: weight or measurement dimension mismatch");
  }

  EstimatorState s;
  s.k = 0;
  s.n = model.n;
  s.Q = F0.transpose() * w.S * F0 + H0.transpose() * R0 * H0;
  s.r = H0.transpose() * R0 * y0;
  // The initial-residual reference is fixed at zero, so alpha_0 reduces to
  // the measurement term.
  s.alpha = y0.dot(R0 * y0);
  if (model.steps >= 1) {
    s.P = s.Q + model.C[0].transpose() * w.S_seq[0] * model.C[0];
  }
  return s;
}

EstimatorState step(const EstimatorState& state, const DescriptorModel& model,
                    const UncertaintyWeights& w, const Vec& y_next,
                    const EstimatorOptions& opt) {
  const int k = state.k;
  if (k >= model.steps) throw ContractViolation("step: past the model horizon");
  const Mat& F = model.F[k + 1];
  const Mat& C = model.C[k];
  const Mat& H = model.H[k + 1];
  const Mat& Sk = w.S_seq[k];
  const Mat& R = w.R_seq[k + 1];
  if (y_next.size() != H.rows()) throw ContractViolation("step: measurement dimension mismatch");
  if (Sk.rows() != F.rows() || C.rows() != F.rows()) {
    throw ContractViolation("step: weight/plant dimension mismatch at k=" + std::to_string(k));
  }

  Mat P_pinv = pinv(state.P, opt.rank_tol);
  Mat SC = Sk * C;

  EstimatorState next;
  next.k = k + 1;
  next.n = state.n;
  next.Q = H.transpose() * R * H +
           F.transpose() * (Sk - SC * P_pinv * SC.transpose()) * F;
  next.Q = 0.5 * (next.Q + next.Q.transpose());
  Vec Pr = P_pinv * state.r;
  next.r = F.transpose() * SC * Pr + H.transpose() * R * y_next;
  next.alpha = state.alpha + y_next.dot(R * y_next) - Pr.dot(state.r);
  if (next.k < model.steps) {
    next.P = next.Q + model.C[next.k].transpose() * w.S_seq[next.k] * model.C[next.k];
  } else {
    next.P = next.Q;
  }
  return next;
}

EstimatorState run_filter(const DescriptorModel& model, const UncertaintyWeights& w,
                          const MeasurementSequence& y, const EstimatorOptions& opt) {
  if (static_cast<int>(y.y.size()) != model.steps + 1) {
    throw ContractViolation("run_filter: need N+1 measurements");
  }
  EstimatorState s = init(model, w, y.y[0], opt);
  for (int k = 0; k < model.steps; ++k) {
    s = step(s, model, w, y.y[k + 1], opt);
  }
  return s;
}

MinimaxEstimate estimate(const EstimatorState& state, const Vec& ell,
                         const EstimatorOptions& opt) {
  if (ell.size() != state.n) throw ContractViolation("estimate: direction dimension mismatch");

  MinimaxEstimate out;
  if (ell.isZero(0.0)) {
    out.observable = true;
    return out;
  }

  Mat Q_pinv = pinv(state.Q, opt.rank_tol);
  Vec proj = Q_pinv * (state.Q * ell);
  out.observable = (proj - ell).norm() <= opt.obs_tol * ell.norm();
  if (!out.observable) {
    out.value = 0.0;
    out.error = std::numeric_limits<double>::infinity();
    return out;
  }

  Vec q_pinv_r = Q_pinv * state.r;
  out.value = ell.dot(q_pinv_r);
  double bracket = feasibility_bracket(state, q_pinv_r);
  out.error = std::sqrt(bracket) * std::sqrt(std::max(ell.dot(Q_pinv * ell), 0.0));
  return out;
}

int noncausality_index(const EstimatorState& state, const EstimatorOptions& opt) {
  return static_cast<int>(numerical_rank(state.Q, opt.rank_tol));
}

Ellipsoid posterior_ellipsoid(const EstimatorState& state, const EstimatorOptions& opt) {
  Ellipsoid e;
  e.Q = state.Q;
  e.alpha = state.alpha;
  Mat Q_pinv = pinv(state.Q, opt.rank_tol);
  Vec q_pinv_r = Q_pinv * state.r;
  e.center = q_pinv_r;
  double bracket = feasibility_bracket(state, q_pinv_r);

  if (noncausality_index(state, opt) < state.n) {
    e.radius = std::numeric_limits<double>::infinity();
    return e;
  }
  SymEig eig = eig_sym(state.Q);
  double lambda_min = eig.values(eig.values.size() - 1);
  e.radius = std::sqrt(bracket) / std::sqrt(lambda_min);
  return e;
}

}  // namespace descest
