#include "descest/model.hpp"

#include <cmath>
#include <sstream>

namespace descest {

namespace {

bool is_psd(const Mat& A, double tol = 1e-10) {
  if (A.rows() != A.cols()) return false;
  SymEig e = eig_sym(A);
  double scale = std::max(1.0, std::abs(e.values.size() ? e.values(0) : 0.0));
  return e.values.size() == 0 || e.values.minCoeff() >= -tol * scale;
}

bool is_pd(const Mat& A, double tol = 1e-12) {
  if (A.rows() != A.cols()) return false;
  SymEig e = eig_sym(A);
  return e.values.size() > 0 && e.values.minCoeff() > tol;
}

}  // namespace

DescriptorModel DescriptorModel::constant(const Mat& F, const Mat& C, const Mat& H, int N) {
  DescriptorModel m;
  m.n = static_cast<int>(F.cols());
  m.steps = N;
  m.F.assign(N + 1, F);
  m.C.assign(N, C);
  m.H.assign(N + 1, H);
  m.time_invariant = true;
  return m;
}

UncertaintyWeights UncertaintyWeights::constant(const Mat& S, const Mat& Si, const Mat& Ri, int N) {
  UncertaintyWeights w;
  w.S = S;
  w.S_seq.assign(N, Si);
  w.R_seq.assign(N + 1, Ri);
  return w;
}

std::vector<std::string> validate(const DescriptorModel& model, const UncertaintyWeights& w) {
  std::vector<std::string> diags;
  auto add = [&diags](const std::string& s) { diags.push_back(s); };
  std::ostringstream os;

  const int N = model.steps;
  if (N < 0) add("horizon N must be >= 0");
  if (model.n <= 0) add("state dimension n must be positive");
  if (static_cast<int>(model.F.size()) != N + 1) add("F must have N+1 entries");
  if (static_cast<int>(model.C.size()) != N) add("C must have N entries");
  if (static_cast<int>(model.H.size()) != N + 1) add("H must have N+1 entries");
  if (!diags.empty()) return diags;

  for (int k = 0; k <= N; ++k) {
    if (model.F[k].cols() != model.n) {
      os.str(""); os << "F[" << k << "] must have n=" << model.n << " columns";
      add(os.str());
    }
    if (model.H[k].cols() != model.n) {
      os.str(""); os << "H[" << k << "] must have n=" << model.n << " columns";
      add(os.str());
    }
  }
  for (int k = 0; k < N; ++k) {
    if (model.C[k].cols() != model.n) {
      os.str(""); os << "C[" << k << "] must have n=" << model.n << " columns";
      add(os.str());
    }
    if (model.C[k].rows() != model.F[k + 1].rows()) {
      os.str(""); os << "C[" << k << "] and F[" << k + 1
                     << "] must have equal row counts (k=" << k << ")";
      add(os.str());
    }
  }

  if (w.S.rows() != model.F[0].rows() || w.S.cols() != model.F[0].rows()) {
    add("S must be square with the row count of F[0]");
  } else if (!is_psd(w.S)) {
    add("S must be symmetric positive semidefinite");
  }
  if (static_cast<int>(w.S_seq.size()) != N) add("S_seq must have N entries");
  if (static_cast<int>(w.R_seq.size()) != N + 1) add("R_seq must have N+1 entries");
  if (!diags.empty()) return diags;

  for (int k = 0; k < N; ++k) {
    Index rows = model.F[k + 1].rows();
    if (w.S_seq[k].rows() != rows || w.S_seq[k].cols() != rows) {
      os.str(""); os << "S_seq[" << k << "] must be " << rows << "x" << rows;
      add(os.str());
    } else if (!is_pd(w.S_seq[k])) {
      os.str(""); os << "S_seq[" << k << "] must be symmetric positive definite";
      add(os.str());
    }
  }
  for (int k = 0; k <= N; ++k) {
    Index rows = model.H[k].rows();
    if (w.R_seq[k].rows() != rows || w.R_seq[k].cols() != rows) {
      os.str(""); os << "R_seq[" << k << "] must be " << rows << "x" << rows;
      add(os.str());
    } else if (!is_pd(w.R_seq[k])) {
      os.str(""); os << "R_seq[" << k << "] must be symmetric positive definite";
      add(os.str());
    }
  }
  return diags;
}

double disturbance_cost(const UncertaintyWeights& w, const DisturbanceRealization& d) {
  if (w.S.cols() != d.q.size()) throw ContractViolation("disturbance_cost: q dimension mismatch");
  if (d.f.size() > w.S_seq.size() || d.g.size() > w.R_seq.size()) {
    throw ContractViolation("disturbance_cost: realization longer than weight sequences");
  }
  double cost = d.q.dot(w.S * d.q);
  for (std::size_t i = 0; i < d.f.size(); ++i) {
    if (w.S_seq[i].cols() != d.f[i].size()) {
      throw ContractViolation("disturbance_cost: f dimension mismatch at i=" + std::to_string(i));
    }
    cost += d.f[i].dot(w.S_seq[i] * d.f[i]);
  }
  for (std::size_t i = 0; i < d.g.size(); ++i) {
    if (w.R_seq[i].cols() != d.g[i].size()) {
      throw ContractViolation("disturbance_cost: g dimension mismatch at i=" + std::to_string(i));
    }
    cost += d.g[i].dot(w.R_seq[i] * d.g[i]);
  }
  return cost;
}

DisturbanceRealization residuals_of(const DescriptorModel& model,
                                    const Trajectory& x,
                                    const MeasurementSequence& y) {
  const int N = model.steps;
  if (static_cast<int>(x.x.size()) != N + 1) {
    throw ContractViolation("residuals_of: trajectory length must be N+1");
  }
  if (static_cast<int>(y.y.size()) != N + 1) {
    throw ContractViolation("residuals_of: measurement length must be N+1");
  }
  for (int k = 0; k <= N; ++k) {
    if (x.x[k].size() != model.n) throw ContractViolation("residuals_of: state dimension mismatch");
    if (y.y[k].size() != model.H[k].rows()) {
      throw ContractViolation("residuals_of: measurement dimension mismatch at k=" + std::to_string(k));
    }
  }

  DisturbanceRealization d;
  d.q = model.F[0] * x.x[0];
  d.f.reserve(N);
  for (int k = 0; k < N; ++k) {
    d.f.push_back(model.F[k + 1] * x.x[k + 1] - model.C[k] * x.x[k]);
  }
  d.g.reserve(N + 1);
  for (int k = 0; k <= N; ++k) {
    d.g.push_back(y.y[k] - model.H[k] * x.x[k]);
  }
  return d;
}

std::pair<Trajectory, MeasurementSequence> simulate(const DescriptorModel& model,
                                                    const DisturbanceRealization& d,
                                                    const Vec& x_free) {
  const int N = model.steps;
  if (x_free.size() != model.n) throw ContractViolation("simulate: x_free must have dimension n");
  if (static_cast<int>(d.f.size()) != N || static_cast<int>(d.g.size()) != N + 1) {
    throw ContractViolation("simulate: disturbance length mismatch");
  }

  auto solve_step = [&](const Mat& A, const Vec& rhs, int k) -> Vec {
    Mat Ap = pinv(A);
    Vec x = Ap * rhs + (Mat::Identity(model.n, model.n) - Ap * A) * x_free;
    double resid = (A * x - rhs).norm();
    if (resid > 1e-8 * (1.0 + rhs.norm())) {
      throw InfeasibleError("simulate: step k=" + std::to_string(k) + " has no solution");
    }
    return x;
  };

  Trajectory traj;
  traj.x.reserve(N + 1);
  traj.x.push_back(solve_step(model.F[0], d.q, 0));
  for (int k = 0; k < N; ++k) {
    Vec rhs = model.C[k] * traj.x[k] + d.f[k];
    traj.x.push_back(solve_step(model.F[k + 1], rhs, k));
  }

  MeasurementSequence meas;
  meas.y.reserve(N + 1);
  for (int k = 0; k <= N; ++k) {
    meas.y.push_back(model.H[k] * traj.x[k] + d.g[k]);
  }
  return {std::move(traj), std::move(meas)};
}

}  // namespace descest
