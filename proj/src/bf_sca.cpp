#include "riscf/bf_sca.hpp"

#include <cmath>
#include <stdexcept>

namespace riscf {

MatC BfSurrogate::omega_gram(int k) const {
  const int n = mb();
  MatC out = MatC::Zero(n * K(), n * K());
  const MatC gk = g.col(k) * g.col(k).adjoint();
  for (int j = 0; j < K(); ++j)
    if (j != k) out.block(j * n, j * n, n, n) = gk;
  return out;
}

BfSurrogate build_bf_surrogate(const AggregateChannels& agg, const BeamformerSet& W_t,
                               const PhaseVector& mu_t, const Eigen::VectorXd& eta) {
  const int K = static_cast<int>(eta.size());
  const int mb = static_cast<int>(W_t.W.rows());

  BfSurrogate s;
  s.M = W_t.M;
  s.B = W_t.B;
  s.eta = eta;
  s.alpha_t.resize(K);
  s.beta_t.resize(K);
  s.chi_t.resize(K);
  s.omega_wt_sq.resize(K);
  s.c.resize(mb, K);
  s.g.resize(mb, K);
  s.W_t = W_t.W;

  for (int k = 0; k < K; ++k) {
    s.c.col(k) = agg.h_user[k].adjoint() * mu_t.vec();
    s.g.col(k) = agg.h_eve[k].adjoint() * mu_t.vec();

    const Eigen::RowVectorXcd cu = s.c.col(k).adjoint() * W_t.W;  // c_k^H w_j
    const Eigen::RowVectorXcd ce = s.g.col(k).adjoint() * W_t.W;  // g_k^H w_j
    s.alpha_t(k) = cu(k);
    double beta = 1.0, chi = 0.0, omega = 0.0;
    for (int j = 0; j < K; ++j) {
      chi += std::norm(ce(j));
      if (j != k) {
        beta += std::norm(cu(j));
        omega += std::norm(ce(j));
      }
    }
    s.beta_t(k) = beta;
    s.chi_t(k) = chi;
    s.omega_wt_sq(k) = omega;
  }
  return s;
}

double bf_surrogate_objective(const BfSurrogate& s, const BeamformerSet& W) {
  const int K = s.K();
  double total = 0.0;
  for (int k = 0; k < K; ++k) {
    const Eigen::RowVectorXcd cu = s.c.col(k).adjoint() * W.W;
    const Eigen::RowVectorXcd ce = s.g.col(k).adjoint() * W.W;
    const Eigen::RowVectorXcd ce_t = s.g.col(k).adjoint() * s.W_t;

    const std::complex<double> alpha = cu(k);
    double beta = 1.0, chi = 0.0, omega = 0.0;
    std::complex<double> cross = 0.0;  // sum_{j != k} (g^H w_j)^* g^H w_j^t
    for (int j = 0; j < K; ++j) {
      chi += std::norm(ce(j));
      if (j != k) {
        beta += std::norm(cu(j));
        omega += std::norm(ce(j));
        cross += std::conj(ce(j)) * ce_t(j);
      }
    }

    const double a2 = std::norm(s.alpha_t(k));
    double term = -2.0 * std::real(std::conj(s.alpha_t(k)) * alpha) / s.beta_t(k);
    term += a2 * (beta + std::norm(alpha)) / (s.beta_t(k) * (s.beta_t(k) + a2));
    term += chi / (s.chi_t(k) + 1.0);
    term -= 2.0 * std::real(cross);
    term += s.omega_wt_sq(k) * omega / (1.0 + s.omega_wt_sq(k));
    total += s.eta(k) * term;
  }
  return total;
}

namespace {

struct QuadraticModel {
  std::vector<MatC> Q;  // per user j, (M*B)^2 Hermitian PSD
  MatC t;               // (M*B) x K linear coefficients

  double value(const Eigen::MatrixXcd& W) const {
    double v = 0.0;
    for (int j = 0; j < static_cast<int>(Q.size()); ++j) {
      v += std::real(W.col(j).dot(Q[j] * W.col(j)));
      v -= 2.0 * std::real(t.col(j).dot(W.col(j)));
    }
    return v;
  }

  // Complex representation of the real-parameterization gradient / 2.
  Eigen::MatrixXcd half_gradient(const Eigen::MatrixXcd& W) const {
    Eigen::MatrixXcd g(W.rows(), W.cols());
    for (int j = 0; j < static_cast<int>(Q.size()); ++j) g.col(j) = Q[j] * W.col(j) - t.col(j);
    return g;
  }
};

QuadraticModel build_model(const BfSurrogate& s) {
  const int K = s.K();
  const int mb = s.mb();
  QuadraticModel m;
  m.t = MatC::Zero(mb, K);

  MatC base = MatC::Zero(mb, mb);
  MatC s_all = MatC::Zero(mb, mb);  // sum_k eta_k s_k g_k g_k^H
  MatC g_all = MatC::Zero(mb, mb);  // sum_k eta_k g_k g_k^H
  Eigen::VectorXd sk(K);
  for (int k = 0; k < K; ++k) {
    const double a2 = std::norm(s.alpha_t(k));
    const double qk = a2 / (s.beta_t(k) * (s.beta_t(k) + a2));
    const MatC cc = s.c.col(k) * s.c.col(k).adjoint();
    const MatC gg = s.g.col(k) * s.g.col(k).adjoint();
    base += s.eta(k) * qk * cc;
    base += s.eta(k) / (s.chi_t(k) + 1.0) * gg;
    sk(k) = s.omega_wt_sq(k) / (1.0 + s.omega_wt_sq(k));
    s_all += s.eta(k) * sk(k) * gg;
    g_all += s.eta(k) * gg;
  }

  m.Q.resize(K);
  for (int j = 0; j < K; ++j) {
    const MatC gg = s.g.col(j) * s.g.col(j).adjoint();
    m.Q[j] = base + s_all - s.eta(j) * sk(j) * gg;
    m.t.col(j) = (g_all - s.eta(j) * gg) * s.W_t.col(j);
    m.t.col(j) += s.eta(j) * (s.alpha_t(j) / s.beta_t(j)) * s.c.col(j);
  }
  return m;
}

double power_iteration_max_eig(const MatC& Q, int iters = 20) {
  const int n = static_cast<int>(Q.rows());
  VecC v(n);
  for (int i = 0; i < n; ++i) v(i) = std::complex<double>(1.0, 0.1 * (i + 1));
  v.normalize();
  for (int it = 0; it < iters; ++it) {
    VecC w = Q * v;
    const double nw = w.norm();
    if (nw < 1e-300) return 0.0;
    v = w / nw;
  }
  return std::real(v.dot(Q * v));
}

void project_bs_balls(Eigen::MatrixXcd& W, int M, const std::vector<double>& budgets) {
  const int B = static_cast<int>(budgets.size());
  for (int b = 0; b < B; ++b) {
    auto rows = W.middleRows(b * M, M);
    const double p = rows.squaredNorm();
    if (p > budgets[b]) {
      rows *= (budgets[b] > 0.0) ? std::sqrt(budgets[b] / p) : 0.0;
    }
  }
}

struct KktCheck {
  bool ok = false;
  double stationarity = 0.0;
  double complementarity = 0.0;
};

KktCheck check_kkt(const QuadraticModel& m, const Eigen::MatrixXcd& W, int M,
                   const std::vector<double>& budgets, double tol) {
  const int B = static_cast<int>(budgets.size());
  const Eigen::MatrixXcd grad = 2.0 * m.half_gradient(W);
  Eigen::MatrixXcd resid = grad;
  KktCheck out;
  for (int b = 0; b < B; ++b) {
    const auto gb = grad.middleRows(b * M, M);
    const auto wb = W.middleRows(b * M, M);
    const double pw = wb.squaredNorm();
    double nu = 0.0;
    if (pw > 1e-300 && pw >= budgets[b] * (1.0 - 1e-9)) {
      nu = std::max(0.0, -std::real((gb.array().conjugate() * wb.array()).sum()) / (2.0 * pw));
    }
    resid.middleRows(b * M, M) += 2.0 * nu * wb;
    out.complementarity = std::max(out.complementarity, std::abs(nu * (pw - budgets[b])));
  }
  out.stationarity = resid.norm();
  out.ok = out.stationarity <= tol * (1.0 + grad.norm()) && out.complementarity <= tol;
  return out;
}

}  // namespace

QpResult solve_bf_qp(const BfSurrogate& s, const std::vector<double>& budgets, double tol,
                     int max_iters) {
  if (static_cast<int>(budgets.size()) != s.B)
    throw std::invalid_argument("solve_bf_qp: budgets size != B");
  for (double p : budgets)
    if (p < 0.0) throw std::invalid_argument("solve_bf_qp: negative budget");

  const QuadraticModel m = build_model(s);
  const int K = s.K();

  double lam = 0.0;
  for (int j = 0; j < K; ++j) lam = std::max(lam, power_iteration_max_eig(m.Q[j]));
  if (!(lam > 0.0)) lam = 1.0;
  lam *= 1.05;
  const double step = 1.0 / lam;  // complex form of 1/(2*lam) real step

  Eigen::MatrixXcd W = s.W_t;
  project_bs_balls(W, s.M, budgets);
  Eigen::MatrixXcd W_prev = W;
  Eigen::MatrixXcd best = W;
  double f_cur = m.value(W);
  double f_best = f_cur;

  QpResult res;
  double theta = 1.0;
  for (int it = 1; it <= max_iters; ++it) {
    const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
    const double momentum = (theta - 1.0) / theta_next;
    Eigen::MatrixXcd Y = W + momentum * (W - W_prev);
    Eigen::MatrixXcd W_next = Y - step * m.half_gradient(Y);
    project_bs_balls(W_next, s.M, budgets);

    const double f_next = m.value(W_next);
    if (f_next > f_cur) {
      // momentum overshoot: restart from a plain projected step
      W_next = W - step * m.half_gradient(W);
      project_bs_balls(W_next, s.M, budgets);
      theta = 1.0;
    } else {
      theta = theta_next;
    }

    W_prev = W;
    W = W_next;
    f_cur = m.value(W);
    if (f_cur < f_best) {
      f_best = f_cur;
      best = W;
    }
    res.iterations = it;

    if (it % 10 == 0 || it == max_iters) {
      const KktCheck kkt = check_kkt(m, W, s.M, budgets, tol);
      res.stationarity = kkt.stationarity;
      res.complementarity = kkt.complementarity;
      if (kkt.ok) {
        res.converged = true;
        break;
      }
    }
  }

  if (m.value(best) < f_cur) W = best;
  res.W = BeamformerSet(W, s.M, s.B);
  return res;
}

}  // namespace riscf
