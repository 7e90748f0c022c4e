#include "riscf/phase_admm.hpp"

#include <cmath>
#include <stdexcept>

namespace riscf {

PhaseQuadratic build_phase_quadratic(const AggregateChannels& agg, const BeamformerSet& W_t,
                                     const PhaseVector& mu_t, const Eigen::VectorXd& eta) {
  const int K = static_cast<int>(eta.size());
  const int n = mu_t.dim();

  PhaseQuadratic q;
  q.A = MatC::Zero(n, n);
  q.v = VecC::Zero(n);

  for (int k = 0; k < K; ++k) {
    const MatC hu = agg.h_user[k] * W_t.W;  // n x K, column j = h_k w_j
    const MatC he = agg.h_eve[k] * W_t.W;

    const std::complex<double> alpha_t = mu_t.vec().dot(hu.col(k));
    double beta_t = 1.0, chi_t = 0.0, psi_mu_sq = 0.0;
    for (int j = 0; j < K; ++j) {
      const double eg = std::norm(mu_t.vec().dot(he.col(j)));
      chi_t += eg;
      if (j != k) {
        beta_t += std::norm(mu_t.vec().dot(hu.col(j)));
        psi_mu_sq += eg;
      }
    }

    // Psi_k Psi_k^H = sum_{j != k} (h_e w_j)(h_e w_j)^H
    MatC psi_gram = he * he.adjoint() - he.col(k) * he.col(k).adjoint();

    const double a2 = std::norm(alpha_t);
    MatC a_k = (a2 / (beta_t * (beta_t + a2))) * (hu * hu.adjoint());
    a_k += (he * he.adjoint()) / (chi_t + 1.0);
    a_k += psi_gram * (psi_mu_sq / (1.0 + psi_mu_sq));

    VecC v_k = psi_gram * mu_t.vec();
    v_k += hu.col(k) * (std::conj(alpha_t) / beta_t);

    q.A += eta(k) * a_k;
    q.v += eta(k) * v_k;
  }

  // Numerical symmetrization; A is a nonnegative combination of Gram forms.
  q.A = 0.5 * (q.A + q.A.adjoint().eval());
  if (n > 0) {
    Eigen::SelfAdjointEigenSolver<MatC> es(q.A, Eigen::EigenvaluesOnly);
    q.lambda_max_A = std::max(0.0, es.eigenvalues().maxCoeff());
  }
  return q;
}

double select_penalty(const PhaseQuadratic& q) {
  constexpr double margin = 0.05;
  constexpr double floor = 1e-6;
  double delta = std::max(2.0 * q.lambda_max_A * (1.0 + margin), floor);
  // Guard against eigenvalue estimation error: require min eig of
  // delta/2 I - A strictly positive.
  Eigen::SelfAdjointEigenSolver<MatC> es(
      0.5 * delta * MatC::Identity(q.dim(), q.dim()) - q.A, Eigen::EigenvaluesOnly);
  while (es.eigenvalues().minCoeff() <= 0.0) {
    delta *= 1.05;
    es.compute(0.5 * delta * MatC::Identity(q.dim(), q.dim()) - q.A, Eigen::EigenvaluesOnly);
  }
  return delta;
}

VecC admm_update_p(const MatC& A, double delta, const VecC& v, const VecC& lambda,
                   const VecC& mu) {
  const int n = static_cast<int>(v.size());
  const MatC lhs = 2.0 * A + delta * MatC::Identity(n, n);
  Eigen::LLT<MatC> llt(lhs);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("admm_update_p: (2A + delta I) not positive definite");
  return llt.solve(2.0 * v + lambda + delta * mu);
}

VecC admm_update_p(const AdmmState& state, const PhaseQuadratic& q) {
  return admm_update_p(q.A, state.delta, q.v, state.lambda, state.mu.vec());
}

PhaseVector admm_update_mu(const AdmmState& state) {
  const int n = static_cast<int>(state.p.size());
  VecC mu(n);
  const VecC z = state.p - state.lambda / state.delta;
  for (int i = 0; i < n - 1; ++i) {
    const double m = std::abs(z(i));
    mu(i) = (m > 0.0) ? z(i) / m : state.mu.vec()(i);
  }
  mu(n - 1) = 1.0;
  return PhaseVector(std::move(mu));
}

VecC admm_update_lambda(const AdmmState& state, const PhaseQuadratic& q) {
  return 2.0 * q.A * state.p - 2.0 * q.v;
}

double augmented_lagrangian(const PhaseQuadratic& q, const VecC& p, const VecC& mu,
                            const VecC& lambda, double delta) {
  double g = std::real(p.dot(q.A * p)) - 2.0 * std::real(p.dot(q.v));
  g -= std::real(lambda.dot(p - mu));
  g += 0.5 * delta * (p - mu).squaredNorm();
  return g;
}

AdmmResult admm_solve(const PhaseQuadratic& q, const PhaseVector& mu_init, double tol,
                      int max_iters) {
  const int n = q.dim();
  AdmmState st{VecC::Zero(n), VecC::Zero(n), mu_init, select_penalty(q), 0};
  st.p = mu_init.vec();

  const MatC lhs = 2.0 * q.A + st.delta * MatC::Identity(n, n);
  const Eigen::LLT<MatC> llt(lhs);  // factored once, reused every iteration
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("admm_solve: (2A + delta I) not positive definite");

  AdmmResult res{mu_init, 0, false, q.objective(mu_init.vec())};

  for (int it = 1; it <= max_iters; ++it) {
    st.iteration = it;
    st.p = llt.solve(2.0 * q.v + st.lambda + st.delta * st.mu.vec());
    PhaseVector mu_next = admm_update_mu(st);
    st.lambda = admm_update_lambda(st, q);

    const double obj = q.objective(mu_next.vec());
    if (obj < res.objective) {
      res.objective = obj;
      res.mu = mu_next;
    }
    const double gap = (st.p - mu_next.vec()).cwiseAbs().maxCoeff();
    st.mu = std::move(mu_next);
    res.iterations = it;
    if (gap <= tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

PhaseVector project_discrete(const PhaseVector& mu, int bits) {
  if (bits < 0) throw std::domain_error("project_discrete: bits must be nonnegative");
  const long alphabet = 1L << bits;
  const double step = 2.0 * M_PI / static_cast<double>(alphabet);
  VecC out = mu.vec();
  for (int i = 0; i < mu.reflect_count(); ++i) {
    // round() on the wrapped phase realizes the circular nearest-neighbour
    const long idx = std::lround(std::arg(out(i)) / step);
    const long wrapped = ((idx % alphabet) + alphabet) % alphabet;
    out(i) = std::polar(1.0, step * static_cast<double>(wrapped));
  }
  out(mu.dim() - 1) = 1.0;
  return PhaseVector(std::move(out));
}

}  // namespace riscf
