#pragma once

#include <Eigen/Dense>

#include "riscf/network.hpp"

namespace riscf {

// Quadratic form of the phase subproblem: minimize mu^H A mu - 2 Re{mu^H v}
// over unit-modulus mu with the last entry pinned to 1. A is Hermitian PSD;
// its largest eigenvalue is cached for the penalty rule.
struct PhaseQuadratic {
  MatC A;
  VecC v;
  double lambda_max_A = 0.0;

  int dim() const { return static_cast<int>(v.size()); }
  double objective(const VecC& mu) const {
    return std::real(mu.dot(A * mu)) - 2.0 * std::real(mu.dot(v));
  }
};

PhaseQuadratic build_phase_quadratic(const AggregateChannels& agg, const BeamformerSet& W_t,
                                     const PhaseVector& mu_t, const Eigen::VectorXd& eta);

// delta = 2 * lambda_max(A) * 1.05, floored at 1e-6, so that
// delta/2 * I - A stays strictly positive definite.
double select_penalty(const PhaseQuadratic& q);

struct AdmmState {
  VecC p;
  VecC lambda;
  PhaseVector mu;
  double delta = 0.0;
  int iteration = 0;
};

// Closed-form updates of the three ADMM blocks.
VecC admm_update_p(const AdmmState& state, const PhaseQuadratic& q);
VecC admm_update_p(const MatC& A, double delta, const VecC& v, const VecC& lambda,
                   const VecC& mu);
PhaseVector admm_update_mu(const AdmmState& state);
VecC admm_update_lambda(const AdmmState& state, const PhaseQuadratic& q);

// Augmented Lagrangian value, exposed for convergence diagnostics.
double augmented_lagrangian(const PhaseQuadratic& q, const VecC& p, const VecC& mu,
                            const VecC& lambda, double delta);

struct AdmmResult {
  PhaseVector mu;
  int iterations = 0;
  bool converged = false;
  double objective = 0.0;
};

// Alternates the closed-form p, mu, lambda updates until ||p - mu||_inf
// <= tol or the cap; returns the best unit-modulus iterate encountered
// (never worse than mu_init under the cached objective).
AdmmResult admm_solve(const PhaseQuadratic& q, const PhaseVector& mu_init, double tol = 1e-7,
                      int max_iters = 2000);

// Snaps every reflect entry to the circularly nearest phase of the 2^bits
// uniform alphabet; the pinned last entry stays 1. bits = 0 collapses the
// alphabet to {1}.
PhaseVector project_discrete(const PhaseVector& mu, int bits);

}  // namespace riscf
