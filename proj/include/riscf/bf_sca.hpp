#pragma once

#include <Eigen/Dense>
#include <vector>

#include "riscf/network.hpp"

namespace riscf {

// Frozen SCA coefficients of the beamforming subproblem at the expansion
// point (W_t, mu_t). c.col(k) and g.col(k) store the effective user/Eve
// channels h_k^H mu_t and h_{e,k}^H mu_t; the Eve Gram operator
// Omega_k Omega_k^H is block-diagonal with g_k g_k^H in every block except
// the k-th, which is zero (materialized on demand by omega_gram).
struct BfSurrogate {
  int M = 0;
  int B = 0;
  Eigen::VectorXd eta;

  VecC alpha_t;                 // K
  Eigen::VectorXd beta_t;       // K, each >= 1
  Eigen::VectorXd chi_t;        // K, each >= 0
  Eigen::VectorXd omega_wt_sq;  // K: ||Omega_k^H W_t||^2
  MatC c;                       // (M*B) x K
  MatC g;                       // (M*B) x K
  MatC W_t;                     // (M*B) x K

  int mb() const { return M * B; }
  int K() const { return static_cast<int>(eta.size()); }

  // Dense (M*B*K)^2 realization of Omega_k Omega_k^H, test-facing.
  MatC omega_gram(int k) const;
};

BfSurrogate build_bf_surrogate(const AggregateChannels& agg, const BeamformerSet& W_t,
                               const PhaseVector& mu_t, const Eigen::VectorXd& eta);

// Minimization objective of the convex beamforming subproblem (constant
// terms of the touching bounds dropped).
double bf_surrogate_objective(const BfSurrogate& s, const BeamformerSet& W);

struct QpResult {
  BeamformerSet W;
  int iterations = 0;
  bool converged = false;
  double stationarity = 0.0;
  double complementarity = 0.0;
};

// Accelerated projected gradient descent on the surrogate under per-BS
// power balls; projection is an exact per-block rescale. Stops on KKT
// residuals <= tol or the iteration cap (reported via `converged`).
QpResult solve_bf_qp(const BfSurrogate& s, const std::vector<double>& budgets, double tol,
                     int max_iters = 5000);

}  // namespace riscf
