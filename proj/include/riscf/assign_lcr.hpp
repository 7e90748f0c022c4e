#pragma once

#include <Eigen/Dense>
#include <vector>

#include "riscf/network.hpp"

namespace riscf {

// Data of the RIS-to-user assignment subproblem at fixed (W, mu):
// D[k][j] = b_k w_j w_j^H b_k^H on the noise-normalized assignment
// aggregates (rank <= 1, Hermitian PSD), plus the SCA expansion points.
struct AssignmentProblem {
  int R = 0;
  int r_assign = 1;
  Eigen::VectorXd eta;
  std::vector<std::vector<MatC>> D;    // [K][K], each (R+1) x (R+1)
  std::vector<std::vector<MatC>> De;   // [K][K]
  std::vector<Eigen::MatrixXd> U_t;    // [K] expansion points, real symmetric

  int K() const { return static_cast<int>(eta.size()); }
};

struct TTerms {
  double t1 = 0.0, t2 = 0.0, t3 = 0.0, t4 = 0.0;
};

struct T34Linearization {
  Eigen::MatrixXd grad_t3;  // (R+1) x (R+1), real symmetric
  Eigen::MatrixXd grad_t4;
  double t3_at_expansion = 0.0;
  double t4_at_expansion = 0.0;
};

// Requires agg.b_user / agg.b_eve to be filled for the current phases.
AssignmentProblem build_assignment_problem(const AggregateChannels& agg,
                                           const BeamformerSet& W, const Eigen::VectorXd& eta,
                                           int r_assign, std::vector<Eigen::MatrixXd> U_t);

std::vector<Eigen::MatrixXd> full_assignment_expansion(int R, int K);
Eigen::MatrixXd lift_assignment(const Eigen::VectorXd& u);

TTerms eval_T_terms(const AssignmentProblem& prob, const Eigen::MatrixXd& U, int k);
T34Linearization linearize_T34(const AssignmentProblem& prob, int k);

// g = -T1 - T2 + T3 + T4 and its convexified version with T3/T4 linearized
// at U_t[k]; both in nats (negated virtual secrecy terms).
double eval_g(const AssignmentProblem& prob, const Eigen::MatrixXd& U, int k);
double eval_gtilde(const AssignmentProblem& prob, const Eigen::MatrixXd& U, int k);

struct LcrSolution {
  std::vector<Eigen::VectorXd> u;       // [K], each (R+1), last entry 1
  std::vector<Eigen::MatrixXd> U;       // [K], each (R+1) x (R+1)
  double objective = 0.0;               // sum_k eta_k gtilde(U_k)
  double gap = 0.0;                     // barrier duality-gap estimate
  int newton_iterations = 0;
};

// Primal log-barrier Newton method on the LCR relaxation. Equalities are
// eliminated by substitution (diag U = u, pinned last entry, and the PSD
// forced last column U(:,R) = u), the Schur block enters through a log-det
// barrier and the linear cuts through log barriers.
LcrSolution solve_lcr_sdp(const AssignmentProblem& prob, double tol);

// Keeps the pinned last entry, then the r_assign largest strictly positive
// reflect entries (ties to the lowest RIS index); everything else drops to 0.
Eigen::VectorXd round_assignment(const Eigen::VectorXd& u, int r_assign);

// Masked copy: reflect channels of user k scale by L(r, k); direct and
// BS-to-RIS channels stay untouched.
ChannelSet apply_assignment(const ChannelSet& ch, const Eigen::MatrixXd& L);

}  // namespace riscf
