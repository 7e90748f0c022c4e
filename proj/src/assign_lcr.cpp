#include "riscf/assign_lcr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace riscf {

namespace {

double frob_dot(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a.array() * b.array()).sum();
}

double trace_dU(const MatC& d, const Eigen::MatrixXd& u) {
  // Tr(D U) for Hermitian D and real symmetric U is real; the imaginary
  // part of D is antisymmetric and cancels against U.
  return frob_dot(d.real(), u);
}

}  // namespace

AssignmentProblem build_assignment_problem(const AggregateChannels& agg,
                                           const BeamformerSet& W, const Eigen::VectorXd& eta,
                                           int r_assign, std::vector<Eigen::MatrixXd> U_t) {
  const int K = static_cast<int>(eta.size());
  if (agg.b_user.size() != static_cast<size_t>(K))
    throw std::invalid_argument("build_assignment_problem: assignment aggregates not built");
  const int R = static_cast<int>(agg.b_user[0].rows()) - 1;

  AssignmentProblem prob;
  prob.R = R;
  prob.r_assign = r_assign;
  prob.eta = eta;
  prob.U_t = std::move(U_t);
  prob.D.assign(K, std::vector<MatC>(K));
  prob.De.assign(K, std::vector<MatC>(K));
  for (int k = 0; k < K; ++k) {
    const MatC bu = agg.b_user[k] * W.W;  // (R+1) x K, column j = b_k w_j
    const MatC be = agg.b_eve[k] * W.W;
    for (int j = 0; j < K; ++j) {
      prob.D[k][j] = bu.col(j) * bu.col(j).adjoint();
      prob.De[k][j] = be.col(j) * be.col(j).adjoint();
    }
  }
  return prob;
}

std::vector<Eigen::MatrixXd> full_assignment_expansion(int R, int K) {
  return std::vector<Eigen::MatrixXd>(K, Eigen::MatrixXd::Ones(R + 1, R + 1));
}

Eigen::MatrixXd lift_assignment(const Eigen::VectorXd& u) { return u * u.transpose(); }

TTerms eval_T_terms(const AssignmentProblem& prob, const Eigen::MatrixXd& U, int k) {
  const int K = prob.K();
  double all_u = 0.0, off_u = 0.0, all_e = 0.0, off_e = 0.0;
  for (int j = 0; j < K; ++j) {
    const double tu = trace_dU(prob.D[k][j], U);
    const double te = trace_dU(prob.De[k][j], U);
    all_u += tu;
    all_e += te;
    if (j != k) {
      off_u += tu;
      off_e += te;
    }
  }
  TTerms t;
  t.t1 = std::log(all_u + 1.0);
  t.t2 = std::log(off_e + 1.0);
  t.t3 = std::log(off_u + 1.0);
  t.t4 = std::log(all_e + 1.0);
  return t;
}

T34Linearization linearize_T34(const AssignmentProblem& prob, int k) {
  const int K = prob.K();
  const int n = prob.R + 1;
  const Eigen::MatrixXd& ut = prob.U_t[k];

  Eigen::MatrixXd num3 = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd num4 = Eigen::MatrixXd::Zero(n, n);
  double den3 = 1.0, den4 = 1.0;
  for (int j = 0; j < K; ++j) {
    const Eigen::MatrixXd de = prob.De[k][j].real();
    num4 += de;
    den4 += frob_dot(de, ut);
    if (j != k) {
      const Eigen::MatrixXd du = prob.D[k][j].real();
      num3 += du;
      den3 += frob_dot(du, ut);
    }
  }
  T34Linearization lin;
  lin.grad_t3 = num3 / den3;
  lin.grad_t4 = num4 / den4;
  lin.t3_at_expansion = std::log(den3);
  lin.t4_at_expansion = std::log(den4);
  return lin;
}

double eval_g(const AssignmentProblem& prob, const Eigen::MatrixXd& U, int k) {
  const TTerms t = eval_T_terms(prob, U, k);
  return -t.t1 - t.t2 + t.t3 + t.t4;
}

double eval_gtilde(const AssignmentProblem& prob, const Eigen::MatrixXd& U, int k) {
  const TTerms t = eval_T_terms(prob, U, k);
  const T34Linearization lin = linearize_T34(prob, k);
  const double t3 = lin.t3_at_expansion + frob_dot(lin.grad_t3, U - prob.U_t[k]);
  const double t4 = lin.t4_at_expansion + frob_dot(lin.grad_t4, U - prob.U_t[k]);
  return -t.t1 - t.t2 + t3 + t4;
}

namespace {

// One user's barrier subproblem. Free variables x: the R reflect entries
// u_0..u_{R-1} followed by the strict upper triangle of the R x R reflect
// block of U. Eliminated by substitution: diag(U) = u (C7), the pinned
// last entry (C8), and U(:, R) = u, which the PSD cut C11 forces once C7
// and C8 hold.
class UserBarrier {
 public:
  UserBarrier(const AssignmentProblem& prob, int k)
      : R_(prob.R), ra_(prob.r_assign), nvar_(R_ + R_ * (R_ - 1) / 2) {
    pair_index_.assign(R_, std::vector<int>(R_, -1));
    int next = R_;
    for (int i = 0; i < R_; ++i)
      for (int j = i + 1; j < R_; ++j) {
        pair_index_[i][j] = pair_index_[j][i] = next++;
        pairs_.emplace_back(i, j);
      }

    const int K = prob.K();
    Eigen::MatrixXd m1 = Eigen::MatrixXd::Zero(R_ + 1, R_ + 1);
    Eigen::MatrixXd m2 = Eigen::MatrixXd::Zero(R_ + 1, R_ + 1);
    for (int j = 0; j < K; ++j) {
      m1 += prob.D[k][j].real();
      if (j != k) m2 += prob.De[k][j].real();
    }
    const T34Linearization lin = linearize_T34(prob, k);
    const Eigen::MatrixXd lam = lin.grad_t3 + lin.grad_t4;

    p1_ = pullback(m1);
    p2_ = pullback(m2);
    plin_ = pullback(lam);
    c1_ = m1(R_, R_) + 1.0;
    c2_ = m2(R_, R_) + 1.0;

    // C10 columns are kept only when they can hold strictly; for R = 1 the
    // single column is an identity (slack identically (r_assign-1) u) and
    // the R+1-th column duplicates C9.
    if (R_ >= 2) {
      c10_.resize(R_, Eigen::VectorXd::Zero(nvar_));
      for (int i = 0; i < R_; ++i) {
        c10_[i](i) = static_cast<double>(ra_ - 1);
        for (int m = 0; m < R_; ++m)
          if (m != i) c10_[i](pair_index_[m][i]) = -1.0;
      }
    }
    barrier_degree_ = (R_ + 1) + 1 + static_cast<int>(c10_.size());
  }

  int nvar() const { return nvar_; }
  int barrier_degree() const { return barrier_degree_; }

  Eigen::VectorXd pullback(const Eigen::MatrixXd& m) const {
    Eigen::VectorXd p(nvar_);
    for (int i = 0; i < R_; ++i) p(i) = m(i, i) + 2.0 * m(i, R_);
    for (int i = 0; i < R_; ++i)
      for (int j = i + 1; j < R_; ++j) p(pair_index_[i][j]) = 2.0 * m(i, j);
    return p;
  }

  Eigen::MatrixXd to_U(const Eigen::VectorXd& x) const {
    Eigen::MatrixXd u = Eigen::MatrixXd::Zero(R_ + 1, R_ + 1);
    for (int i = 0; i < R_; ++i) {
      u(i, i) = x(i);
      u(i, R_) = u(R_, i) = x(i);
    }
    for (int i = 0; i < R_; ++i)
      for (int j = i + 1; j < R_; ++j) u(i, j) = u(j, i) = x(pair_index_[i][j]);
    u(R_, R_) = 1.0;
    return u;
  }

  Eigen::VectorXd to_u(const Eigen::VectorXd& x) const {
    Eigen::VectorXd u(R_ + 1);
    for (int i = 0; i < R_; ++i) u(i) = x(i);
    u(R_) = 1.0;
    return u;
  }

  Eigen::MatrixXd schur(const Eigen::VectorXd& x) const {
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(R_ + 1, R_ + 1);
    s(0, 0) = 1.0;
    for (int i = 0; i < R_; ++i) {
      s(0, 1 + i) = s(1 + i, 0) = x(i);
      s(1 + i, 1 + i) = x(i);
      for (int j = i + 1; j < R_; ++j) s(1 + i, 1 + j) = s(1 + j, 1 + i) = x(pair_index_[i][j]);
    }
    return s;
  }

  double slack9(const Eigen::VectorXd& x) const {
    return static_cast<double>(ra_) - x.head(R_).sum();
  }

  double affine1(const Eigen::VectorXd& x) const { return p1_.dot(x) + c1_; }
  double affine2(const Eigen::VectorXd& x) const { return p2_.dot(x) + c2_; }

  bool feasible(const Eigen::VectorXd& x) const {
    if (!(slack9(x) > 0.0)) return false;
    for (const auto& c : c10_)
      if (!(c.dot(x) > 0.0)) return false;
    if (!(affine1(x) > 0.0) || !(affine2(x) > 0.0)) return false;
    Eigen::LLT<Eigen::MatrixXd> llt(schur(x));
    return llt.info() == Eigen::Success;
  }

  // t * eta * gtilde(x) + barrier(x), up to x-independent constants.
  double merit(const Eigen::VectorXd& x, double t, double eta) const {
    double f = -std::log(affine1(x)) - std::log(affine2(x)) + plin_.dot(x);
    double phi = -std::log(slack9(x));
    for (const auto& c : c10_) phi -= std::log(c.dot(x));
    const Eigen::MatrixXd s = schur(x);
    const Eigen::LLT<Eigen::MatrixXd> llt(s);
    double logdet = 0.0;
    for (int i = 0; i <= R_; ++i) logdet += std::log(llt.matrixL()(i, i));
    phi -= 2.0 * logdet;
    return t * eta * f + phi;
  }

  void derivatives(const Eigen::VectorXd& x, double t, double eta, Eigen::VectorXd& grad,
                   Eigen::MatrixXd& hess) const {
    grad = Eigen::VectorXd::Zero(nvar_);
    hess = Eigen::MatrixXd::Zero(nvar_, nvar_);

    const double a1 = affine1(x), a2 = affine2(x);
    grad += t * eta * (-p1_ / a1 - p2_ / a2 + plin_);
    hess += t * eta * (p1_ * p1_.transpose() / (a1 * a1) + p2_ * p2_.transpose() / (a2 * a2));

    const double s9 = slack9(x);
    Eigen::VectorXd d9 = Eigen::VectorXd::Zero(nvar_);
    d9.head(R_).setConstant(1.0);
    grad += d9 / s9;
    hess += d9 * d9.transpose() / (s9 * s9);

    for (const auto& c : c10_) {
      const double sl = c.dot(x);
      grad -= c / sl;
      hess += c * c.transpose() / (sl * sl);
    }

    const Eigen::MatrixXd sinv = schur(x).inverse();
    std::vector<Eigen::MatrixXd> tm(nvar_);
    for (int m = 0; m < nvar_; ++m) {
      Eigen::MatrixXd e = Eigen::MatrixXd::Zero(R_ + 1, R_ + 1);
      if (m < R_) {
        e(0, 1 + m) = e(1 + m, 0) = 1.0;
        e(1 + m, 1 + m) = 1.0;
      } else {
        const auto [i, j] = pairs_[m - R_];
        e(1 + i, 1 + j) = e(1 + j, 1 + i) = 1.0;
      }
      tm[m] = sinv * e;
      grad(m) -= tm[m].trace();
    }
    for (int m = 0; m < nvar_; ++m)
      for (int n = m; n < nvar_; ++n) {
        const double v = (tm[m].array() * tm[n].transpose().array()).sum();
        hess(m, n) += v;
        if (n != m) hess(n, m) += v;
      }
  }

  Eigen::VectorXd strictly_feasible_start() const {
    const double alpha = 1.0 / (2.0 * R_);
    const double beta = (ra_ >= 2) ? 0.0 : -0.5 * alpha * alpha;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(nvar_);
    x.head(R_).setConstant(alpha);
    for (int i = R_; i < nvar_; ++i) x(i) = beta;
    return x;
  }

 private:
  int R_;
  int ra_;
  int nvar_;
  std::vector<std::vector<int>> pair_index_;
  std::vector<std::pair<int, int>> pairs_;
  Eigen::VectorXd p1_, p2_, plin_;
  double c1_ = 1.0, c2_ = 1.0;
  std::vector<Eigen::VectorXd> c10_;
  int barrier_degree_ = 0;
};

}  // namespace

LcrSolution solve_lcr_sdp(const AssignmentProblem& prob, double tol) {
  const int K = prob.K();
  if (prob.R < 1) throw std::invalid_argument("solve_lcr_sdp: R must be >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("solve_lcr_sdp: tol must be positive");

  LcrSolution sol;
  sol.u.resize(K);
  sol.U.resize(K);

  for (int k = 0; k < K; ++k) {
    UserBarrier ub(prob, k);
    Eigen::VectorXd x = ub.strictly_feasible_start();
    if (!ub.feasible(x)) throw std::runtime_error("solve_lcr_sdp: infeasible start");
    const double eta = prob.eta(k);
    const double nu = static_cast<double>(ub.barrier_degree());

    double t = 1.0;
    while (true) {
      for (int newton = 0; newton < 100; ++newton) {
        Eigen::VectorXd grad;
        Eigen::MatrixXd hess;
        ub.derivatives(x, t, eta, grad, hess);
        Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
        Eigen::VectorXd dx = ldlt.solve(-grad);
        const double decrement = -grad.dot(dx);
        if (!(decrement > 0.0)) break;
        if (decrement * 0.5 <= 1e-10) break;

        double stepsize = 1.0;
        const double f0 = ub.merit(x, t, eta);
        bool moved = false;
        for (int halving = 0; halving < 60; ++halving) {
          const Eigen::VectorXd cand = x + stepsize * dx;
          if (ub.feasible(cand) &&
              ub.merit(cand, t, eta) <= f0 - 0.25 * stepsize * decrement) {
            x = cand;
            moved = true;
            break;
          }
          stepsize *= 0.5;
        }
        sol.newton_iterations += 1;
        if (!moved) break;
      }
      if (nu / t <= tol) break;
      t *= 5.0;
    }

    sol.u[k] = ub.to_u(x);
    sol.U[k] = ub.to_U(x);
    sol.gap += nu / t;
    sol.objective += eta * eval_gtilde(prob, sol.U[k], k);
  }
  return sol;
}

Eigen::VectorXd round_assignment(const Eigen::VectorXd& u, int r_assign) {
  const int R = static_cast<int>(u.size()) - 1;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(R + 1);
  out(R) = 1.0;

  std::vector<int> order(R);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return u(a) > u(b); });
  int kept = 0;
  for (int idx : order) {
    if (kept >= r_assign) break;
    if (u(idx) > 0.0) {
      out(idx) = 1.0;
      ++kept;
    }
  }
  return out;
}

ChannelSet apply_assignment(const ChannelSet& ch, const Eigen::MatrixXd& L) {
  ChannelSet out = ch;
  const int R = static_cast<int>(L.rows());
  const int K = static_cast<int>(L.cols());
  for (int r = 0; r < R; ++r)
    for (int k = 0; k < K; ++k) {
      out.F_user[r][k] *= L(r, k);
      out.F_eve[r][k] *= L(r, k);
    }
  return out;
}

}  // namespace riscf
