#include <cmath>
#include <complex>

#include "doctest.h"
#include "oracles.hpp"
#include "riscf/bf_sca.hpp"

using namespace riscf;

namespace {

struct BfFixture {
  Scenario s;
  ChannelSet ch;
  AggregateChannels agg;
  PhaseVector mu{VecC::Ones(1)};
  BeamformerSet W_t;
  Eigen::VectorXd eta;
  BfSurrogate surr;
};

BfFixture make_fixture(std::uint64_t seed, int B = 2, int R = 2, int K = 3, int M = 2,
                       int N = 3) {
  auto inst = oracles::make_random_instance(seed, B, R, K, M, N);
  BfFixture f{inst.scenario,
              inst.channels,
              aggregate_channels(inst.channels, inst.scenario),
              inst.mu,
              inst.W,
              Eigen::Map<const Eigen::VectorXd>(inst.scenario.weights.data(), K),
              {}};
  // expansion points must respect the per-BS budgets
  for (int b = 0; b < B; ++b) {
    auto rows = f.W_t.W.middleRows(b * M, M);
    const double p = rows.squaredNorm();
    if (p > 0.0) rows *= std::sqrt(f.s.power_budget[b] / p);
  }
  f.surr = build_bf_surrogate(f.agg, f.W_t, f.mu, f.eta);
  return f;
}

// Full surrogate lower bound of the weighted objective, constants included.
double surrogate_lower_bound(const BfSurrogate& s, const BeamformerSet& W) {
  double lb = 0.0;
  for (int k = 0; k < s.K(); ++k) {
    const Eigen::RowVectorXcd cu = s.c.col(k).adjoint() * W.W;
    const Eigen::RowVectorXcd ce = s.g.col(k).adjoint() * W.W;
    const Eigen::RowVectorXcd ce_t = s.g.col(k).adjoint() * s.W_t;
    const std::complex<double> alpha = cu(k);
    double beta = 1.0, chi = 0.0, omega = 0.0;
    std::complex<double> cross = 0.0;
    for (int j = 0; j < s.K(); ++j) {
      chi += std::norm(ce(j));
      if (j != k) {
        beta += std::norm(cu(j));
        omega += std::norm(ce(j));
        cross += std::conj(ce(j)) * ce_t(j);
      }
    }
    const double a2 = std::norm(s.alpha_t(k));
    // rate bound
    double term = std::log1p(a2 / s.beta_t(k)) - a2 / s.beta_t(k);
    term += 2.0 * std::real(std::conj(s.alpha_t(k)) * alpha) / s.beta_t(k);
    term -= a2 * (beta + std::norm(alpha)) / (s.beta_t(k) * (s.beta_t(k) + a2));
    // Eve interference bound
    const double wt2 = s.omega_wt_sq(k);
    term += std::log1p(wt2) + 2.0 * std::real(cross) - wt2 - wt2 * (1.0 + omega) / (1.0 + wt2);
    // Eve total-power bound
    term += -std::log1p(s.chi_t(k)) - (1.0 + chi) / (1.0 + s.chi_t(k)) + 1.0;
    lb += s.eta(k) * term;
  }
  return lb;
}

double true_weighted_objective(const BfFixture& f, const BeamformerSet& W) {
  return wssr(f.s, f.agg, W, f.mu).objective;
}

}  // namespace

TEST_CASE("zero Eve channels zero the surrogate Eve pieces") {
  BfFixture f = make_fixture(101);
  for (int r = 0; r < f.s.R; ++r)
    for (int k = 0; k < f.s.K; ++k) f.ch.F_eve[r][k].setZero();
  for (int b = 0; b < f.s.B; ++b) f.ch.H_eve[b].setZero();
  f.agg = aggregate_channels(f.ch, f.s);
  const BfSurrogate s = build_bf_surrogate(f.agg, f.W_t, f.mu, f.eta);
  for (int k = 0; k < f.s.K; ++k) {
    CHECK(s.chi_t(k) == 0.0);
    CHECK(s.omega_gram(k).norm() == 0.0);
  }
}

TEST_CASE("single user has no interference term") {
  BfFixture f = make_fixture(102, 2, 1, 1, 2, 2);
  CHECK(f.surr.beta_t(0) == 1.0);
  CHECK(f.surr.omega_wt_sq(0) == 0.0);
}

TEST_CASE("alpha coefficients match their direct evaluation") {
  BfFixture f = make_fixture(103);
  for (int k = 0; k < f.s.K; ++k) {
    const std::complex<double> direct =
        (f.mu.vec().adjoint() * f.agg.h_user[k] * f.W_t.W.col(k)).value();
    CHECK(std::abs(f.surr.alpha_t(k) - direct) < 1e-12 * (1.0 + std::abs(direct)));
  }
}

TEST_CASE("omega gram operator is PSD with a zero k-th block") {
  BfFixture f = make_fixture(104);
  const int mb = f.surr.mb();
  for (int k = 0; k < f.s.K; ++k) {
    const MatC om = f.surr.omega_gram(k);
    CHECK(om.block(k * mb, k * mb, mb, mb).norm() == 0.0);
    Eigen::SelfAdjointEigenSolver<MatC> es(om, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() > -1e-12);
    // quadratic form matches the structured evaluation
    VecC wvec(mb * f.s.K);
    CounterRng rng(104, StreamKind::generic, 7, k);
    for (int i = 0; i < wvec.size(); ++i) wvec(i) = rng.cnormal();
    double structured = 0.0;
    for (int j = 0; j < f.s.K; ++j)
      if (j != k)
        structured += std::norm(f.surr.g.col(k).dot(wvec.segment(j * mb, mb)));
    const double dense = std::real(wvec.dot(om * wvec));
    CHECK(structured == doctest::Approx(dense).epsilon(1e-10));
  }
}

TEST_CASE("surrogate objective at W = 0 keeps only the constant pieces") {
  BfFixture f = make_fixture(105);
  const BeamformerSet zero = BeamformerSet::zero(f.s.M, f.s.B, f.s.K);
  double expect = 0.0;
  for (int k = 0; k < f.s.K; ++k) {
    const double a2 = std::norm(f.surr.alpha_t(k));
    expect += f.eta(k) * a2 * 1.0 / (f.surr.beta_t(k) * (f.surr.beta_t(k) + a2));
  }
  CHECK(bf_surrogate_objective(f.surr, zero) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("surrogate touches the negated true objective at the expansion point") {
  for (std::uint64_t seed : {105u, 106u, 107u}) {
    BfFixture f = make_fixture(seed);
    // reconstructed constants dropped between the bound and the minimization form
    double consts = 0.0;
    for (int k = 0; k < f.s.K; ++k) {
      const double a2 = std::norm(f.surr.alpha_t(k));
      const double wt2 = f.surr.omega_wt_sq(k);
      consts += f.eta(k) * (std::log1p(a2 / f.surr.beta_t(k)) - a2 / f.surr.beta_t(k));
      consts += f.eta(k) * (std::log1p(wt2) - wt2 - wt2 / (1.0 + wt2));
      consts += f.eta(k) * (-std::log1p(f.surr.chi_t(k)) + 1.0 - 1.0 / (1.0 + f.surr.chi_t(k)));
    }
    const double lhs = bf_surrogate_objective(f.surr, f.W_t);
    const double rhs = -true_weighted_objective(f, f.W_t) + consts;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
  }
}

TEST_CASE("surrogate objective scales linearly in the weights") {
  BfFixture f = make_fixture(108);
  BfSurrogate doubled = f.surr;
  doubled.eta *= 2.0;
  CHECK(bf_surrogate_objective(doubled, f.W_t) ==
        doctest::Approx(2.0 * bf_surrogate_objective(f.surr, f.W_t)).epsilon(1e-12));
}

TEST_CASE("minorant property: surrogate lower-bounds the true objective") {
  int checked = 0;
  for (std::uint64_t seed = 200; seed < 220; ++seed) {
    BfFixture f = make_fixture(seed);
    CounterRng rng(seed, StreamKind::generic, 3);
    for (int trial = 0; trial < 5; ++trial) {
      BeamformerSet W = f.W_t;
      for (int k = 0; k < f.s.K; ++k)
        for (int i = 0; i < W.W.rows(); ++i) W.W(i, k) = 0.02 * rng.cnormal();
      const double truth = true_weighted_objective(f, W);
      const double bound = surrogate_lower_bound(f.surr, W);
      CHECK(truth >= bound - 1e-9);
      ++checked;
    }
    // touching at the expansion point
    const double t0 = true_weighted_objective(f, f.W_t);
    const double b0 = surrogate_lower_bound(f.surr, f.W_t);
    CHECK(std::abs(t0 - b0) < 1e-9);
  }
  CHECK(checked == 100);
}

TEST_CASE("qp with zero linear term returns the origin") {
  // crafted surrogate: pure PSD quadratic, no linear pull
  BfSurrogate s;
  s.M = 1;
  s.B = 1;
  s.eta = Eigen::VectorXd::Ones(1);
  s.alpha_t = VecC::Zero(1);
  s.beta_t = Eigen::VectorXd::Ones(1);
  s.chi_t = Eigen::VectorXd::Zero(1);
  s.omega_wt_sq = Eigen::VectorXd::Zero(1);
  s.c = MatC::Zero(1, 1);
  s.g = MatC::Ones(1, 1);
  s.W_t = MatC::Zero(1, 1);
  const QpResult res = solve_bf_qp(s, {4.0}, 1e-10);
  CHECK(res.W.W.norm() < 1e-6);
  CHECK(res.converged);
}

TEST_CASE("scalar qp oracle, interior optimum") {
  // f(w) = 0.5 |w|^2 - 2 Re(w); unconstrained optimum w = 2 (scalar calculus)
  BfSurrogate s;
  s.M = 1;
  s.B = 1;
  s.eta = Eigen::VectorXd::Ones(1);
  s.alpha_t = VecC::Ones(1);
  s.beta_t = Eigen::VectorXd::Ones(1);
  s.chi_t = Eigen::VectorXd::Zero(1);
  s.omega_wt_sq = Eigen::VectorXd::Zero(1);
  s.c = MatC::Ones(1, 1);
  s.g = MatC::Zero(1, 1);
  s.W_t = MatC::Zero(1, 1);
  const QpResult res = solve_bf_qp(s, {9.0}, 1e-10);
  CHECK(std::abs(res.W.W(0, 0) - std::complex<double>(2.0, 0.0)) < 1e-6);
  CHECK(res.converged);
}

TEST_CASE("scalar qp oracle, active power constraint") {
  // same objective, budget 1: optimum sits on the boundary at w = 1
  BfSurrogate s;
  s.M = 1;
  s.B = 1;
  s.eta = Eigen::VectorXd::Ones(1);
  s.alpha_t = VecC::Ones(1);
  s.beta_t = Eigen::VectorXd::Ones(1);
  s.chi_t = Eigen::VectorXd::Zero(1);
  s.omega_wt_sq = Eigen::VectorXd::Zero(1);
  s.c = MatC::Ones(1, 1);
  s.g = MatC::Zero(1, 1);
  s.W_t = MatC::Zero(1, 1);
  const QpResult res = solve_bf_qp(s, {1.0}, 1e-10);
  CHECK(std::abs(res.W.W(0, 0) - std::complex<double>(1.0, 0.0)) < 1e-6);
  CHECK(res.converged);
}

TEST_CASE("qp never worsens the surrogate relative to the expansion point") {
  for (std::uint64_t seed : {301u, 302u, 303u, 304u}) {
    BfFixture f = make_fixture(seed);
    const QpResult res = solve_bf_qp(f.surr, f.s.power_budget, 1e-8);
    CHECK(bf_surrogate_objective(f.surr, res.W) <=
          bf_surrogate_objective(f.surr, f.W_t) + 1e-12);
    // per-BS feasibility
    for (int b = 0; b < f.s.B; ++b)
      CHECK(res.W.bs_power(b) <= f.s.power_budget[b] * (1.0 + 1e-8));
  }
}

TEST_CASE("qp solutions satisfy the stationarity contract") {
  BfFixture f = make_fixture(305);
  const QpResult res = solve_bf_qp(f.surr, f.s.power_budget, 1e-8);
  CHECK(res.converged);
  CHECK(res.complementarity <= 1e-8);
}
