#include "riscf/network.hpp"

#include <cmath>
#include <stdexcept>

namespace riscf {

PhaseVector::PhaseVector(VecC mu) : mu_(std::move(mu)) {
  if (mu_.size() < 1) throw std::invalid_argument("PhaseVector: empty");
  for (Eigen::Index n = 0; n < mu_.size(); ++n) {
    if (std::abs(std::abs(mu_(n)) - 1.0) > 1e-9)
      throw std::invalid_argument("PhaseVector: entries must be unit modulus");
  }
  if (std::abs(mu_(mu_.size() - 1) - 1.0) > 1e-9)
    throw std::invalid_argument("PhaseVector: last entry must be 1");
  mu_(mu_.size() - 1) = 1.0;
}

PhaseVector PhaseVector::identity(int reflect_count) {
  return PhaseVector(VecC::Ones(reflect_count + 1));
}

PhaseVector PhaseVector::random(int reflect_count, CounterRng& rng) {
  VecC mu(reflect_count + 1);
  for (int n = 0; n < reflect_count; ++n) mu(n) = std::polar(1.0, rng.uniform_phase());
  mu(reflect_count) = 1.0;
  return PhaseVector(std::move(mu));
}

bool BeamformerSet::feasible(const std::vector<double>& budgets, double tol) const {
  for (int b = 0; b < B; ++b)
    if (bs_power(b) > budgets[b] * (1.0 + tol) + tol * 1e-30) return false;
  return true;
}

namespace {

MatC stack_aggregate(const ChannelSet& ch, const Scenario& s,
                     const std::vector<VecC>& reflect,  // [R], each N: F channel
                     const std::vector<VecC>& direct) {  // [B], each M
  const int rows = s.N * s.R + 1;
  const int cols = s.M * s.B;
  MatC h = MatC::Zero(rows, cols);
  for (int b = 0; b < s.B; ++b) {
    for (int r = 0; r < s.R; ++r) {
      const MatC& g = ch.G[b][r];
      const VecC& f = reflect[r];
      for (int n = 0; n < s.N; ++n)
        h.block(r * s.N + n, b * s.M, 1, s.M) = std::conj(f(n)) * g.row(n);
    }
    h.block(rows - 1, b * s.M, 1, s.M) = direct[b].adjoint();
  }
  return h;
}

}  // namespace

MatC aggregate_user_channel(const ChannelSet& ch, const Scenario& s, int k) {
  std::vector<VecC> reflect(s.R);
  for (int r = 0; r < s.R; ++r) reflect[r] = ch.F_user[r][k];
  std::vector<VecC> direct(s.B);
  for (int b = 0; b < s.B; ++b) direct[b] = ch.H_user[b][k];
  return stack_aggregate(ch, s, reflect, direct);
}

MatC aggregate_eve_channel(const ChannelSet& ch, const Scenario& s, int k) {
  std::vector<VecC> reflect(s.R);
  for (int r = 0; r < s.R; ++r) reflect[r] = ch.F_eve[r][k];
  std::vector<VecC> direct(s.B);
  for (int b = 0; b < s.B; ++b) direct[b] = ch.H_eve[b];
  return stack_aggregate(ch, s, reflect, direct);
}

namespace {

// Row r of the assignment aggregate: a_{r,k} = F^H Theta_r^H G_r stacked
// over BS columns; the bottom row is the stacked direct channel adjoint.
MatC assignment_aggregate(const ChannelSet& ch, const Scenario& s, const PhaseVector& mu,
                          const std::vector<VecC>& reflect, const std::vector<VecC>& direct) {
  const int cols = s.M * s.B;
  MatC bmat = MatC::Zero(s.R + 1, cols);
  const VecC& m = mu.vec();
  for (int r = 0; r < s.R; ++r) {
    const VecC& f = reflect[r];
    for (int b = 0; b < s.B; ++b) {
      const MatC& g = ch.G[b][r];
      for (int col = 0; col < s.M; ++col) {
        std::complex<double> acc = 0.0;
        for (int n = 0; n < s.N; ++n)
          acc += std::conj(f(n)) * std::conj(m(r * s.N + n)) * g(n, col);
        bmat(r, b * s.M + col) = acc;
      }
    }
  }
  for (int b = 0; b < s.B; ++b) bmat.block(s.R, b * s.M, 1, s.M) = direct[b].adjoint();
  return bmat;
}

}  // namespace

std::pair<MatC, MatC> aggregate_assignment_channels(const ChannelSet& ch, const Scenario& s,
                                                    const PhaseVector& mu, int k) {
  std::vector<VecC> ru(s.R), re(s.R);
  for (int r = 0; r < s.R; ++r) {
    ru[r] = ch.F_user[r][k];
    re[r] = ch.F_eve[r][k];
  }
  std::vector<VecC> du(s.B), de(s.B);
  for (int b = 0; b < s.B; ++b) {
    du[b] = ch.H_user[b][k];
    de[b] = ch.H_eve[b];
  }
  return {assignment_aggregate(ch, s, mu, ru, du), assignment_aggregate(ch, s, mu, re, de)};
}

AggregateChannels aggregate_channels(const ChannelSet& ch, const Scenario& s) {
  AggregateChannels agg;
  agg.h_user.resize(s.K);
  agg.h_eve.resize(s.K);
  const double sigma_e = std::sqrt(s.noise_eve);
  for (int k = 0; k < s.K; ++k) {
    const double sigma_k = std::sqrt(s.noise_user[k]);
    agg.h_user[k] = aggregate_user_channel(ch, s, k) / sigma_k;
    agg.h_eve[k] = aggregate_eve_channel(ch, s, k) / sigma_e;
  }
  return agg;
}

void refresh_assignment_domain(AggregateChannels& agg, const ChannelSet& ch,
                               const Scenario& s, const PhaseVector& mu) {
  agg.b_user.resize(s.K);
  agg.b_eve.resize(s.K);
  const double sigma_e = std::sqrt(s.noise_eve);
  for (int k = 0; k < s.K; ++k) {
    auto [bu, be] = aggregate_assignment_channels(ch, s, mu, k);
    agg.b_user[k] = bu / std::sqrt(s.noise_user[k]);
    agg.b_eve[k] = be / sigma_e;
  }
}

double sinr(const MatC& h_agg, const VecC& stack, const BeamformerSet& W, int k) {
  const Eigen::RowVectorXcd row = stack.adjoint() * h_agg;
  const Eigen::RowVectorXcd gains = row * W.W;
  double interference = 0.0;
  for (int j = 0; j < W.K(); ++j)
    if (j != k) interference += std::norm(gains(j));
  return std::norm(gains(k)) / (interference + 1.0);
}

double secrecy_rate(double gamma_user, double gamma_eve) {
  return std::max(std::log1p(gamma_user) - std::log1p(gamma_eve), 0.0);
}

WssrValue wssr(const Scenario& s, const AggregateChannels& agg, const BeamformerSet& W,
               const PhaseVector& mu) {
  WssrValue out;
  out.per_user.resize(s.K);
  for (int k = 0; k < s.K; ++k) {
    const double gu = sinr(agg.h_user[k], mu.vec(), W, k);
    const double ge = sinr(agg.h_eve[k], mu.vec(), W, k);
    const double term = std::log1p(gu) - std::log1p(ge);
    out.per_user(k) = term;
    out.objective += s.weights[k] * term;
    out.clamped += s.weights[k] * std::max(term, 0.0);
  }
  return out;
}

}  // namespace riscf
