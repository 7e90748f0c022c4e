#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "riscf/scenario.hpp"

namespace riscf {

// Stacked reflection coefficients mu = [theta^T, 1]^T: N*R unit-modulus
// reflect entries followed by a last entry pinned to 1.
class PhaseVector {
 public:
  explicit PhaseVector(VecC mu);  // validates unit modulus and the pinned 1
  static PhaseVector identity(int reflect_count);
  static PhaseVector random(int reflect_count, CounterRng& rng);

  int dim() const { return static_cast<int>(mu_.size()); }
  int reflect_count() const { return dim() - 1; }
  const VecC& vec() const { return mu_; }

 private:
  VecC mu_;
};

// Per-user stacked beamformers; column k is w_k = [w_{1,k}^T,...,w_{B,k}^T]^T.
struct BeamformerSet {
  Eigen::MatrixXcd W;  // (M*B) x K
  int M = 0;
  int B = 0;

  BeamformerSet() = default;
  BeamformerSet(Eigen::MatrixXcd w, int m, int b) : W(std::move(w)), M(m), B(b) {}
  static BeamformerSet zero(int m, int b, int k) {
    return {Eigen::MatrixXcd::Zero(m * b, k), m, b};
  }

  int K() const { return static_cast<int>(W.cols()); }
  auto block(int b, int k) { return W.col(k).segment(b * M, M); }
  auto block(int b, int k) const { return W.col(k).segment(b * M, M); }
  double bs_power(int b) const { return W.middleRows(b * M, M).squaredNorm(); }
  bool feasible(const std::vector<double>& budgets, double tol) const;
};

// Stacked channel forms. h_* are noise-normalized (h_tilde = h / sigma) and
// fixed per channel set; b_* depend on the current phases and are refreshed
// via refresh_assignment_domain.
struct AggregateChannels {
  std::vector<MatC> h_user;  // [K], each (N*R+1) x (M*B)
  std::vector<MatC> h_eve;   // [K], same shape
  std::vector<MatC> b_user;  // [K], each (R+1) x (M*B)
  std::vector<MatC> b_eve;   // [K], same shape
};

// Raw (un-normalized) aggregate of Eq-style stacking: reflect rows are
// diag(F_k^H) G blocks, the bottom row is the stacked direct channel.
MatC aggregate_user_channel(const ChannelSet& ch, const Scenario& s, int k);
MatC aggregate_eve_channel(const ChannelSet& ch, const Scenario& s, int k);

// Raw assignment-domain aggregates: row r collapses RIS r under the given
// phases, the bottom row is the stacked direct channel.
std::pair<MatC, MatC> aggregate_assignment_channels(const ChannelSet& ch, const Scenario& s,
                                                    const PhaseVector& mu, int k);

AggregateChannels aggregate_channels(const ChannelSet& ch, const Scenario& s);
void refresh_assignment_domain(AggregateChannels& agg, const ChannelSet& ch,
                               const Scenario& s, const PhaseVector& mu);

// |v^H h w_k|^2 / (sum_{j != k} |v^H h w_j|^2 + 1) for a noise-normalized
// aggregate h and stacking vector v (phase vector or lifted assignment).
double sinr(const MatC& h_agg, const VecC& stack, const BeamformerSet& W, int k);

// max(ln(1 + g_user) - ln(1 + g_eve), 0), in nats.
double secrecy_rate(double gamma_user, double gamma_eve);

struct WssrValue {
  double objective = 0.0;    // sum_k eta_k (ln(1+g_k) - ln(1+g_ek)), unclamped
  double clamped = 0.0;      // sum_k eta_k [.]^+
  Eigen::VectorXd per_user;  // unweighted per-user secrecy terms (unclamped)
};

WssrValue wssr(const Scenario& s, const AggregateChannels& agg, const BeamformerSet& W,
               const PhaseVector& mu);

}  // namespace riscf
