#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "riscf/assign_lcr.hpp"
#include "riscf/bf_sca.hpp"
#include "riscf/network.hpp"
#include "riscf/phase_admm.hpp"
#include "riscf/scenario.hpp"

namespace riscf {

enum class Algorithm { ao, assign };

struct SolverConfig {
  double epsilon = 1e-3;  // AO convergence threshold, nats
  int max_ao_iters = 50;
  double qp_tol = 1e-8;
  int qp_max_iters = 5000;
  double admm_tol = 1e-7;
  int admm_max_iters = 2000;
  double sdp_tol = 1e-7;
  int phase_bits = 0;
  Algorithm algorithm = Algorithm::ao;
  std::uint64_t rng_seed = 1;
  bool optimize_phases = true;  // false = W-only with the random initial phases
};

struct IterationRow {
  int iter = 0;
  double wssr_nats = 0.0;
  double wssr_clamped_nats = 0.0;
  Eigen::VectorXd user_rates;  // per-user unweighted secrecy terms
  Eigen::VectorXd bs_power;    // per-BS transmit power in use
  int admm_iters = 0;
  int qp_iters = 0;
  double sdp_gap = 0.0;
  double wall_ms = 0.0;
};

struct RunResult {
  BeamformerSet W;
  PhaseVector mu{VecC::Ones(1)};
  Eigen::MatrixXd L;  // R x K binary assignment (all-ones for Algorithm 1)
  std::vector<IterationRow> trace;
  bool converged = false;
  int iterations = 0;
  double final_wssr = 0.0;
  double final_wssr_clamped = 0.0;
};

// Random uniform phases (last entry 1) plus per-user matched filters,
// rescaled per BS block to meet the power constraint with equality.
std::pair<BeamformerSet, PhaseVector> initialize(const Scenario& s, const ChannelSet& ch,
                                                 CounterRng& rng);

// Alternating optimization over W (convex surrogate QP) and mu (ADMM),
// with discrete projection per iteration when phase_bits > 0.
RunResult algorithm1(const Scenario& s, const ChannelSet& ch, const SolverConfig& cfg);

// Algorithm 1 plus a per-iteration assignment update (LCR SDP + rounding);
// aggregates are rebuilt on the masked channels after each update.
RunResult algorithm2(const Scenario& s, const ChannelSet& ch, const SolverConfig& cfg);

struct ScheduleResult {
  RunResult large_block;
  std::vector<RunResult> small_blocks;
  int channels_drawn_small = 0;    // reflect links actually sampled per block
  int channels_skipped_small = 0;  // masked reflect links never sampled
};

// Fig.-2 style two-coherence-time workflow: full CSI + Algorithm 2 once,
// then per small block fresh small-scale fading restricted to the selected
// RISs and a W/mu-only refinement with the assignment held fixed.
ScheduleResult run_coherence_schedule(const Scenario& s, const SolverConfig& cfg,
                                      int n_small_blocks);

enum class SweepParam { power_dbm, ris_elements, user_line_x, num_users, r_assign, phase_bits };

SweepParam parse_sweep_param(const std::string& name);  // throws std::invalid_argument

struct SweepRow {
  double param_value = 0.0;
  std::uint64_t seed = 0;
  double final_wssr_nats = 0.0;
  double final_wssr_clamped_nats = 0.0;
  int iters = 0;
  double total_ms = 0.0;
};

Scenario apply_sweep_value(const Scenario& base, SweepParam param, double value);

// One run per (value, seed) cell; cells are independent deterministic
// pipelines executed concurrently, rows ordered by (value, seed).
std::vector<SweepRow> run_sweep(const Scenario& base, const SolverConfig& cfg,
                                SweepParam param, const std::vector<double>& values,
                                const std::vector<std::uint64_t>& seeds);

}  // namespace riscf
