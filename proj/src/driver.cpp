#include "riscf/driver.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace riscf {

namespace {

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

Eigen::VectorXd bs_powers(const Scenario& s, const BeamformerSet& W) {
  Eigen::VectorXd p(s.B);
  for (int b = 0; b < s.B; ++b) p(b) = W.bs_power(b);
  return p;
}

Eigen::VectorXd weights_of(const Scenario& s) {
  return Eigen::Map<const Eigen::VectorXd>(s.weights.data(), s.K);
}

}  // namespace

std::pair<BeamformerSet, PhaseVector> initialize(const Scenario& s, const ChannelSet& ch,
                                                 CounterRng& rng) {
  PhaseVector mu = PhaseVector::random(s.reflect_dim(), rng);
  const AggregateChannels agg = aggregate_channels(ch, s);

  BeamformerSet W = BeamformerSet::zero(s.M, s.B, s.K);
  for (int k = 0; k < s.K; ++k) W.W.col(k) = agg.h_user[k].adjoint() * mu.vec();
  // Per-BS rescale so every BS meets its power constraint with equality.
  for (int b = 0; b < s.B; ++b) {
    auto rows = W.W.middleRows(b * s.M, s.M);
    const double p = rows.squaredNorm();
    rows *= (p > 0.0) ? std::sqrt(s.power_budget[b] / p) : 0.0;
  }
  return {std::move(W), std::move(mu)};
}

namespace {

struct AoStep {
  int qp_iters = 0;
  int admm_iters = 0;
};

// One W-then-mu alternation shared by both algorithms.
AoStep ao_iteration(const Scenario& s, const AggregateChannels& agg, const SolverConfig& cfg,
                    BeamformerSet& W, PhaseVector& mu) {
  AoStep step;
  const Eigen::VectorXd eta = weights_of(s);

  const BfSurrogate surr = build_bf_surrogate(agg, W, mu, eta);
  QpResult qp = solve_bf_qp(surr, s.power_budget, cfg.qp_tol, cfg.qp_max_iters);
  W = std::move(qp.W);
  step.qp_iters = qp.iterations;

  if (cfg.optimize_phases && s.reflect_dim() > 0) {
    const PhaseQuadratic q = build_phase_quadratic(agg, W, mu, eta);
    AdmmResult admm = admm_solve(q, mu, cfg.admm_tol, cfg.admm_max_iters);
    mu = (cfg.phase_bits > 0) ? project_discrete(admm.mu, cfg.phase_bits)
                              : std::move(admm.mu);
    step.admm_iters = admm.iterations;
  }
  return step;
}

RunResult run_ao(const Scenario& s, const ChannelSet& channels, const SolverConfig& cfg,
                 bool with_assignment) {
  s.validate();
  if (with_assignment && s.R < 1)
    throw std::invalid_argument("algorithm2: requires R >= 1");

  const double t_start = now_ms();
  const Eigen::VectorXd eta = weights_of(s);

  RunResult res;
  res.L = Eigen::MatrixXd::Ones(std::max(s.R, 0), s.K);

  ChannelSet masked = with_assignment ? apply_assignment(channels, res.L) : channels;
  AggregateChannels agg = aggregate_channels(masked, s);

  CounterRng init_rng(cfg.rng_seed, StreamKind::phase_init);
  auto [W, mu] = initialize(s, masked, init_rng);

  WssrValue value = wssr(s, agg, W, mu);
  IterationRow row0;
  row0.iter = 0;
  row0.wssr_nats = value.objective;
  row0.wssr_clamped_nats = value.clamped;
  row0.user_rates = value.per_user;
  row0.bs_power = bs_powers(s, W);
  row0.wall_ms = now_ms() - t_start;
  res.trace.push_back(row0);

  double rs_prev = value.objective;
  for (int t = 1; t <= cfg.max_ao_iters; ++t) {
    const double t_iter = now_ms();
    IterationRow row;
    row.iter = t;

    const AoStep step = ao_iteration(s, agg, cfg, W, mu);
    row.qp_iters = step.qp_iters;
    row.admm_iters = step.admm_iters;

    if (with_assignment) {
      AggregateChannels full_agg;  // only the assignment-domain parts are needed
      refresh_assignment_domain(full_agg, channels, s, mu);

      std::vector<Eigen::MatrixXd> expansion(s.K);
      for (int k = 0; k < s.K; ++k) {
        Eigen::VectorXd u_prev(s.R + 1);
        u_prev.head(s.R) = res.L.col(k);
        u_prev(s.R) = 1.0;
        expansion[k] = lift_assignment(u_prev);
      }
      const AssignmentProblem prob =
          build_assignment_problem(full_agg, W, eta, s.r_assign, std::move(expansion));
      const LcrSolution sol = solve_lcr_sdp(prob, cfg.sdp_tol);
      row.sdp_gap = sol.gap;

      Eigen::MatrixXd L_new(s.R, s.K);
      for (int k = 0; k < s.K; ++k)
        L_new.col(k) = round_assignment(sol.u[k], s.r_assign).head(s.R);

      bool l_capped = true;  // the all-ones bootstrap may exceed the C5 cap
      for (int k = 0; k < s.K; ++k) l_capped = l_capped && res.L.col(k).sum() <= s.r_assign;

      if (L_new != res.L) {
        // Greedy acceptance keeps the AO trace monotone: once the working
        // assignment is cap-feasible, a rounded update is adopted only if
        // it does not lose WSSR at the current (W, mu).
        const ChannelSet masked_new = apply_assignment(channels, L_new);
        const AggregateChannels agg_new = aggregate_channels(masked_new, s);
        const double rs_new = wssr(s, agg_new, W, mu).objective;
        const double rs_old = wssr(s, agg, W, mu).objective;
        if (!l_capped || rs_new >= rs_old) {
          res.L = L_new;
          masked = masked_new;
          agg = agg_new;
        }
      }
    }

    value = wssr(s, agg, W, mu);
    row.wssr_nats = value.objective;
    row.wssr_clamped_nats = value.clamped;
    row.user_rates = value.per_user;
    row.bs_power = bs_powers(s, W);
    row.wall_ms = now_ms() - t_iter;
    res.trace.push_back(row);
    res.iterations = t;

    if (value.objective - rs_prev <= cfg.epsilon) {
      res.converged = true;
      break;
    }
    rs_prev = value.objective;
  }

  res.W = std::move(W);
  res.mu = std::move(mu);
  res.final_wssr = value.objective;
  res.final_wssr_clamped = value.clamped;
  return res;
}

}  // namespace

RunResult algorithm1(const Scenario& s, const ChannelSet& ch, const SolverConfig& cfg) {
  return run_ao(s, ch, cfg, /*with_assignment=*/false);
}

RunResult algorithm2(const Scenario& s, const ChannelSet& ch, const SolverConfig& cfg) {
  return run_ao(s, ch, cfg, /*with_assignment=*/true);
}

ScheduleResult run_coherence_schedule(const Scenario& s, const SolverConfig& cfg,
                                      int n_small_blocks) {
  if (n_small_blocks < 1)
    throw std::invalid_argument("run_coherence_schedule: need at least one small block");

  ScheduleResult out;
  const ChannelSet full = synthesize_channels(s, 0);
  out.large_block = algorithm2(s, full, cfg);

  SolverConfig small_cfg = cfg;
  small_cfg.algorithm = Algorithm::ao;

  for (int block = 1; block <= n_small_blocks; ++block) {
    // Restricted CSI: only the assigned reflect links are sampled.
    const ChannelSet ch = synthesize_channels_masked(s, out.large_block.L,
                                                     static_cast<std::uint32_t>(block));
    out.small_blocks.push_back(algorithm1(s, ch, small_cfg));
  }
  for (int r = 0; r < s.R; ++r)
    for (int k = 0; k < s.K; ++k)
      (out.large_block.L(r, k) != 0.0 ? out.channels_drawn_small : out.channels_skipped_small) += 1;
  return out;
}

SweepParam parse_sweep_param(const std::string& name) {
  if (name == "power_dbm") return SweepParam::power_dbm;
  if (name == "ris_elements") return SweepParam::ris_elements;
  if (name == "user_line_x") return SweepParam::user_line_x;
  if (name == "num_users") return SweepParam::num_users;
  if (name == "r_assign") return SweepParam::r_assign;
  if (name == "phase_bits") return SweepParam::phase_bits;
  throw std::invalid_argument("unknown sweep parameter: " + name);
}

Scenario apply_sweep_value(const Scenario& base, SweepParam param, double value) {
  Scenario s = base;
  switch (param) {
    case SweepParam::power_dbm:
      for (double& p : s.power_budget) p = dbm_to_watt(value);
      break;
    case SweepParam::ris_elements:
      s.N = static_cast<int>(std::lround(value));
      break;
    case SweepParam::user_line_x: {
      // Users on a ±5 m line around x = value at y = 50, Eve below at y = 40.
      const double z = 1.5;
      for (int k = 0; k < s.K; ++k) {
        const double offset = 5.0 * (k - (s.K - 1) * 0.5);
        s.user_positions[k] = Vec3(value + offset, 50.0, z);
      }
      s.eve_position = Vec3(value, 40.0, z);
      break;
    }
    case SweepParam::num_users: {
      const int K = static_cast<int>(std::lround(value));
      if (K < 1) throw std::invalid_argument("num_users must be >= 1");
      s.K = K;
      s.user_positions.resize(K);
      for (int k = 0; k < K; ++k)
        s.user_positions[k] = Vec3(30.0 + (k + 1), 50.0, 1.5);
      s.noise_user.assign(K, base.noise_user.front());
      s.weights.assign(K, base.weights.front());
      break;
    }
    case SweepParam::r_assign:
      s.r_assign = static_cast<int>(std::lround(value));
      break;
    case SweepParam::phase_bits:
      s.phase_bits = static_cast<int>(std::lround(value));
      break;
  }
  s.validate();
  return s;
}

std::vector<SweepRow> run_sweep(const Scenario& base, const SolverConfig& cfg,
                                SweepParam param, const std::vector<double>& values,
                                const std::vector<std::uint64_t>& seeds) {
  if (values.empty() || seeds.empty())
    throw std::invalid_argument("run_sweep: values and seeds must be nonempty");

  struct Cell {
    double value;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (double v : values)
    for (std::uint64_t seed : seeds) cells.push_back({v, seed});

  std::vector<SweepRow> rows(cells.size());
  std::atomic<size_t> next{0};

  auto worker = [&]() {
    while (true) {
      const size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      const double t0 = now_ms();

      Scenario s = apply_sweep_value(base, param, cells[i].value);
      s.rng_seed = cells[i].seed;
      SolverConfig run_cfg = cfg;
      run_cfg.rng_seed = cells[i].seed;
      run_cfg.phase_bits = s.phase_bits;

      const ChannelSet ch = synthesize_channels(s);
      const RunResult res = (run_cfg.algorithm == Algorithm::assign)
                                ? algorithm2(s, ch, run_cfg)
                                : algorithm1(s, ch, run_cfg);

      rows[i] = SweepRow{cells[i].value,          cells[i].seed, res.final_wssr,
                         res.final_wssr_clamped,  res.iterations, now_ms() - t0};
    }
  };

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned n_threads = std::min<unsigned>(hw, cells.size());
  std::vector<std::thread> pool;
  for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return rows;
}

}  // namespace riscf
