#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "riscf/driver.hpp"
#include "riscf/io.hpp"

using namespace riscf;

namespace {

// Baseline geometry at reduced element count: fast enough for unit tests.
Scenario small_baseline(std::uint64_t seed, int N = 8) {
  Scenario s = Scenario::baseline();
  s.N = N;
  s.rng_seed = seed;
  return s;
}

SolverConfig fast_config(std::uint64_t seed) {
  SolverConfig cfg;
  cfg.rng_seed = seed;
  return cfg;
}

// check_assignment applies the C4/C5 cap, meaningful only for algorithm2
// outputs (algorithm1 carries the no-op all-ones mask).
void check_feasibility(const Scenario& s, const RunResult& res, bool check_assignment = false) {
  for (int b = 0; b < s.B; ++b)
    CHECK(res.W.bs_power(b) <= s.power_budget[b] * (1.0 + 1e-8));
  for (int i = 0; i < res.mu.dim(); ++i)
    CHECK(std::abs(std::abs(res.mu.vec()(i)) - 1.0) <= 1e-12);
  CHECK(res.mu.vec()(res.mu.dim() - 1) == std::complex<double>(1.0, 0.0));
  if (check_assignment) {
    for (int r = 0; r < res.L.rows(); ++r) {
      for (int k = 0; k < res.L.cols(); ++k)
        CHECK((res.L(r, k) == 0.0 || res.L(r, k) == 1.0));
    }
    for (int k = 0; k < res.L.cols(); ++k) CHECK(res.L.col(k).sum() <= s.r_assign);
  }
}

}  // namespace

TEST_CASE("initialization meets the power constraints with equality") {
  const Scenario s = small_baseline(1);
  const ChannelSet ch = synthesize_channels(s);
  CounterRng rng(1, StreamKind::phase_init);
  auto [W, mu] = initialize(s, ch, rng);
  for (int b = 0; b < s.B; ++b)
    CHECK(W.bs_power(b) == doctest::Approx(s.power_budget[b]).epsilon(1e-12));

  CounterRng rng2(1, StreamKind::phase_init);
  auto [W2, mu2] = initialize(s, ch, rng2);
  CHECK(oracles::same_matrix(W.W, W2.W));
  CHECK(oracles::same_matrix(mu.vec(), mu2.vec()));
}

TEST_CASE("initialization is the matched filter for a single link") {
  Scenario s = small_baseline(2);
  s.B = 1;
  s.K = 1;
  s.bs_positions.resize(1);
  s.user_positions.resize(1);
  s.power_budget.resize(1);
  s.noise_user.resize(1);
  s.weights.resize(1);
  const ChannelSet ch = synthesize_channels(s);
  CounterRng rng(2, StreamKind::phase_init);
  auto [W, mu] = initialize(s, ch, rng);

  const AggregateChannels agg = aggregate_channels(ch, s);
  const VecC mf = agg.h_user[0].adjoint() * mu.vec();
  const VecC expect = mf * std::sqrt(s.power_budget[0] / mf.squaredNorm());
  CHECK((W.W.col(0) - expect).norm() < 1e-12 * expect.norm());
  CHECK(W.bs_power(0) == doctest::Approx(s.power_budget[0]).epsilon(1e-12));
}

TEST_CASE("algorithm1 without RIS degenerates to beamforming only") {
  Scenario s = small_baseline(3);
  s.R = 0;
  s.N = 0;
  s.ris_positions.clear();
  const ChannelSet ch = synthesize_channels(s);
  const RunResult res = algorithm1(s, ch, fast_config(3));
  CHECK(res.mu.dim() == 1);
  CHECK(res.converged);
  CHECK(res.final_wssr >= res.trace.front().wssr_nats - 1e-6);
  check_feasibility(s, res);
}

TEST_CASE("algorithm1 with zero power converges immediately to zero") {
  Scenario s = small_baseline(4);
  s.power_budget.assign(s.B, 0.0);
  const ChannelSet ch = synthesize_channels(s);
  const RunResult res = algorithm1(s, ch, fast_config(4));
  CHECK(res.converged);
  CHECK(res.iterations == 1);
  CHECK(res.final_wssr == 0.0);
  CHECK(res.W.W.norm() == 0.0);
}

TEST_CASE("algorithm1 improves monotonically and converges on the small baseline") {
  for (std::uint64_t seed : {5u, 6u, 7u}) {
    const Scenario s = small_baseline(seed);
    const ChannelSet ch = synthesize_channels(s);
    const RunResult res = algorithm1(s, ch, fast_config(seed));
    CHECK(res.converged);
    CHECK(res.iterations <= 30);
    CHECK(res.final_wssr >= res.trace.front().wssr_nats - 1e-6);
    for (size_t i = 1; i < res.trace.size(); ++i)
      CHECK(res.trace[i].wssr_nats >= res.trace[i - 1].wssr_nats - 1e-3);
    check_feasibility(s, res);
  }
}

TEST_CASE("discrete projection never beats the continuous run") {
  for (std::uint64_t seed : {8u, 9u}) {
    const Scenario s = small_baseline(seed);
    const ChannelSet ch = synthesize_channels(s);
    const RunResult cont = algorithm1(s, ch, fast_config(seed));
    SolverConfig cfg = fast_config(seed);
    cfg.phase_bits = 3;
    const RunResult disc = algorithm1(s, ch, cfg);
    CHECK(disc.final_wssr <= cont.final_wssr + 1e-6);
    for (int i = 0; i < disc.mu.reflect_count(); ++i) {
      const double phase = std::arg(disc.mu.vec()(i));
      const double step = 2.0 * M_PI / 8.0;
      const double snapped = std::round(phase / step) * step;
      CHECK(std::abs(std::remainder(phase - snapped, 2.0 * M_PI)) < 1e-9);
    }
  }
}

TEST_CASE("algorithm2 with full assignment allowance matches algorithm1's quality") {
  for (std::uint64_t seed : {10u, 11u}) {
    Scenario s = small_baseline(seed);
    s.r_assign = s.R;
    const ChannelSet ch = synthesize_channels(s);
    const RunResult base = algorithm1(s, ch, fast_config(seed));
    SolverConfig cfg = fast_config(seed);
    cfg.algorithm = Algorithm::assign;
    const RunResult assigned = algorithm2(s, ch, cfg);
    CHECK(assigned.final_wssr >= base.final_wssr - 1e-6);
    check_feasibility(s, assigned, /*check_assignment=*/true);
  }
}

TEST_CASE("algorithm2 keeps the near RIS for a single user") {
  Scenario s;
  s.B = 1;
  s.R = 2;
  s.K = 1;
  s.M = 3;
  s.N = 6;
  s.bs_positions = {{0.0, 0.0, 4.0}};
  s.user_positions = {{40.0, 20.0, 1.5}};
  s.eve_position = {45.0, 10.0, 1.5};
  s.ris_positions = {{41.0, 21.0, 4.0}, {500.0, 400.0, 8.0}};
  s.power_budget = {1e-3};
  s.noise_user = {1e-11};
  s.noise_eve = 1e-11;
  s.weights = {1.0};
  s.r_assign = 1;
  s.rng_seed = 12;

  const ChannelSet ch = synthesize_channels(s);
  SolverConfig cfg = fast_config(12);
  cfg.algorithm = Algorithm::assign;
  const RunResult res = algorithm2(s, ch, cfg);
  CHECK(res.L(0, 0) == 1.0);
  CHECK(res.L(1, 0) == 0.0);

  // enumeration oracle on the final state agrees that RIS 0 is the pick
  AggregateChannels agg = aggregate_channels(ch, s);
  refresh_assignment_domain(agg, ch, s, res.mu);
  const AssignmentProblem prob = build_assignment_problem(
      agg, res.W, Eigen::VectorXd::Ones(1), 1, full_assignment_expansion(2, 1));
  double best = 1e300;
  Eigen::VectorXd best_u;
  for (const auto& u : oracles::enumerate_binary_assignments(2, 1)) {
    const double val = eval_g(prob, lift_assignment(u), 0);
    if (val < best) {
      best = val;
      best_u = u;
    }
  }
  CHECK(best_u(0) == 1.0);
  CHECK(best_u(1) == 0.0);
}

TEST_CASE("coherence schedule reuses the assignment across small blocks") {
  Scenario s = small_baseline(13, 6);
  SolverConfig cfg = fast_config(13);
  const ScheduleResult sched = run_coherence_schedule(s, cfg, 2);
  CHECK(sched.small_blocks.size() == 2);
  CHECK(sched.channels_drawn_small + sched.channels_skipped_small == s.R * s.K);
  for (int k = 0; k < s.K; ++k) CHECK(sched.large_block.L.col(k).sum() <= s.r_assign);
  for (const RunResult& block : sched.small_blocks) {
    CHECK(block.trace.size() >= 2);
    check_feasibility(s, block);
  }

  // small blocks must draw fresh fading: final values differ from the large block
  CHECK(sched.small_blocks[0].final_wssr != sched.large_block.final_wssr);
}

TEST_CASE("fixed assignment beats a random assignment on average") {
  double fixed_sum = 0.0, random_sum = 0.0;
  for (std::uint64_t seed = 14; seed < 24; ++seed) {
    Scenario s = small_baseline(seed, 6);
    SolverConfig cfg = fast_config(seed);
    const ScheduleResult sched = run_coherence_schedule(s, cfg, 1);
    fixed_sum += sched.small_blocks[0].final_wssr;

    // adversarial comparison: a uniformly random assignment of the same budget
    CounterRng rng(seed, StreamKind::generic, 77);
    Eigen::MatrixXd random_L = Eigen::MatrixXd::Zero(s.R, s.K);
    for (int k = 0; k < s.K; ++k)
      random_L(static_cast<int>(rng.uniform01() * s.R) % s.R, k) = 1.0;
    const ChannelSet ch = synthesize_channels_masked(s, random_L, 1);
    random_sum += algorithm1(s, ch, cfg).final_wssr;
  }
  CHECK(fixed_sum >= random_sum - 1e-9);
}

TEST_CASE("sweep produces one ordered row per cell and is repeatable") {
  Scenario s = small_baseline(17, 4);
  SolverConfig cfg = fast_config(17);
  const std::vector<double> values{-10.0, 0.0};
  const std::vector<std::uint64_t> seeds{3u, 4u};
  const auto rows = run_sweep(s, cfg, SweepParam::power_dbm, values, seeds);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].param_value == -10.0);
  CHECK(rows[0].seed == 3);
  CHECK(rows[1].seed == 4);
  CHECK(rows[2].param_value == 0.0);

  const auto again = run_sweep(s, cfg, SweepParam::power_dbm, values, seeds);
  for (size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].final_wssr_nats == again[i].final_wssr_nats);
    CHECK(rows[i].final_wssr_clamped_nats == again[i].final_wssr_clamped_nats);
    CHECK(rows[i].iters == again[i].iters);
  }
}

TEST_CASE("sweep parameter names parse or reject cleanly") {
  CHECK(parse_sweep_param("power_dbm") == SweepParam::power_dbm);
  CHECK(parse_sweep_param("ris_elements") == SweepParam::ris_elements);
  CHECK(parse_sweep_param("user_line_x") == SweepParam::user_line_x);
  CHECK(parse_sweep_param("num_users") == SweepParam::num_users);
  CHECK(parse_sweep_param("r_assign") == SweepParam::r_assign);
  CHECK(parse_sweep_param("phase_bits") == SweepParam::phase_bits);
  CHECK_THROWS_AS(parse_sweep_param("bandwidth"), std::invalid_argument);
}

TEST_CASE("sweep value application reshapes the scenario") {
  const Scenario base = Scenario::baseline();
  const Scenario p = apply_sweep_value(base, SweepParam::power_dbm, 10.0);
  CHECK(p.power_budget[0] == doctest::Approx(1e-2).epsilon(1e-12));

  const Scenario n = apply_sweep_value(base, SweepParam::ris_elements, 20.0);
  CHECK(n.N == 20);

  const Scenario line = apply_sweep_value(base, SweepParam::user_line_x, 60.0);
  CHECK(line.user_positions[0].x() == doctest::Approx(55.0));
  CHECK(line.user_positions[2].x() == doctest::Approx(65.0));
  CHECK(line.eve_position.x() == doctest::Approx(60.0));

  const Scenario users = apply_sweep_value(base, SweepParam::num_users, 5.0);
  CHECK(users.K == 5);
  CHECK(users.user_positions.size() == 5);
  CHECK(users.noise_user.size() == 5);

  const Scenario ra = apply_sweep_value(base, SweepParam::r_assign, 2.0);
  CHECK(ra.r_assign == 2);
}

TEST_CASE("trace and sweep CSV layouts are stable") {
  Scenario s = small_baseline(18, 4);
  const ChannelSet ch = synthesize_channels(s);
  const RunResult res = algorithm1(s, ch, fast_config(18));
  const std::string trace = trace_csv(s.K, res.trace);
  CHECK(trace.rfind("iter,wssr_nats,wssr_clamped_nats,rate_user_1,rate_user_2,rate_user_3,"
                    "admm_iters,qp_iters,sdp_gap,wall_ms\n", 0) == 0);
  // one header plus one line per trace row
  CHECK(static_cast<int>(std::count(trace.begin(), trace.end(), '\n')) ==
        1 + static_cast<int>(res.trace.size()));

  std::vector<SweepRow> rows{{1.0, 2, 0.5, 0.5, 3, 1.0}};
  const std::string sweep = sweep_csv(rows);
  CHECK(sweep.rfind("param_value,seed,final_wssr_nats,final_wssr_clamped_nats,iters,total_ms\n",
                    0) == 0);
}
