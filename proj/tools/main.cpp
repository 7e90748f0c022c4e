#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "riscf/driver.hpp"
#include "riscf/io.hpp"

namespace fs = std::filesystem;
using namespace riscf;

namespace {

std::vector<double> parse_double_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& csv) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoull(item));
  return out;
}

struct CommonOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::int64_t seed = -1;
  int phase_bits = -1;
  int r_assign = -1;
  std::string algorithm = "ao";
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--config", opt.config_path, "scenario JSON config")->required();
  cmd->add_option("--out", opt.out_dir, "output directory");
  cmd->add_option("--seed", opt.seed, "RNG seed (overrides the config)");
  cmd->add_option("--phase-bits", opt.phase_bits, "discrete phase bits, 0 = continuous");
  cmd->add_option("--r-assign", opt.r_assign, "max RISs per user");
  cmd->add_option("--algorithm", opt.algorithm, "ao | assign")
      ->check(CLI::IsMember({"ao", "assign"}));
}

Scenario load_scenario(const CommonOptions& opt) {
  Scenario s = Scenario::from_json_file(opt.config_path);
  if (opt.seed >= 0) s.rng_seed = static_cast<std::uint64_t>(opt.seed);
  if (opt.phase_bits >= 0) s.phase_bits = opt.phase_bits;
  if (opt.r_assign >= 0) s.r_assign = opt.r_assign;
  s.validate();
  return s;
}

SolverConfig make_config(const Scenario& s, const CommonOptions& opt) {
  SolverConfig cfg;
  cfg.rng_seed = s.rng_seed;
  cfg.phase_bits = s.phase_bits;
  cfg.algorithm = (opt.algorithm == "assign") ? Algorithm::assign : Algorithm::ao;
  return cfg;
}

void emit_run(const Scenario& s, const RunResult& res, const std::string& out_dir,
              const std::string& trace_name = "trace.csv") {
  fs::create_directories(out_dir);
  write_file((fs::path(out_dir) / trace_name).string(), trace_csv(s.K, res.trace));
  write_file((fs::path(out_dir) / "result.json").string(), result_json(s, res));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RIS-aided cell-free secrecy-rate optimizer"};
  app.require_subcommand(1);

  CommonOptions opt;
  int schedule_blocks = 1;
  std::string sweep_param, sweep_values_csv, seeds_csv;

  CLI::App* cmd_optimize = app.add_subcommand("optimize", "joint W / phase optimization");
  add_common(cmd_optimize, opt);

  CLI::App* cmd_assign = app.add_subcommand("assign", "joint optimization with RIS assignment");
  add_common(cmd_assign, opt);

  CLI::App* cmd_schedule = app.add_subcommand("schedule", "two-coherence-time workflow");
  add_common(cmd_schedule, opt);
  cmd_schedule->add_option("--blocks", schedule_blocks, "number of small coherence blocks")
      ->check(CLI::PositiveNumber);

  CLI::App* cmd_sweep = app.add_subcommand("sweep", "parameter sweep to CSV");
  add_common(cmd_sweep, opt);
  cmd_sweep->add_option("--sweep-param", sweep_param, "parameter name")->required();
  cmd_sweep->add_option("--sweep-values", sweep_values_csv, "comma-separated values")->required();
  cmd_sweep->add_option("--seeds", seeds_csv, "comma-separated seeds")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  try {
    const Scenario s = load_scenario(opt);
    SolverConfig cfg = make_config(s, opt);

    if (cmd_optimize->parsed()) {
      const ChannelSet ch = synthesize_channels(s);
      const RunResult res = algorithm1(s, ch, cfg);
      emit_run(s, res, opt.out_dir);
      std::cout << "wssr_nats=" << format_double(res.final_wssr)
                << " clamped=" << format_double(res.final_wssr_clamped)
                << " iters=" << res.iterations << (res.converged ? "" : " (cap hit)") << "\n";
    } else if (cmd_assign->parsed()) {
      cfg.algorithm = Algorithm::assign;
      const ChannelSet ch = synthesize_channels(s);
      const RunResult res = algorithm2(s, ch, cfg);
      emit_run(s, res, opt.out_dir);
      std::cout << "wssr_nats=" << format_double(res.final_wssr)
                << " clamped=" << format_double(res.final_wssr_clamped)
                << " iters=" << res.iterations << (res.converged ? "" : " (cap hit)") << "\n";
    } else if (cmd_schedule->parsed()) {
      const ScheduleResult sched = run_coherence_schedule(s, cfg, schedule_blocks);
      fs::create_directories(opt.out_dir);
      write_file((fs::path(opt.out_dir) / "trace_large.csv").string(),
                 trace_csv(s.K, sched.large_block.trace));
      for (size_t i = 0; i < sched.small_blocks.size(); ++i) {
        const std::string name = "trace_small_" + std::to_string(i + 1) + ".csv";
        write_file((fs::path(opt.out_dir) / name).string(),
                   trace_csv(s.K, sched.small_blocks[i].trace));
      }
      write_file((fs::path(opt.out_dir) / "result.json").string(),
                 result_json(s, sched.large_block));
      std::cout << "large_wssr_nats=" << format_double(sched.large_block.final_wssr)
                << " small_blocks=" << sched.small_blocks.size() << "\n";
    } else if (cmd_sweep->parsed()) {
      SweepParam param;
      std::vector<double> values;
      std::vector<std::uint64_t> seeds;
      try {
        param = parse_sweep_param(sweep_param);
        values = parse_double_list(sweep_values_csv);
        seeds = parse_seed_list(seeds_csv);
        if (values.empty() || seeds.empty()) throw std::invalid_argument("empty sweep lists");
      } catch (const std::exception& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
      }
      const std::vector<SweepRow> rows = run_sweep(s, cfg, param, values, seeds);
      fs::create_directories(opt.out_dir);
      write_file((fs::path(opt.out_dir) / "sweep.csv").string(), sweep_csv(rows));
      std::cout << "sweep rows=" << rows.size() << "\n";
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
