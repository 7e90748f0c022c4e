#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "riscf/rng.hpp"

namespace riscf {

using Vec3 = Eigen::Vector3d;
using MatC = Eigen::MatrixXcd;
using VecC = Eigen::VectorXcd;

struct PathLossExponents {
  double bu = 3.5;  // BS -> user
  double be = 3.5;  // BS -> Eve
  double ru = 2.5;  // RIS -> user
  double re = 2.5;  // RIS -> Eve
  double br = 2.0;  // BS -> RIS
};

struct RicianFactors {
  double bu = 0.0;
  double be = 0.0;
  double br = 3.0;
  double ru = 3.0;
  double re = 3.0;
};

// Experiment geometry, radio parameters and solver-facing knobs. The single
// source of truth for one run; all powers are stored linear (watts).
struct Scenario {
  int B = 0;  // base stations
  int R = 0;  // RISs
  int K = 1;  // users
  int M = 1;  // antennas per BS
  int N = 0;  // elements per RIS

  std::vector<Vec3> bs_positions;
  std::vector<Vec3> ris_positions;
  std::vector<Vec3> user_positions;
  Vec3 eve_position{0.0, 0.0, 0.0};

  std::vector<double> power_budget;  // watts, per BS
  std::vector<double> noise_user;    // watts, per user
  double noise_eve = 1e-11;          // watts
  std::vector<double> weights;       // eta_k in [0, 1]

  PathLossExponents pathloss_exponents;
  RicianFactors rician_factors;
  double L0 = 1e-3;  // linear gain at reference distance
  double d0 = 1.0;   // meters
  double antenna_spacing_over_wavelength = 0.5;

  int r_assign = 1;
  int phase_bits = 0;  // 0 = continuous phases
  std::uint64_t rng_seed = 1;

  // The paper writes both F_{r,e} and F_{r,e,k}; default shares one Eve
  // reflect channel per RIS across users, a flag enables per-user draws.
  bool eve_reflect_per_user = false;

  void validate() const;  // throws std::invalid_argument on violations

  int mb() const { return M * B; }
  int reflect_dim() const { return N * R; }

  static Scenario baseline();  // B=3, K=3, R=2, M=5, N=50 reference layout
  static Scenario from_json_text(const std::string& text);
  static Scenario from_json_file(const std::string& path);
};

// Raw per-link complex channels. Entries follow the receive-side convention:
// the physical downlink row channel is H^H (see synthesize_channels).
struct ChannelSet {
  std::vector<std::vector<VecC>> H_user;  // [B][K], each M x 1
  std::vector<VecC> H_eve;                // [B],    each M x 1
  std::vector<std::vector<MatC>> G;       // [B][R], each N x M
  std::vector<std::vector<VecC>> F_user;  // [R][K], each N x 1
  std::vector<std::vector<VecC>> F_eve;   // [R][K], each N x 1
};

// L0 * (d / d0)^(-tau); throws std::domain_error for non-positive distances.
double path_loss(double d, double tau, double L0, double d0);

// ULA steering vector: entry i = exp(j * 2*pi * spacing * i * sin(angle)).
VecC steering_vector(double angle, int count, double spacing_over_wavelength);

// sqrt(K'/(K'+1)) * q(aoa) q(aod)^H + sqrt(1/(K'+1)) * H_nlos, with H_nlos
// entries i.i.d. CN(0, 1). aoa steers the row-side array, aod the column
// side. Throws std::domain_error for negative K'.
MatC rician_channel(int rows, int cols, double k_factor, double aoa,
                    double aod, CounterRng& rng,
                    double spacing_over_wavelength = 0.5);

// Draws every link channel from its own stream of scenario.rng_seed;
// deterministic. `block` salts the small-scale draws for coherence-time
// schedules (same geometry, fresh fading).
ChannelSet synthesize_channels(const Scenario& s, std::uint32_t block = 0);

// Restricted-CSI synthesis: only links selected by the binary R x K
// assignment matrix are drawn; masked reflect channels are zero vectors that
// were never sampled. Per-stream draws match synthesize_channels exactly.
ChannelSet synthesize_channels_masked(const Scenario& s,
                                      const Eigen::MatrixXd& assignment,
                                      std::uint32_t block = 0);

double dbm_to_watt(double dbm);
double watt_to_dbm(double watt);
double db_to_linear(double db);

}  // namespace riscf
