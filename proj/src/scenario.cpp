#include "riscf/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace riscf {

double dbm_to_watt(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }
double watt_to_dbm(double watt) { return 10.0 * std::log10(watt / 1e-3); }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

void Scenario::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("scenario: " + msg); };
  if (B < 0 || R < 0 || M < 0 || N < 0) fail("counts must be nonnegative");
  if (K < 1) fail("K must be >= 1");
  if (static_cast<int>(bs_positions.size()) != B) fail("bs_positions size != B");
  if (static_cast<int>(ris_positions.size()) != R) fail("ris_positions size != R");
  if (static_cast<int>(user_positions.size()) != K) fail("user_positions size != K");
  if (static_cast<int>(power_budget.size()) != B) fail("power_budget size != B");
  if (static_cast<int>(noise_user.size()) != K) fail("noise_user size != K");
  if (static_cast<int>(weights.size()) != K) fail("weights size != K");
  for (double p : power_budget)
    if (!(p >= 0.0)) fail("power budgets must be nonnegative");
  for (double n : noise_user)
    if (!(n > 0.0)) fail("user noise powers must be positive");
  if (!(noise_eve > 0.0)) fail("eve noise power must be positive");
  for (double w : weights)
    if (!(w >= 0.0 && w <= 1.0)) fail("weights must lie in [0, 1]");
  if (!(L0 > 0.0)) fail("L0 must be positive");
  if (!(d0 > 0.0)) fail("d0 must be positive");
  if (R > 0 && (r_assign < 1 || r_assign > R)) fail("r_assign must be in [1, R]");
  if (phase_bits < 0) fail("phase_bits must be nonnegative");
}

Scenario Scenario::baseline() {
  Scenario s;
  s.B = 3;
  s.R = 2;
  s.K = 3;
  s.M = 5;
  s.N = 50;
  // Three BSs on the y=0 line; the reference text lists two identical BS
  // coordinates, evidently a typo, so the third is placed at x=90 to keep
  // the spacing pattern symmetric around the user cluster.
  s.bs_positions = {{10.0, 0.0, 4.0}, {50.0, 0.0, 4.0}, {90.0, 0.0, 4.0}};
  s.ris_positions = {{30.0, 60.0, 8.0}, {70.0, 60.0, 8.0}};
  s.user_positions = {{30.0, 50.0, 1.5}, {35.0, 50.0, 1.5}, {40.0, 50.0, 1.5}};
  s.eve_position = {35.0, 40.0, 1.5};
  s.power_budget.assign(3, dbm_to_watt(0.0));
  s.noise_user.assign(3, dbm_to_watt(-80.0));
  s.noise_eve = dbm_to_watt(-80.0);
  s.weights.assign(3, 1.0);
  s.L0 = db_to_linear(-30.0);
  return s;
}

namespace {

Vec3 parse_vec3(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3) throw std::invalid_argument("scenario: positions must be [x, y, z]");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

std::vector<Vec3> parse_positions(const nlohmann::json& j) {
  std::vector<Vec3> out;
  for (const auto& p : j) out.push_back(parse_vec3(p));
  return out;
}

// Accepts either a scalar (replicated to `count`) or an array of length
// `count`; `conv` maps the stored unit to watts/linear.
std::vector<double> parse_scaled(const nlohmann::json& j, int count, double (*conv)(double)) {
  std::vector<double> out;
  if (j.is_array()) {
    for (const auto& v : j) out.push_back(conv(v.get<double>()));
  } else {
    out.assign(count, conv(j.get<double>()));
  }
  if (static_cast<int>(out.size()) != count) throw std::invalid_argument("scenario: array length mismatch");
  return out;
}

double identity_unit(double x) { return x; }

}  // namespace

Scenario Scenario::from_json_text(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  Scenario s = Scenario::baseline();

  if (j.contains("B")) s.B = j["B"].get<int>();
  if (j.contains("R")) s.R = j["R"].get<int>();
  if (j.contains("K")) s.K = j["K"].get<int>();
  if (j.contains("M")) s.M = j["M"].get<int>();
  if (j.contains("N")) s.N = j["N"].get<int>();

  if (j.contains("bs_positions")) s.bs_positions = parse_positions(j["bs_positions"]);
  if (j.contains("ris_positions")) s.ris_positions = parse_positions(j["ris_positions"]);
  if (j.contains("user_positions")) s.user_positions = parse_positions(j["user_positions"]);
  if (j.contains("eve_position")) s.eve_position = parse_vec3(j["eve_position"]);

  if (j.contains("power_budget")) s.power_budget = parse_scaled(j["power_budget"], s.B, identity_unit);
  if (j.contains("power_budget_dbm")) s.power_budget = parse_scaled(j["power_budget_dbm"], s.B, dbm_to_watt);
  if (j.contains("noise_user")) s.noise_user = parse_scaled(j["noise_user"], s.K, identity_unit);
  if (j.contains("noise_user_dbm")) s.noise_user = parse_scaled(j["noise_user_dbm"], s.K, dbm_to_watt);
  if (j.contains("noise_eve")) s.noise_eve = j["noise_eve"].get<double>();
  if (j.contains("noise_eve_dbm")) s.noise_eve = dbm_to_watt(j["noise_eve_dbm"].get<double>());
  if (j.contains("weights")) s.weights = parse_scaled(j["weights"], s.K, identity_unit);

  if (j.contains("pathloss_exponents")) {
    const auto& p = j["pathloss_exponents"];
    if (p.contains("bu")) s.pathloss_exponents.bu = p["bu"].get<double>();
    if (p.contains("be")) s.pathloss_exponents.be = p["be"].get<double>();
    if (p.contains("ru")) s.pathloss_exponents.ru = p["ru"].get<double>();
    if (p.contains("re")) s.pathloss_exponents.re = p["re"].get<double>();
    if (p.contains("br")) s.pathloss_exponents.br = p["br"].get<double>();
  }
  if (j.contains("rician_factors")) {
    const auto& p = j["rician_factors"];
    if (p.contains("bu")) s.rician_factors.bu = p["bu"].get<double>();
    if (p.contains("be")) s.rician_factors.be = p["be"].get<double>();
    if (p.contains("ru")) s.rician_factors.ru = p["ru"].get<double>();
    if (p.contains("re")) s.rician_factors.re = p["re"].get<double>();
    if (p.contains("br")) s.rician_factors.br = p["br"].get<double>();
  }

  if (j.contains("L0")) s.L0 = j["L0"].get<double>();
  if (j.contains("L0_db")) s.L0 = db_to_linear(j["L0_db"].get<double>());
  if (j.contains("d0")) s.d0 = j["d0"].get<double>();
  if (j.contains("antenna_spacing_over_wavelength"))
    s.antenna_spacing_over_wavelength = j["antenna_spacing_over_wavelength"].get<double>();
  if (j.contains("r_assign")) s.r_assign = j["r_assign"].get<int>();
  if (j.contains("phase_bits")) s.phase_bits = j["phase_bits"].get<int>();
  if (j.contains("rng_seed")) s.rng_seed = j["rng_seed"].get<std::uint64_t>();
  if (j.contains("eve_reflect_per_user")) s.eve_reflect_per_user = j["eve_reflect_per_user"].get<bool>();

  s.validate();
  return s;
}

Scenario Scenario::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("scenario: cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

double path_loss(double d, double tau, double L0, double d0) {
  if (!(d > 0.0)) throw std::domain_error("path_loss: distance must be positive");
  if (!(d0 > 0.0)) throw std::domain_error("path_loss: reference distance must be positive");
  return L0 * std::pow(d / d0, -tau);
}

VecC steering_vector(double angle, int count, double spacing_over_wavelength) {
  VecC q(count);
  const double phase_step = 2.0 * M_PI * spacing_over_wavelength * std::sin(angle);
  for (int i = 0; i < count; ++i) q(i) = std::polar(1.0, phase_step * i);
  return q;
}

MatC rician_channel(int rows, int cols, double k_factor, double aoa, double aod,
                    CounterRng& rng, double spacing_over_wavelength) {
  if (k_factor < 0.0) throw std::domain_error("rician_channel: K' must be nonnegative");
  const double w_los = std::sqrt(k_factor / (k_factor + 1.0));
  const double w_nlos = std::sqrt(1.0 / (k_factor + 1.0));

  MatC h(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) h(r, c) = rng.cnormal();

  if (w_los > 0.0) {
    const VecC qa = steering_vector(aoa, rows, spacing_over_wavelength);
    const VecC qd = steering_vector(aod, cols, spacing_over_wavelength);
    return w_los * (qa * qd.adjoint()) + w_nlos * h;
  }
  return w_nlos * h;
}

namespace {

double azimuth(const Vec3& from, const Vec3& to) {
  return std::atan2(to.y() - from.y(), to.x() - from.x());
}

double link_distance(const Vec3& a, const Vec3& b) {
  const double d = (a - b).norm();
  if (!(d > 0.0)) throw std::domain_error("synthesize_channels: coincident endpoints");
  return d;
}

MatC draw_link(const Scenario& s, const Vec3& tx, const Vec3& rx, int rows, int cols,
               double tau, double k_factor, StreamKind kind, std::uint32_t a,
               std::uint32_t b, std::uint32_t block, bool row_side_is_rx) {
  const double d = link_distance(tx, rx);
  const double gain = std::sqrt(path_loss(d, tau, s.L0, s.d0));
  CounterRng rng(s.rng_seed, kind, a, b, block);
  // aoa shapes the row-side array, aod the column side; for vector links the
  // single-antenna side's steering collapses to the scalar 1.
  const double row_angle = row_side_is_rx ? azimuth(rx, tx) : azimuth(tx, rx);
  const double col_angle = row_side_is_rx ? azimuth(tx, rx) : azimuth(rx, tx);
  MatC h = rician_channel(rows, cols, k_factor, row_angle, col_angle, rng,
                          s.antenna_spacing_over_wavelength);
  return gain * h;
}

}  // namespace

ChannelSet synthesize_channels(const Scenario& s, std::uint32_t block) {
  Eigen::MatrixXd all = Eigen::MatrixXd::Ones(std::max(s.R, 0), s.K);
  return synthesize_channels_masked(s, all, block);
}

ChannelSet synthesize_channels_masked(const Scenario& s, const Eigen::MatrixXd& assignment,
                                      std::uint32_t block) {
  s.validate();
  if (assignment.rows() != s.R || assignment.cols() != s.K)
    throw std::invalid_argument("synthesize_channels_masked: assignment must be R x K");

  ChannelSet ch;
  ch.H_user.assign(s.B, std::vector<VecC>(s.K));
  ch.H_eve.assign(s.B, VecC());
  ch.G.assign(s.B, std::vector<MatC>(s.R));
  ch.F_user.assign(s.R, std::vector<VecC>(s.K));
  ch.F_eve.assign(s.R, std::vector<VecC>(s.K));

  const auto& pl = s.pathloss_exponents;
  const auto& kf = s.rician_factors;

  for (int b = 0; b < s.B; ++b) {
    for (int k = 0; k < s.K; ++k) {
      // M x 1 vector whose adjoint is the physical 1 x M downlink row; the
      // row side is the BS array, so its steering angle lives at the BS.
      ch.H_user[b][k] = draw_link(s, s.bs_positions[b], s.user_positions[k], s.M, 1,
                                  pl.bu, kf.bu, StreamKind::direct_user, b, k, block,
                                  /*row_side_is_rx=*/false);
    }
    ch.H_eve[b] = draw_link(s, s.bs_positions[b], s.eve_position, s.M, 1, pl.be, kf.be,
                            StreamKind::direct_eve, b, 0, block, false);
  }

  std::vector<bool> ris_used(s.R, false);
  for (int r = 0; r < s.R; ++r)
    for (int k = 0; k < s.K; ++k)
      if (assignment(r, k) != 0.0) ris_used[r] = true;

  for (int r = 0; r < s.R; ++r) {
    for (int b = 0; b < s.B; ++b) {
      if (ris_used[r]) {
        ch.G[b][r] = draw_link(s, s.bs_positions[b], s.ris_positions[r], s.N, s.M,
                               pl.br, kf.br, StreamKind::bs_ris, b, r, block,
                               /*row_side_is_rx=*/true);
      } else {
        ch.G[b][r] = MatC::Zero(s.N, s.M);
      }
    }
    for (int k = 0; k < s.K; ++k) {
      if (assignment(r, k) != 0.0) {
        ch.F_user[r][k] = draw_link(s, s.ris_positions[r], s.user_positions[k], s.N, 1,
                                    pl.ru, kf.ru, StreamKind::ris_user, r, k, block,
                                    /*row_side_is_rx=*/false);
        const std::uint32_t eve_sub = s.eve_reflect_per_user ? static_cast<std::uint32_t>(k) : 0u;
        ch.F_eve[r][k] = draw_link(s, s.ris_positions[r], s.eve_position, s.N, 1, pl.re,
                                   kf.re, StreamKind::ris_eve, r, eve_sub, block, false);
      } else {
        ch.F_user[r][k] = VecC::Zero(s.N);
        ch.F_eve[r][k] = VecC::Zero(s.N);
      }
    }
  }
  return ch;
}

}  // namespace riscf
