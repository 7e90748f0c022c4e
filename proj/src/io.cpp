#include "riscf/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace riscf {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string trace_csv(int K, const std::vector<IterationRow>& rows) {
  std::ostringstream out;
  out << "iter,wssr_nats,wssr_clamped_nats";
  for (int k = 1; k <= K; ++k) out << ",rate_user_" << k;
  out << ",admm_iters,qp_iters,sdp_gap,wall_ms\n";
  for (const auto& r : rows) {
    out << r.iter << ',' << format_double(r.wssr_nats) << ','
        << format_double(r.wssr_clamped_nats);
    for (int k = 0; k < K; ++k)
      out << ',' << format_double(k < r.user_rates.size() ? r.user_rates(k) : 0.0);
    out << ',' << r.admm_iters << ',' << r.qp_iters << ',' << format_double(r.sdp_gap) << ','
        << format_double(r.wall_ms) << '\n';
  }
  return out.str();
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "param_value,seed,final_wssr_nats,final_wssr_clamped_nats,iters,total_ms\n";
  for (const auto& r : rows) {
    out << format_double(r.param_value) << ',' << r.seed << ','
        << format_double(r.final_wssr_nats) << ',' << format_double(r.final_wssr_clamped_nats)
        << ',' << r.iters << ',' << format_double(r.total_ms) << '\n';
  }
  return out.str();
}

std::string result_json(const Scenario& s, const RunResult& res) {
  nlohmann::json j;
  j["dims"] = {{"B", s.B}, {"R", s.R}, {"K", s.K}, {"M", s.M}, {"N", s.N}};
  j["wssr_nats"] = res.final_wssr;
  j["wssr_clamped_nats"] = res.final_wssr_clamped;
  j["iterations"] = res.iterations;
  j["converged"] = res.converged;

  std::vector<double> w_re, w_im;
  for (int k = 0; k < res.W.K(); ++k)
    for (int i = 0; i < res.W.W.rows(); ++i) {
      w_re.push_back(res.W.W(i, k).real());
      w_im.push_back(res.W.W(i, k).imag());
    }
  j["W"] = {{"rows", res.W.W.rows()}, {"cols", res.W.W.cols()}, {"re", w_re}, {"im", w_im}};

  std::vector<double> mu_re, mu_im;
  for (int i = 0; i < res.mu.dim(); ++i) {
    mu_re.push_back(res.mu.vec()(i).real());
    mu_im.push_back(res.mu.vec()(i).imag());
  }
  j["mu"] = {{"size", res.mu.dim()}, {"re", mu_re}, {"im", mu_im}};

  std::vector<int> l_flat;
  for (int r = 0; r < res.L.rows(); ++r)
    for (int k = 0; k < res.L.cols(); ++k) l_flat.push_back(res.L(r, k) != 0.0 ? 1 : 0);
  j["L"] = {{"rows", res.L.rows()}, {"cols", res.L.cols()}, {"values", l_flat}};

  return j.dump(2) + "\n";
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << content;
}

}  // namespace riscf
