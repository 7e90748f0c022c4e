#pragma once

#include <string>
#include <vector>

#include "riscf/driver.hpp"

namespace riscf {

// Locale-independent full-precision formatting ("%.17g").
std::string format_double(double v);

std::string trace_csv(int K, const std::vector<IterationRow>& rows);
std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string result_json(const Scenario& s, const RunResult& res);

void write_file(const std::string& path, const std::string& content);

}  // namespace riscf
