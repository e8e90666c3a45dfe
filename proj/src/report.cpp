// SPDX-License-Identifier: Apache-2.0

#include "mxlqr/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mxlqr {

void RunReport::add(const CheckResult& c) {
  for (const auto& existing : checks) {
    if (existing.name == c.name) {
      throw std::logic_error("RunReport: duplicate check '" + c.name + "'");
    }
  }
  checks.push_back(c);
}

nlohmann::ordered_json RunReport::to_json(bool include_timings) const {
  nlohmann::ordered_json j;
  j["schema"] = schema;
  j["subcommand"] = subcommand;
  j["config"] = config_echo;
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    nlohmann::ordered_json e;
    e["name"] = c.name;
    e["value"] = c.value;
    e["mode"] = c.mode;
    if (c.mode == "pass-fail") {
      e["tolerance"] = c.tolerance;
      e["status"] = c.passed ? "pass" : "fail";
    } else {
      e["status"] = "report-only";
    }
    arr.push_back(e);
  }
  j["checks"] = arr;
  if (!tables.is_null()) j["tables"] = tables;
  j["all_passed"] = all_passed();
  if (include_timings && !timings.is_null()) j["timings"] = timings;
  return j;
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << contents;
  }
  fs::rename(tmp, target);
}

void write_report(const RunReport& report, const std::string& dir) {
  write_file_atomic(dir + "/report.json", report.to_json().dump(2) + "\n");
}

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<double>>& rows) {
  std::ostringstream os;
  os.precision(12);
  os << header << "\n";
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) os << ",";
      os << row[i];
    }
    os << "\n";
  }
  write_file_atomic(path, os.str());
}

}  // namespace mxlqr
