// SPDX-License-Identifier: Apache-2.0

#ifndef MXLQR_REPORT_HPP
#define MXLQR_REPORT_HPP

#include <string>
#include <vector>

#include <json.hpp>

namespace mxlqr {

inline constexpr const char* kReportSchema = "mxlqr-report/1";

// One verification entry in a run report. Modes:
//   "pass-fail"   - value compared against tolerance, contributes to exit code
//   "report-only" - recorded, never fails the run
struct CheckResult {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  std::string mode = "pass-fail";
  bool passed = true;

  static CheckResult pass_fail(const std::string& name, double value,
                               double tolerance, bool ok) {
    return {name, value, tolerance, "pass-fail", ok};
  }
  static CheckResult upper_bound(const std::string& name, double value,
                                 double tolerance) {
    return {name, value, tolerance, "pass-fail", value <= tolerance};
  }
  static CheckResult report_only(const std::string& name, double value) {
    return {name, value, 0.0, "report-only", true};
  }
};

struct RunReport {
  std::string schema = kReportSchema;
  std::string subcommand;
  nlohmann::ordered_json config_echo;
  std::vector<CheckResult> checks;
  nlohmann::ordered_json tables;   // small inline result tables
  nlohmann::ordered_json timings;  // excluded from determinism guarantees

  bool all_passed() const {
    for (const auto& c : checks) {
      if (c.mode == "pass-fail" && !c.passed) return false;
    }
    return true;
  }

  void add(const CheckResult& c);
  nlohmann::ordered_json to_json(bool include_timings = true) const;
};

// temp-file + rename
void write_file_atomic(const std::string& path, const std::string& contents);

void write_report(const RunReport& report, const std::string& dir);
void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<double>>& rows);

}  // namespace mxlqr

#endif  // MXLQR_REPORT_HPP
