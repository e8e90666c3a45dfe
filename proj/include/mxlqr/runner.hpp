// SPDX-License-Identifier: Apache-2.0

#ifndef MXLQR_RUNNER_HPP
#define MXLQR_RUNNER_HPP

#include <cstdint>
#include <string>

#include "mxlqr/config.hpp"
#include "mxlqr/report.hpp"

namespace mxlqr {

inline constexpr const char* kSubcommands[] = {
    "solve", "feedback", "transition", "approx",
    "zero-sigma", "admissibility", "oracle-compare"};

// Runs one experiment pipeline: builds the system from the config, executes
// the subcommand's checks, writes report.json and CSV tables into out_dir.
// seed = 0 means "use the config's seeds".
RunReport run_experiment(const std::string& subcommand, const ExperimentConfig& cfg,
                         std::uint64_t seed, const std::string& out_dir);

// 0 = all pass-mode checks pass, 1 = some check failed
int exit_code(const RunReport& report);

// number of worker threads allowed for study fan-out (MXLQR_THREADS, >= 1)
int fanout_threads();

}  // namespace mxlqr

#endif  // MXLQR_RUNNER_HPP
