// SPDX-License-Identifier: Apache-2.0

#ifndef MXLQR_CONFIG_HPP
#define MXLQR_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mxlqr/cg.hpp"
#include "mxlqr/lq.hpp"
#include "mxlqr/materials.hpp"
#include "mxlqr/propagator.hpp"

namespace mxlqr {

// Configuration or CLI usage error; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct ExperimentConfig {
  struct Grid {
    int nx = 8;
    int ny = 8;
  } grid;

  struct Time {
    double T = 1.0;
    int nt = 64;
  } time;

  struct Materials {
    std::string eps_kind = "const";  // const | gaussian-bump
    double eps_value = 1.0;
    double eps_amplitude = 0.5;
    double eps_center_x = 0.5;
    double eps_center_y = 0.5;
    double eps_width = 0.2;
    double mu_value = 1.0;
    double sigma_value = 0.0;
  } materials;

  struct Boundary {
    double kappa = 1.0;
  } boundary;

  struct Problem {
    double alpha = 1.0;
    int s_index = 0;
    std::string terminal_weight = "identity";  // identity | resolvent_smoothed
    int terminal_n = 8;
  } problem;

  struct InitialState {
    std::string preset = "gaussian";  // gaussian | boundary-silent | random
    double center_x = 0.5;
    double center_y = 0.5;
    double width = 0.4;
    double amplitude = 1.0;
    std::uint64_t seed = 1;
  } initial_state;

  struct Solver {
    double cg_tol = 1e-10;
    int cg_max_iter = 0;  // 0 -> automatic
  } solver;

  struct Study {
    std::vector<int> n_list = {1, 2, 4, 8, 16, 32, 64};
    int num_probes = 2;
    std::vector<int> sample_steps;  // empty -> quartile steps
    std::vector<int> p_eval_steps;  // empty -> {0, nt/2}
    int admissibility_samples = 8;
  } study;

  struct Output {
    std::string dir = "out";
    std::vector<std::string> formats = {"json", "csv"};
  } output;

  // parses key = value text or JSON depending on file extension;
  // unknown keys are rejected with the offending location
  static ExperimentConfig load(const std::string& path);
  static ExperimentConfig from_text(const std::string& text,
                                    const std::string& origin = "<string>");
  static ExperimentConfig from_json_text(const std::string& text,
                                         const std::string& origin = "<string>");

  void validate() const;

  std::vector<int> effective_sample_steps() const;
  std::vector<int> effective_p_eval_steps() const;
};

// Builders shared by the CLI and the tests.
MaterialField build_materials(const ExperimentConfig& cfg);
std::shared_ptr<const Propagator> build_propagator(const ExperimentConfig& cfg);
LqProblem build_problem(const ExperimentConfig& cfg,
                        std::shared_ptr<const Propagator> prop);
StateVector build_initial_state(const ExperimentConfig& cfg, const GridDims& dims,
                                std::uint64_t seed_override);
std::vector<StateVector> build_probes(const ExperimentConfig& cfg,
                                      const GridDims& dims, std::uint64_t seed);

}  // namespace mxlqr

#endif  // MXLQR_CONFIG_HPP
