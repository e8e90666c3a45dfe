// SPDX-License-Identifier: Apache-2.0

#include <cstdint>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "mxlqr/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"mxlqr: optimal boundary control of the 2D TM Maxwell system"};
  app.require_subcommand(1);

  struct Args {
    std::string config;
    std::string out;
    std::uint64_t seed = 0;
  };
  const std::map<std::string, std::string> blurbs = {
      {"solve", "open-loop optimal control for one problem instance"},
      {"feedback", "closed-loop residuals of the gain representation"},
      {"transition", "splitting consistency of the optimal evolution"},
      {"approx", "convergence study of the resolvent-smoothed problems"},
      {"zero-sigma", "explicit dual-Riccati route (lossless medium only)"},
      {"admissibility", "boundary trace-regularity ratio estimates"},
      {"oracle-compare", "matrix-free solvers against dense oracles"},
  };
  std::vector<std::pair<CLI::App*, Args>> subs;
  subs.reserve(std::size(mxlqr::kSubcommands));
  for (const char* name : mxlqr::kSubcommands) {
    CLI::App* sub = app.add_subcommand(name, blurbs.at(name));
    subs.emplace_back(sub, Args{});
    Args& args = subs.back().second;
    sub->add_option("--config", args.config, "experiment config file (key=value or JSON)")
        ->required();
    sub->add_option("--out", args.out, "output directory (overrides output.dir)");
    sub->add_option("--seed", args.seed, "seed override for randomized inputs");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  for (const auto& [sub, args] : subs) {
    if (!sub->parsed()) continue;
    try {
      mxlqr::ExperimentConfig cfg = mxlqr::ExperimentConfig::load(args.config);
      const std::string out_dir = args.out.empty() ? cfg.output.dir : args.out;
      mxlqr::RunReport rep =
          mxlqr::run_experiment(sub->get_name(), cfg, args.seed, out_dir);
      for (const auto& c : rep.checks) {
        if (c.mode == "pass-fail") {
          std::cout << (c.passed ? "[PASS] " : "[FAIL] ") << c.name
                    << " value=" << c.value << " tol=" << c.tolerance << "\n";
        } else {
          std::cout << "[----] " << c.name << " value=" << c.value << "\n";
        }
      }
      std::cout << "report: " << out_dir << "/report.json\n";
      return mxlqr::exit_code(rep);
    } catch (const mxlqr::ConfigError& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return 2;
    } catch (const mxlqr::SolveError& e) {
      std::cerr << "solver failure: " << e.what() << "\n";
      return 3;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    }
  }
  return 2;
}
