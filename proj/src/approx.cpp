// SPDX-License-Identifier: Apache-2.0

#include "mxlqr/approx.hpp"

#include <algorithm>
#include <atomic>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

namespace mxlqr {

StateVector gn_apply(const MaxwellOperators& ops, int n, const StateVector& y) {
  if (n < 1) throw std::invalid_argument("gn_apply: need n >= 1");
  StateVector out = ops.resolvent_solve(n, y, Dir::Forward);
  out.data() *= static_cast<double>(n);
  return out;
}

StateVector gn_star_apply(const MaxwellOperators& ops, int n, const StateVector& y) {
  if (n < 1) throw std::invalid_argument("gn_star_apply: need n >= 1");
  StateVector out = ops.resolvent_solve(n, y, Dir::Adjoint);
  out.data() *= static_cast<double>(n);
  return out;
}

OpenLoopSolution solve_problem_n(const LqProblem& base, int n, const StateVector& y0) {
  LqProblem prob = base;
  prob.weight = TerminalWeight::resolvent_smoothed(n, base.weight.scale);
  return solve_open_loop(prob, y0);
}

std::string ConvergenceTable::csv_header() const {
  std::ostringstream os;
  os << "n,cost_n,g_err,y_err_sup,cost_err";
  const int n_probes = static_cast<int>(probe_norms.size());
  for (int z = 0; z < n_probes; ++z) {
    for (int s : p_eval_steps) os << ",p_err_z" << z << "_k" << s;
  }
  return os.str();
}

void ConvergenceTable::write_csv(std::ostream& os) const {
  os << std::setprecision(12);
  os << csv_header() << "\n";
  for (size_t r = 0; r < n_values.size(); ++r) {
    os << n_values[r] << "," << cost_n[r] << "," << g_err[r] << ","
       << y_err_sup[r] << "," << cost_err[r];
    for (double v : p_err[r]) os << "," << v;
    os << "\n";
  }
}

ConvergenceTable convergence_study(const LqProblem& prob, const StateVector& y0,
                                   const std::vector<int>& n_list,
                                   const std::vector<StateVector>& probes,
                                   const std::vector<int>& p_eval_steps,
                                   int max_threads) {
  prob.validate();
  if (!std::is_sorted(n_list.begin(), n_list.end())) {
    throw std::invalid_argument("convergence_study: n_list must be increasing");
  }
  const auto& ip = prob.inner();
  const TimeGrid& grid = prob.grid();

  // identity-weight reference
  LqProblem ref_prob = prob;
  ref_prob.weight = TerminalWeight::identity(prob.weight.scale);
  OpenLoopSolution ref = solve_open_loop(ref_prob, y0);

  std::vector<StateVector> ref_p;
  ref_p.reserve(probes.size() * p_eval_steps.size());
  for (const auto& z : probes) {
    for (int k : p_eval_steps) ref_p.push_back(riccati_apply(ref_prob, k, z));
  }

  ConvergenceTable table;
  table.n_values = n_list;
  table.p_eval_steps = p_eval_steps;
  table.g_norm = ip.u_traj_norm(ref.g_hat, grid);
  table.cost_ref = ref.cost;
  for (const auto& z : probes) table.probe_norms.push_back(ip.y_norm(z));

  const int rows = static_cast<int>(n_list.size());
  table.cost_n.resize(rows);
  table.g_err.resize(rows);
  table.y_err_sup.resize(rows);
  table.cost_err.resize(rows);
  table.p_err.assign(rows, {});

  auto run_row = [&](int r) {
    const int n = n_list[r];
    LqProblem prob_n = prob;
    prob_n.weight = TerminalWeight::resolvent_smoothed(n, prob.weight.scale);
    OpenLoopSolution sol_n = solve_open_loop(prob_n, y0);

    ControlTrajectory dg = sol_n.g_hat;
    dg.slices() -= ref.g_hat.slices();
    table.g_err[r] = ip.u_traj_norm(dg, grid);

    double sup = 0.0;
    for (size_t k = 0; k < ref.y_hat.size(); ++k) {
      StateVector d(y0.dims(), sol_n.y_hat[k].data() - ref.y_hat[k].data());
      sup = std::max(sup, ip.y_norm(d));
    }
    table.y_err_sup[r] = sup;
    table.cost_n[r] = sol_n.cost;
    table.cost_err[r] = std::abs(sol_n.cost - ref.cost);

    table.p_err[r].reserve(ref_p.size());
    size_t slot = 0;
    for (const auto& z : probes) {
      for (int k : p_eval_steps) {
        StateVector pn = riccati_apply(prob_n, k, z);
        StateVector d(z.dims(), pn.data() - ref_p[slot++].data());
        table.p_err[r].push_back(ip.y_norm(d));
      }
    }
  };

  const int workers = std::max(1, std::min<int>(max_threads, rows));
  if (workers == 1) {
    for (int r = 0; r < rows; ++r) run_row(r);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int r = next.fetch_add(1); r < rows; r = next.fetch_add(1)) run_row(r);
      });
    }
    for (auto& t : pool) t.join();
  }
  return table;
}

}  // namespace mxlqr
