// SPDX-License-Identifier: Apache-2.0

#ifndef MXLQR_APPROX_HPP
#define MXLQR_APPROX_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "mxlqr/lq.hpp"

namespace mxlqr {

// G_n y = n (nI - A)^{-1} y, the resolvent approximant of the identity.
StateVector gn_apply(const MaxwellOperators& ops, int n, const StateVector& y);
// its Y-adjoint n (nI - A*)^{-1}
StateVector gn_star_apply(const MaxwellOperators& ops, int n, const StateVector& y);

// Open-loop solve of the approximating problem with terminal weight G_n.
OpenLoopSolution solve_problem_n(const LqProblem& base, int n, const StateVector& y0);

// Errors of the approximating problems against the identity-weight reference,
// one row per n: control, state (sup over nodes), optimal value, and Riccati
// action on each probe at each evaluation step.
struct ConvergenceTable {
  std::vector<int> n_values;
  std::vector<double> cost_n;        // J_n(g_n)
  std::vector<double> g_err;         // ||g_n - g||_{L2 U}
  std::vector<double> y_err_sup;     // sup_t ||y_n(t) - y(t)||_Y
  std::vector<double> cost_err;      // |J_n(g_n) - J(g)|
  std::vector<int> p_eval_steps;     // step indices where P_n is compared
  // p_err[row][probe * n_steps + step_slot]
  std::vector<std::vector<double>> p_err;

  double g_norm = 0.0;                 // reference ||g||
  double cost_ref = 0.0;               // reference J(g)
  std::vector<double> probe_norms;     // ||z||_Y per probe

  void write_csv(std::ostream& os) const;
  std::string csv_header() const;
};

ConvergenceTable convergence_study(const LqProblem& prob, const StateVector& y0,
                                   const std::vector<int>& n_list,
                                   const std::vector<StateVector>& probes,
                                   const std::vector<int>& p_eval_steps,
                                   int max_threads = 1);

}  // namespace mxlqr

#endif  // MXLQR_APPROX_HPP
