// SPDX-License-Identifier: Apache-2.0

#ifndef MXLQR_DENSE_ORACLE_HPP
#define MXLQR_DENSE_ORACLE_HPP

#include <Eigen/Dense>

#include "mxlqr/lq.hpp"

namespace mxlqr {

// Dense brute-force companions to the matrix-free solvers. Everything here
// is deliberately assembled the slow, explicit way; these are the ground
// truths the fast paths are tested against.

// Dense snapshot of the discrete system in raw coordinates.
struct DenseSystem {
  Eigen::MatrixXd a;        // forward generator
  Eigen::MatrixXd a_adj;    // its Y-adjoint
  Eigen::MatrixXd b;        // control injection (n x n_gamma)
  Eigen::MatrixXd b_star;   // U-adjoint trace (n_gamma x n)
  Eigen::VectorXd y_weights;
  Eigen::MatrixXd u_gram;   // U inner-product Gram matrix

  static DenseSystem build(const MaxwellOperators& ops);
};

// Column-by-column assembly of g -> (L_s g)(T) on the Crank-Nicolson grid.
// Columns are ordered slice-major: column k*n_gamma + p is the unit control
// at midpoint k, boundary node p.
Eigen::MatrixXd dense_input_map(const Propagator& prop, int k_s);

struct DenseOpenLoopResult {
  ControlTrajectory g_hat;
  double cost = 0.0;
};

// Exact minimizer of the identical discrete functional by dense normal
// equations. Guard: (nt - k_s) * n_gamma <= 5000.
DenseOpenLoopResult dense_openloop_oracle(const LqProblem& prob,
                                          const StateVector& y0);

// Backward integration of the matrix differential Riccati equation
//   P' = -(A^T P + P A) + (1/alpha) P B B^T P,  P(T) = G^T G
// in coordinates where both inner products are Euclidean, by the classical
// 4th-order one-step method on the problem's time grid.
struct DenseDreResult {
  Eigen::MatrixXd p0;           // P(0) in the Euclidean coordinates
  double cost_quadform = 0.0;   // y0^T P(0) y0
  ControlTrajectory closed_loop_g;
  double closed_loop_cost = 0.0;
};

// Guard: state dimension <= 2000. Uses the problem's terminal weight.
DenseDreResult dense_dre_oracle(const LqProblem& prob, const StateVector& y0);

// The raw integrator, exposed so degenerate systems (zeroed dynamics or
// control) can be driven directly in tests. Returns P at every node,
// index 0 = initial time.
std::vector<Eigen::MatrixXd> dense_dre_backward(const Eigen::MatrixXd& a,
                                                const Eigen::MatrixXd& b,
                                                const Eigen::MatrixXd& p_terminal,
                                                int nt, double dt, double alpha);

}  // namespace mxlqr

#endif  // MXLQR_DENSE_ORACLE_HPP
