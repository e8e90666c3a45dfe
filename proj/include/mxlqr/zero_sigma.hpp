// SPDX-License-Identifier: Apache-2.0

#ifndef MXLQR_ZERO_SIGMA_HPP
#define MXLQR_ZERO_SIGMA_HPP

#include <memory>
#include <vector>

#include "mxlqr/lq.hpp"

namespace mxlqr {

// The sigma = 0 specialization: the dual Riccati operator
//   Q(t) x = (1/alpha) int_t^T e^{(r-t)A*} B B* e^{(r-t)A} x dr
//            + e^{(T-t)A*} e^{(T-t)A} x
// by composite trapezoid on the step nodes, its inverse action, and the
// explicit open-loop representation g(t) = -(1/alpha) B* e^{tA} Q(0)^{-1} y0.
//
// Invariant: with sigma = 0 the group term equals x to machine precision,
// so Q(t) >= I.
class QHandle {
 public:
  QHandle(std::shared_ptr<const Propagator> prop, double alpha = 1.0,
          CgOptions cg = {});

  const Propagator& propagator() const { return *prop_; }
  double alpha() const { return alpha_; }

  StateVector q_apply(int k_t, const StateVector& x) const;
  StateVector q_inverse_apply(int k_t, const StateVector& x,
                              CgReport* report = nullptr) const;

  struct OpenLoop {
    ControlTrajectory g_hat;
    std::vector<StateVector> y_hat;  // nodes 0..nt, y(t_k) = Q(t_k) z(t_k)
    CgReport cg_report;
  };
  OpenLoop open_loop(const StateVector& y0) const;

  // |d/dt (Q x, y) - (Q x, A* y) - (A* x, Q y) + (1/alpha)(B* x, B* y)_U|
  // at an interior node, the time derivative by centered differences,
  // normalized by ||x|| ||y||.
  double dual_re_residual(int k_t, const StateVector& x, const StateVector& y) const;

  // max over probes of || P(Q x) - x || / ||x|| with P the matrix-free
  // Riccati action of `prob` (requires G = I, matching alpha)
  double pq_identity_error(const LqProblem& prob, int k_t,
                           const std::vector<StateVector>& probes) const;

  double lambda_max_estimate(int k_t, int n_iter, std::uint64_t seed) const;

 private:
  std::shared_ptr<const Propagator> prop_;
  double alpha_ = 1.0;
  CgOptions cg_;
};

}  // namespace mxlqr

#endif  // MXLQR_ZERO_SIGMA_HPP
