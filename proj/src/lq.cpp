// SPDX-License-Identifier: Apache-2.0

#include "mxlqr/lq.hpp"

#include "mxlqr/spectral.hpp"

namespace mxlqr {

namespace {

ControlTrajectory traj_from_matrix(int start, const Eigen::MatrixXd& m, int nt) {
  ControlTrajectory t(start, static_cast<int>(m.rows()), nt);
  t.slices() = m;
  return t;
}

void require_covers(const LqProblem& prob, const ControlTrajectory& g) {
  if (g.start_index() != prob.k_s || g.n_slices() != prob.grid().nt - prob.k_s) {
    throw std::invalid_argument("control trajectory does not cover [k_s, nt)");
  }
}

}  // namespace

StateVector LqProblem::apply_gstar_g(const StateVector& x) const {
  const auto& ops = prop->ops();
  StateVector out(x.dims());
  switch (weight.kind) {
    case TerminalWeight::Kind::Identity:
      out = x;
      break;
    case TerminalWeight::Kind::ResolventSmoothed: {
      const double n = weight.n;
      StateVector gx = ops.resolvent_solve(n, x, Dir::Forward);
      out = ops.resolvent_solve(n, gx, Dir::Adjoint);
      out.data() *= n * n;
      break;
    }
  }
  if (weight.scale != 1.0) out.data() *= weight.scale;
  return out;
}

double evaluate_cost(const LqProblem& prob, const ControlTrajectory& g,
                     const StateVector& y0) {
  prob.validate();
  require_covers(prob, g);
  const auto& ip = prob.inner();
  StateVector y_t =
      prob.prop->propagate_final(Dir::Forward, y0, prob.k_s, prob.grid().nt, &g);
  return prob.alpha * ip.u_traj_inner(g, g, prob.grid()) +
         ip.y_inner(prob.apply_gstar_g(y_t), y_t);
}

ControlTrajectory gram_apply(const LqProblem& prob, const ControlTrajectory& g) {
  prob.validate();
  require_covers(prob, g);
  StateVector y_t = prob.prop->input_map_final(g);
  ControlTrajectory back =
      prob.prop->adjoint_input_map(prob.apply_gstar_g(y_t), prob.k_s);
  back.slices() += prob.alpha * g.slices();
  return back;
}

OpenLoopSolution solve_open_loop(const LqProblem& prob, const StateVector& y0) {
  prob.validate();
  const auto& ip = prob.inner();
  const TimeGrid& grid = prob.grid();
  const int nt = grid.nt;

  StateVector free_terminal =
      prob.prop->propagate_final(Dir::Forward, y0, prob.k_s, nt);
  ControlTrajectory rhs_traj =
      prob.prop->adjoint_input_map(prob.apply_gstar_g(free_terminal), prob.k_s);
  Eigen::MatrixXd rhs = -rhs_traj.slices();

  const double dt = grid.dt();
  auto dot = [&](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    double s = 0.0;
    for (int c = 0; c < a.cols(); ++c) {
      s += ip.boundary().u_inner(a.col(c), b.col(c));
    }
    return dt * s;
  };
  auto op = [&](const Eigen::MatrixXd& m) {
    return gram_apply(prob, traj_from_matrix(prob.k_s, m, nt)).slices();
  };

  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(rhs.rows(), rhs.cols());
  OpenLoopSolution sol;
  sol.cg_report = cg_solve(op, rhs, dot, x, prob.cg);
  if (!sol.cg_report.converged) {
    throw SolveError("solve_open_loop: CG did not converge (iters=" +
                     std::to_string(sol.cg_report.iterations) + ", rel res=" +
                     std::to_string(sol.cg_report.relative_residual) + ")");
  }
  sol.g_hat = traj_from_matrix(prob.k_s, x, nt);
  sol.y_hat = prob.prop->propagate(Dir::Forward, y0, prob.k_s, nt, &sol.g_hat);
  sol.cost = prob.alpha * ip.u_traj_inner(sol.g_hat, sol.g_hat, grid) +
             ip.y_inner(prob.apply_gstar_g(sol.y_hat.back()), sol.y_hat.back());
  return sol;
}

StateVector riccati_apply(const LqProblem& prob, int k_t, const StateVector& x) {
  prob.validate();
  const int nt = prob.grid().nt;
  if (k_t < prob.k_s || k_t > nt) {
    throw std::invalid_argument("riccati_apply: step index out of range");
  }
  if (k_t == nt) {
    return prob.apply_gstar_g(x);  // terminal value P(T) = G*G
  }
  LqProblem sub = prob;
  sub.k_s = k_t;
  OpenLoopSolution sol = solve_open_loop(sub, x);
  StateVector w = prob.apply_gstar_g(sol.terminal_state());
  return prob.prop->propagate_final(Dir::Adjoint, w, k_t, nt);
}

FeedbackReport feedback_residual(const LqProblem& prob, const StateVector& y0,
                                 const std::vector<int>& sample_steps) {
  prob.validate();
  const int nt = prob.grid().nt;
  for (int k : sample_steps) {
    if (k <= prob.k_s || k >= nt) {
      throw std::invalid_argument("feedback_residual: sample steps must lie in (k_s, nt)");
    }
  }
  const auto& ip = prob.inner();
  FeedbackReport rep;
  if (ip.y_norm(y0) == 0.0) {
    for (int k : sample_steps) rep.samples.push_back({k, 0.0, 0.0});
    return rep;  // 0/0 reported as 0 by convention
  }

  OpenLoopSolution sol = solve_open_loop(prob, y0);
  rep.control_norm = ip.u_traj_norm(sol.g_hat, prob.grid());
  const double inv_alpha = 1.0 / prob.alpha;

  // one backward sweep from the terminal state of the solve from s
  ControlTrajectory gain_cheap = prob.prop->adjoint_input_map(
      prob.apply_gstar_g(sol.terminal_state()), prob.k_s);

  for (int k : sample_steps) {
    FeedbackSample smp;
    smp.step = k;
    BoundarySlice r_cheap = sol.g_hat.slice(k) + inv_alpha * gain_cheap.slice(k);
    smp.cheap_residual = ip.boundary().u_norm(r_cheap) / rep.control_norm;

    LqProblem sub = prob;
    sub.k_s = k;
    OpenLoopSolution sol_k = solve_open_loop(sub, sol.y_hat[k - prob.k_s]);
    ControlTrajectory gain_k =
        prob.prop->adjoint_input_map(prob.apply_gstar_g(sol_k.terminal_state()), k);
    BoundarySlice r_ind = sol.g_hat.slice(k) + inv_alpha * gain_k.slice(k);
    smp.independent_residual = ip.boundary().u_norm(r_ind) / rep.control_norm;
    rep.samples.push_back(smp);
  }
  return rep;
}

TransitionReport transition_check(const LqProblem& prob, const StateVector& y0,
                                  int k_tau, int k_t) {
  prob.validate();
  const int nt = prob.grid().nt;
  if (!(prob.k_s <= k_tau && k_tau <= k_t && k_t <= nt && k_tau < nt)) {
    throw std::invalid_argument("transition_check: need k_s <= k_tau <= k_t <= nt");
  }
  const auto& ip = prob.inner();
  OpenLoopSolution sol_s = solve_open_loop(prob, y0);

  LqProblem sub = prob;
  sub.k_s = k_tau;
  OpenLoopSolution sol_tau =
      solve_open_loop(sub, sol_s.y_hat[k_tau - prob.k_s]);

  TransitionReport rep;
  const double y0_norm = ip.y_norm(y0);
  StateVector diff(y0.dims(), sol_tau.y_hat[k_t - k_tau].data() -
                                  sol_s.y_hat[k_t - prob.k_s].data());
  rep.state_error = y0_norm > 0.0 ? ip.y_norm(diff) / y0_norm : 0.0;

  ControlTrajectory tail_diff = sol_tau.g_hat;
  const int offset = k_tau - prob.k_s;
  tail_diff.slices() -=
      sol_s.g_hat.slices().rightCols(sol_s.g_hat.n_slices() - offset);
  const double tail_norm = ip.u_traj_norm(sol_tau.g_hat, prob.grid());
  rep.control_error =
      tail_norm > 0.0 ? ip.u_traj_norm(tail_diff, prob.grid()) / tail_norm : 0.0;
  return rep;
}

CoercivityReport coercivity_estimate(const LqProblem& prob, int k_t, int n_iter,
                                     std::uint64_t seed) {
  prob.validate();
  const auto& ip = prob.inner();
  const GridDims dims = prob.prop->ops().dims();
  auto op = [&](const Eigen::VectorXd& v) {
    return riccati_apply(prob, k_t, StateVector(dims, v)).data();
  };
  auto dot = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return a.cwiseProduct(ip.y_weights()).dot(b);
  };
  RitzEstimate ritz = lanczos_extremes(op, dot, dims.n_state(), n_iter, seed);
  return {ritz.smallest, ritz.largest, ritz.iterations};
}

}  // namespace mxlqr
