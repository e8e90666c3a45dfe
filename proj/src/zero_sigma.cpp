// SPDX-License-Identifier: Apache-2.0

#include "mxlqr/zero_sigma.hpp"

#include "mxlqr/spectral.hpp"

namespace mxlqr {

QHandle::QHandle(std::shared_ptr<const Propagator> prop, double alpha, CgOptions cg)
    : prop_(std::move(prop)), alpha_(alpha), cg_(cg) {
  if (!prop_) throw std::invalid_argument("QHandle: missing propagator");
  if (!(alpha_ > 0.0)) throw std::invalid_argument("QHandle: alpha must be > 0");
  if (!prop_->ops().sigma_is_zero()) {
    throw std::invalid_argument("QHandle: requires sigma = 0 materials");
  }
}

StateVector QHandle::q_apply(int k_t, const StateVector& x) const {
  const int nt = prop_->grid().nt;
  if (k_t < 0 || k_t > nt) {
    throw std::invalid_argument("q_apply: step index out of range");
  }
  const auto& ops = prop_->ops();
  const double dt = prop_->grid().dt();
  const double ia = 1.0 / alpha_;

  if (k_t == nt) return x;  // empty integral, group term only

  // forward sweep z^j = e^{(t_j - t_k)A} x, integrand v_j = (1/alpha) B B* z^j
  const int m = nt - k_t;
  std::vector<StateVector> v(m + 1);
  StateVector z = x;
  v[0] = ops.apply_b(ops.apply_b_star(z));
  for (int j = 1; j <= m; ++j) {
    z = prop_->step_forward(z, nullptr);
    v[j] = ops.apply_b(ops.apply_b_star(z));
  }

  // backward accumulation of the trapezoid sum plus the group term, all in
  // one adjoint sweep: r^j = w_j dt v_j + C* r^{j+1}, seeded with z^{nt}
  StateVector r(x.dims(), 0.5 * dt * ia * v[m].data() + z.data());
  for (int j = m - 1; j >= 0; --j) {
    r = prop_->step_adjoint(r);
    const double w = (j == 0) ? 0.5 : 1.0;
    r.data() += w * dt * ia * v[j].data();
  }
  return r;
}

StateVector QHandle::q_inverse_apply(int k_t, const StateVector& x,
                                     CgReport* report) const {
  const auto& ip = prop_->inner();
  auto op = [&](const Eigen::VectorXd& v) {
    return q_apply(k_t, StateVector(x.dims(), v)).data();
  };
  auto dot = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return a.cwiseProduct(ip.y_weights()).dot(b);
  };
  Eigen::VectorXd sol = Eigen::VectorXd::Zero(x.data().size());
  CgReport rep = cg_solve(op, x.data(), dot, sol, cg_);
  if (report != nullptr) *report = rep;
  if (!rep.converged) {
    throw SolveError("q_inverse_apply: CG did not converge");
  }
  return StateVector(x.dims(), sol);
}

QHandle::OpenLoop QHandle::open_loop(const StateVector& y0) const {
  const int nt = prop_->grid().nt;
  const auto& ops = prop_->ops();
  OpenLoop out;
  StateVector w0 = q_inverse_apply(0, y0, &out.cg_report);

  out.g_hat = ControlTrajectory(0, ops.boundary().size(), nt);
  out.y_hat.resize(nt + 1);
  StateVector z = w0;
  out.y_hat[0] = q_apply(0, z);
  const double ia = 1.0 / alpha_;  // the alpha-scaled variant of the formula
  for (int k = 0; k < nt; ++k) {
    StateVector z_next = prop_->step_forward(z, nullptr);
    StateVector mid(z.dims(), 0.5 * (z.data() + z_next.data()));
    out.g_hat.slice(k) = -ia * ops.apply_b_star(mid);
    z = z_next;
    out.y_hat[k + 1] = q_apply(k + 1, z);
  }
  return out;
}

double QHandle::dual_re_residual(int k_t, const StateVector& x,
                                 const StateVector& y) const {
  const int nt = prop_->grid().nt;
  if (k_t <= 0 || k_t >= nt) {
    throw std::invalid_argument("dual_re_residual: interior step index required");
  }
  const auto& ops = prop_->ops();
  const auto& ip = prop_->inner();
  const double dt = prop_->grid().dt();

  const double lhs = (ip.y_inner(q_apply(k_t + 1, x), y) -
                      ip.y_inner(q_apply(k_t - 1, x), y)) /
                     (2.0 * dt);
  StateVector qx = q_apply(k_t, x);
  StateVector qy = q_apply(k_t, y);
  StateVector ax = ops.apply_a(Dir::Adjoint, x);
  StateVector ay = ops.apply_a(Dir::Adjoint, y);
  const double rhs = ip.y_inner(qx, ay) + ip.y_inner(ax, qy) -
                     (1.0 / alpha_) * ip.u_inner_slice(ops.apply_b_star(x),
                                                       ops.apply_b_star(y));
  return std::abs(lhs - rhs) / (ip.y_norm(x) * ip.y_norm(y));
}

double QHandle::pq_identity_error(const LqProblem& prob, int k_t,
                                  const std::vector<StateVector>& probes) const {
  if (prob.weight.kind != TerminalWeight::Kind::Identity ||
      prob.weight.scale != 1.0 || prob.alpha != alpha_) {
    throw std::invalid_argument("pq_identity_error: problem must have G = I and matching alpha");
  }
  const auto& ip = prop_->inner();
  double worst = 0.0;
  for (const auto& x : probes) {
    StateVector px = riccati_apply(prob, k_t, q_apply(k_t, x));
    StateVector d(x.dims(), px.data() - x.data());
    worst = std::max(worst, ip.y_norm(d) / ip.y_norm(x));
  }
  return worst;
}

double QHandle::lambda_max_estimate(int k_t, int n_iter, std::uint64_t seed) const {
  const auto& ip = prop_->inner();
  const GridDims dims = prop_->ops().dims();
  auto op = [&](const Eigen::VectorXd& v) {
    return q_apply(k_t, StateVector(dims, v)).data();
  };
  auto dot = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return a.cwiseProduct(ip.y_weights()).dot(b);
  };
  return power_iteration_largest(op, dot, dims.n_state(), n_iter, seed);
}

}  // namespace mxlqr
