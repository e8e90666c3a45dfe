// SPDX-License-Identifier: Apache-2.0

#include "mxlqr/dense_oracle.hpp"

namespace mxlqr {

DenseSystem DenseSystem::build(const MaxwellOperators& ops) {
  DenseSystem d;
  const int n = ops.dims().n_state();
  const int ng = ops.boundary().size();
  d.a = Eigen::MatrixXd(ops.a_matrix(Dir::Forward));
  d.a_adj = Eigen::MatrixXd(ops.a_matrix(Dir::Adjoint));
  d.y_weights = ops.inner().y_weights();
  d.u_gram = ops.boundary().u_gram_matrix();
  d.b.resize(n, ng);
  for (int p = 0; p < ng; ++p) {
    BoundarySlice e = BoundarySlice::Zero(ng);
    e[p] = 1.0;
    d.b.col(p) = ops.apply_b(e).data();
  }
  d.b_star.resize(ng, n);
  for (int c = 0; c < n; ++c) {
    StateVector e(ops.dims());
    e.data()[c] = 1.0;
    d.b_star.col(c) = ops.apply_b_star(e);
  }
  return d;
}

Eigen::MatrixXd dense_input_map(const Propagator& prop, int k_s) {
  const auto& ops = prop.ops();
  const int n = ops.dims().n_state();
  const int ng = ops.boundary().size();
  const int nt = prop.grid().nt;
  Eigen::MatrixXd map(n, (nt - k_s) * ng);

  // one injected block, pushed backward through the step operator
  Eigen::MatrixXd blk(n, ng);
  StateVector zero(ops.dims());
  for (int p = 0; p < ng; ++p) {
    BoundarySlice e = BoundarySlice::Zero(ng);
    e[p] = 1.0;
    blk.col(p) = prop.step_forward(zero, &e).data();
  }
  for (int k = nt - 1; k >= k_s; --k) {
    map.middleCols((k - k_s) * ng, ng) = blk;
    if (k > k_s) {
      for (int p = 0; p < ng; ++p) {
        blk.col(p) =
            prop.step_forward(StateVector(ops.dims(), blk.col(p)), nullptr).data();
      }
    }
  }
  return map;
}

namespace {

Eigen::MatrixXd dense_gsquare(const LqProblem& prob) {
  const auto& ops = prob.prop->ops();
  const int n = ops.dims().n_state();
  Eigen::MatrixXd m(n, n);
  for (int c = 0; c < n; ++c) {
    StateVector e(ops.dims());
    e.data()[c] = 1.0;
    m.col(c) = prob.apply_gstar_g(e).data();
  }
  // columns of G*G in raw coordinates; the Y-weighted quadratic form is
  // diag(w) * m
  return prob.inner().y_weights().asDiagonal() * m;
}

}  // namespace

DenseOpenLoopResult dense_openloop_oracle(const LqProblem& prob,
                                          const StateVector& y0) {
  prob.validate();
  const auto& ip = prob.inner();
  const int nt = prob.grid().nt;
  const int ng = prob.prop->ops().boundary().size();
  const int m = (nt - prob.k_s) * ng;
  if (m > 5000) {
    throw std::invalid_argument("dense_openloop_oracle: control dimension > 5000");
  }
  const double dt = prob.grid().dt();

  Eigen::MatrixXd input = dense_input_map(*prob.prop, prob.k_s);
  Eigen::MatrixXd mq = dense_gsquare(prob);
  Eigen::VectorXd e =
      prob.prop->propagate_final(Dir::Forward, y0, prob.k_s, nt).data();

  Eigen::MatrixXd u_gram = ip.boundary().u_gram_matrix();
  Eigen::MatrixXd gram = input.transpose() * mq * input;
  for (int k = 0; k < nt - prob.k_s; ++k) {
    gram.block(k * ng, k * ng, ng, ng) += prob.alpha * dt * u_gram;
  }
  Eigen::VectorXd rhs = -input.transpose() * (mq * e);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(0.5 * (gram + gram.transpose()));
  if (ldlt.info() != Eigen::Success) {
    throw SolveError("dense_openloop_oracle: normal-equations factorization failed");
  }
  Eigen::VectorXd g = ldlt.solve(rhs);

  DenseOpenLoopResult res;
  res.g_hat = ControlTrajectory(prob.k_s, ng, nt);
  for (int k = 0; k < nt - prob.k_s; ++k) {
    res.g_hat.slices().col(k) = g.segment(k * ng, ng);
  }
  Eigen::VectorXd y_t = e + input * g;
  double gg = 0.0;
  for (int k = 0; k < nt - prob.k_s; ++k) {
    gg += g.segment(k * ng, ng).dot(u_gram * g.segment(k * ng, ng));
  }
  res.cost = prob.alpha * dt * gg + y_t.dot(mq * y_t);
  return res;
}

std::vector<Eigen::MatrixXd> dense_dre_backward(const Eigen::MatrixXd& a,
                                                const Eigen::MatrixXd& b,
                                                const Eigen::MatrixXd& p_terminal,
                                                int nt, double dt, double alpha) {
  auto rhs = [&](const Eigen::MatrixXd& p) -> Eigen::MatrixXd {
    Eigen::MatrixXd pb = p * b;
    return -(a.transpose() * p + p * a) + (1.0 / alpha) * (pb * pb.transpose());
  };
  std::vector<Eigen::MatrixXd> nodes(nt + 1);
  nodes[nt] = p_terminal;
  const double h = -dt;
  for (int k = nt - 1; k >= 0; --k) {
    const Eigen::MatrixXd& p = nodes[k + 1];
    Eigen::MatrixXd k1 = rhs(p);
    Eigen::MatrixXd k2 = rhs(p + (h / 2) * k1);
    Eigen::MatrixXd k3 = rhs(p + (h / 2) * k2);
    Eigen::MatrixXd k4 = rhs(p + h * k3);
    nodes[k] = p + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
    nodes[k] = 0.5 * (nodes[k] + nodes[k].transpose().eval());
  }
  return nodes;
}

DenseDreResult dense_dre_oracle(const LqProblem& prob, const StateVector& y0) {
  prob.validate();
  const auto& ops = prob.prop->ops();
  const int n = ops.dims().n_state();
  if (n > 2000) {
    throw std::invalid_argument("dense_dre_oracle: state dimension > 2000");
  }
  const int nt = prob.grid().nt;
  const double dt = prob.grid().dt();
  const int ng = ops.boundary().size();

  // Euclideanize: y_hat = D y, g_hat = MU^{1/2} g
  DenseSystem sys = DenseSystem::build(ops);
  Eigen::VectorXd d = sys.y_weights.cwiseSqrt();
  Eigen::MatrixXd a_hat = d.asDiagonal() * sys.a * d.cwiseInverse().asDiagonal();
  Eigen::MatrixXd mu_inv_half = ops.boundary().u_gram_power(-0.5);
  Eigen::MatrixXd b_hat = d.asDiagonal() * sys.b * mu_inv_half;

  Eigen::MatrixXd p_terminal;
  if (prob.weight.kind == TerminalWeight::Kind::Identity) {
    p_terminal = prob.weight.scale * Eigen::MatrixXd::Identity(n, n);
  } else {
    const double nn = prob.weight.n;
    Eigen::MatrixXd res =
        (nn * Eigen::MatrixXd::Identity(n, n) - a_hat).partialPivLu().solve(
            nn * Eigen::MatrixXd::Identity(n, n));
    p_terminal = prob.weight.scale * res.transpose() * res;
  }

  DenseDreResult out;
  std::vector<Eigen::MatrixXd> nodes =
      dense_dre_backward(a_hat, b_hat, p_terminal, nt, dt, prob.alpha);
  out.p0 = nodes.front();
  Eigen::VectorXd y0_hat = d.cwiseProduct(y0.data());
  out.cost_quadform = y0_hat.dot(out.p0 * y0_hat);

  // closed-loop reconstruction with midpoint gain
  out.closed_loop_g = ControlTrajectory(prob.k_s, ng, nt);
  Eigen::VectorXd y = y0_hat;
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  double running = 0.0;
  for (int k = prob.k_s; k < nt; ++k) {
    Eigen::MatrixXd p_mid = 0.5 * (nodes[k] + nodes[k + 1]);
    Eigen::MatrixXd gain = (1.0 / prob.alpha) * b_hat * (b_hat.transpose() * p_mid);
    Eigen::MatrixXd m = a_hat - gain;
    Eigen::VectorXd y_next =
        (eye - (dt / 2) * m).partialPivLu().solve((eye + (dt / 2) * m) * y);
    Eigen::VectorXd g_hat_mid =
        -(1.0 / prob.alpha) * b_hat.transpose() * (p_mid * (0.5 * (y + y_next)));
    out.closed_loop_g.slice(k) = mu_inv_half * g_hat_mid;
    running += dt * g_hat_mid.squaredNorm();
    y = y_next;
  }
  out.closed_loop_cost = prob.alpha * running + y.dot(p_terminal * y);
  return out;
}

}  // namespace mxlqr
