// SPDX-License-Identifier: Apache-2.0

#include "mxlqr/propagator.hpp"

#include "mxlqr/cg.hpp"

namespace mxlqr {

namespace {

SpMat shifted(const SpMat& a, double scale) {
  SpMat m = scale * a;
  for (int k = 0; k < m.rows(); ++k) m.coeffRef(k, k) += 1.0;
  m.makeCompressed();
  return m;
}

}  // namespace

Propagator::Propagator(std::shared_ptr<const MaxwellOperators> ops, TimeGrid grid)
    : ops_(std::move(ops)), grid_(grid) {
  const double h = 0.5 * grid_.dt();
  plus_fwd_ = shifted(ops_->a_matrix(Dir::Forward), h);
  plus_adj_ = shifted(ops_->a_matrix(Dir::Adjoint), h);
  minus_fwd_.compute(shifted(ops_->a_matrix(Dir::Forward), -h));
  minus_adj_.compute(shifted(ops_->a_matrix(Dir::Adjoint), -h));
  if (minus_fwd_.info() != Eigen::Success || minus_adj_.info() != Eigen::Success) {
    throw SolveError("Propagator: Crank-Nicolson factorization failed");
  }
}

StateVector Propagator::step_forward(const StateVector& y, const BoundarySlice* g) const {
  Eigen::VectorXd rhs = plus_fwd_ * y.data();
  if (g != nullptr) {
    const auto& ez = ops_->boundary().ez_indices();
    const auto& c = ops_->b_coefficients();
    const double dt = grid_.dt();
    for (int p = 0; p < ops_->boundary().size(); ++p) {
      rhs[ez[p]] += dt * c[p] * (*g)[p];
    }
  }
  return StateVector(y.dims(), minus_fwd_.solve(rhs));
}

StateVector Propagator::step_adjoint(const StateVector& z) const {
  return StateVector(z.dims(), minus_adj_.solve(plus_adj_ * z.data()));
}

void Propagator::check_range(int k_from, int k_to) const {
  if (!(0 <= k_from && k_from < k_to && k_to <= grid_.nt)) {
    throw std::invalid_argument("propagate: need 0 <= k_from < k_to <= nt");
  }
}

std::vector<StateVector> Propagator::propagate(Dir dir, const StateVector& y_init,
                                               int k_from, int k_to,
                                               const ControlTrajectory* g) const {
  check_range(k_from, k_to);
  std::vector<StateVector> traj(k_to - k_from + 1);
  if (dir == Dir::Forward) {
    if (g != nullptr &&
        (g->start_index() > k_from || g->start_index() + g->n_slices() < k_to)) {
      throw std::invalid_argument("propagate: control does not cover [k_from, k_to)");
    }
    traj[0] = y_init;
    for (int k = k_from; k < k_to; ++k) {
      const BoundarySlice* slice = nullptr;
      BoundarySlice s;
      if (g != nullptr) {
        s = g->slice(k);
        slice = &s;
      }
      traj[k - k_from + 1] = step_forward(traj[k - k_from], slice);
    }
  } else {
    if (g != nullptr) {
      throw std::invalid_argument("propagate: adjoint direction takes no control");
    }
    traj[k_to - k_from] = y_init;
    for (int k = k_to; k > k_from; --k) {
      traj[k - k_from - 1] = step_adjoint(traj[k - k_from]);
    }
  }
  return traj;
}

StateVector Propagator::propagate_final(Dir dir, const StateVector& y_init, int k_from,
                                        int k_to, const ControlTrajectory* g) const {
  check_range(k_from, k_to);
  StateVector y = y_init;
  if (dir == Dir::Forward) {
    if (g != nullptr &&
        (g->start_index() > k_from || g->start_index() + g->n_slices() < k_to)) {
      throw std::invalid_argument("propagate: control does not cover [k_from, k_to)");
    }
    for (int k = k_from; k < k_to; ++k) {
      const BoundarySlice* slice = nullptr;
      BoundarySlice s;
      if (g != nullptr) {
        s = g->slice(k);
        slice = &s;
      }
      y = step_forward(y, slice);
    }
  } else {
    for (int k = k_to; k > k_from; --k) y = step_adjoint(y);
  }
  return y;
}

StateVector Propagator::input_map_final(const ControlTrajectory& g) const {
  StateVector zero(ops_->dims());
  return propagate_final(Dir::Forward, zero, g.start_index(), grid_.nt, &g);
}

ControlTrajectory Propagator::adjoint_input_map(const StateVector& terminal,
                                                int k_s) const {
  if (!(0 <= k_s && k_s < grid_.nt)) {
    throw std::invalid_argument("adjoint_input_map: bad start index");
  }
  ControlTrajectory out(k_s, ops_->boundary().size(), grid_.nt);
  StateVector z_next = terminal;
  for (int k = grid_.nt - 1; k >= k_s; --k) {
    StateVector z_prev = step_adjoint(z_next);
    StateVector mid(terminal.dims(), 0.5 * (z_prev.data() + z_next.data()));
    out.slice(k) = ops_->apply_b_star(mid);
    z_next = z_prev;
  }
  return out;
}

AdmissibilityReport Propagator::admissibility_ratio(int n_samples,
                                                    std::uint64_t seed) const {
  if (n_samples < 1) {
    throw std::invalid_argument("admissibility_ratio: need n_samples >= 1");
  }
  AdmissibilityReport rep;
  Rng rng(seed);
  const auto& ip = ops_->inner();
  for (int s = 0; s < n_samples; ++s) {
    StateVector x(ops_->dims());
    for (int k = 0; k < x.data().size(); ++k) x.data()[k] = rng.normal();
    x.data() /= ip.y_norm(x);
    ControlTrajectory u = adjoint_input_map(x, 0);
    const double ratio = ip.u_traj_inner(u, u, grid_);
    rep.ratios.push_back(ratio);
    rep.max_ratio = std::max(rep.max_ratio, ratio);
  }
  return rep;
}

}  // namespace mxlqr
