// SPDX-License-Identifier: Apache-2.0

#ifndef MXLQR_PROPAGATOR_HPP
#define MXLQR_PROPAGATOR_HPP

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cstdint>
#include <memory>
#include <vector>

#include "mxlqr/maxwell_ops.hpp"
#include "mxlqr/types.hpp"

namespace mxlqr {

struct AdmissibilityReport {
  double max_ratio = 0.0;
  std::vector<double> ratios;
};

// Crank-Nicolson realization of the semigroups e^{tA}, e^{tA*} and of the
// input-to-state maps. One forward step solves
//   (I - dt/2 A) y^{k+1} = (I + dt/2 A) y^k + dt * B g_{k+1/2},
// the adjoint direction uses A* and runs the index backward with no control.
//
// Invariants: for sigma = 0 one step preserves the Y norm exactly (Cayley
// transform of a skew-adjoint operator); one adjoint step is the exact
// Y-adjoint of one forward step.
class Propagator {
 public:
  Propagator(std::shared_ptr<const MaxwellOperators> ops, TimeGrid grid);

  Propagator(const Propagator&) = delete;
  Propagator& operator=(const Propagator&) = delete;

  const TimeGrid& grid() const { return grid_; }
  const MaxwellOperators& ops() const { return *ops_; }
  std::shared_ptr<const MaxwellOperators> ops_ptr() const { return ops_; }
  const InnerProducts& inner() const { return ops_->inner(); }

  StateVector step_forward(const StateVector& y, const BoundarySlice* g) const;
  StateVector step_adjoint(const StateVector& z) const;

  // States at nodes k_from..k_to (inclusive). Forward: y_init sits at k_from
  // and g, when present, must cover [k_from, k_to). Adjoint: y_init sits at
  // k_to and the sweep fills downward.
  std::vector<StateVector> propagate(Dir dir, const StateVector& y_init, int k_from,
                                     int k_to, const ControlTrajectory* g = nullptr) const;

  // final state only (forward node k_to / adjoint node k_from)
  StateVector propagate_final(Dir dir, const StateVector& y_init, int k_from,
                              int k_to, const ControlTrajectory* g = nullptr) const;

  // L_{sT} g: zero-initial-state solution at the final time
  StateVector input_map_final(const ControlTrajectory& g) const;

  // Exact discrete adjoint of g -> (L_s g)(T): backward sweep with A*,
  // evaluating B* at the per-step midpoint average of the adjoint states.
  ControlTrajectory adjoint_input_map(const StateVector& terminal, int k_s) const;

  // ratio of the discrete time integral of ||B* e^{tA*} x||_U^2 to ||x||_Y^2
  // for random unit-norm states; max over samples estimates the
  // admissibility constant from below
  AdmissibilityReport admissibility_ratio(int n_samples, std::uint64_t seed) const;

 private:
  void check_range(int k_from, int k_to) const;

  std::shared_ptr<const MaxwellOperators> ops_;
  TimeGrid grid_;
  SpMat plus_fwd_, plus_adj_;  // I + dt/2 A, I + dt/2 A*
  Eigen::SparseLU<SpMat> minus_fwd_, minus_adj_;
};

}  // namespace mxlqr

#endif  // MXLQR_PROPAGATOR_HPP
