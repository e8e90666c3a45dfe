// SPDX-License-Identifier: Apache-2.0

#ifndef MXLQR_MAXWELL_OPS_HPP
#define MXLQR_MAXWELL_OPS_HPP

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <map>
#include <memory>
#include <mutex>

#include "mxlqr/inner_products.hpp"
#include "mxlqr/materials.hpp"
#include "mxlqr/types.hpp"

namespace mxlqr {

using SpMat = Eigen::SparseMatrix<double>;

enum class Dir { Forward, Adjoint };

// The discrete Maxwell system on the unit square: generator A and its exact
// Y-adjoint A*, resolvent solves (lambda*I - A)^{-1}, the boundary control
// operator B with exact adjoint B*, and the static Green map.
//
// A acts as
//   (Ay)_ez = eps^{-1} (Dx hy - Dy hx - sigma ez)
//   (Ay)_hx = -mu^{-1} Dy ez
//   (Ay)_hy = +mu^{-1} Dx ez
// with the tangential-H boundary condition entering the ez curl stencil
// through ghost wall values (zero for the homogeneous operator, the boundary
// datum for B). Half-cell differences at the wall paired with trapezoidal
// mass weights make A exactly skew-adjoint in Y when sigma = 0.
class MaxwellOperators {
 public:
  MaxwellOperators(GridDims dims, MaterialField materials, double kappa = 1.0);

  const GridDims& dims() const { return dims_; }
  const MaterialField& materials() const { return mat_; }
  const InnerProducts& inner() const { return ip_; }
  const BoundaryMesh& boundary() const { return *boundary_; }
  std::shared_ptr<const BoundaryMesh> boundary_ptr() const { return boundary_; }
  bool sigma_is_zero() const { return mat_.sigma_is_zero(); }

  const SpMat& a_matrix(Dir dir) const {
    return dir == Dir::Forward ? a_fwd_ : a_adj_;
  }

  StateVector apply_a(Dir dir, const StateVector& y) const;

  // x with (lambda*I - A) x = rhs (or A* in the adjoint direction);
  // factorizations are cached per (lambda, direction).
  StateVector resolvent_solve(double lambda, const StateVector& rhs,
                              Dir dir = Dir::Forward) const;

  StateVector apply_b(const BoundarySlice& g) const;
  BoundarySlice apply_b_star(const StateVector& y) const;

  // static solution with boundary datum g; equals (I - A)^{-1} B g
  StateVector green_map(const BoundarySlice& g) const;

  // injection coefficient of B at each perimeter node (ez dof)
  const Eigen::VectorXd& b_coefficients() const { return b_coeff_; }

 private:
  const Eigen::SparseLU<SpMat>& resolvent_factorization(double lambda, Dir dir) const;

  GridDims dims_;
  MaterialField mat_;
  std::shared_ptr<const BoundaryMesh> boundary_;
  InnerProducts ip_;
  SpMat a_fwd_, a_adj_;
  Eigen::VectorXd b_coeff_;
  Eigen::VectorXd b_star_scale_;  // y_weight * b_coeff / arc_weight per node

  mutable std::mutex cache_mutex_;
  mutable std::map<std::pair<double, int>, std::unique_ptr<Eigen::SparseLU<SpMat>>>
      resolvent_cache_;
};

// shifted spectral realization of (kappa*I - Lap_Gamma)^{p/2}, p in {+1,-1}
inline BoundarySlice boundary_frac_laplacian(const BoundaryMesh& mesh, int p,
                                             const BoundarySlice& f) {
  return mesh.apply_s_power(p, f);
}

}  // namespace mxlqr

#endif  // MXLQR_MAXWELL_OPS_HPP
