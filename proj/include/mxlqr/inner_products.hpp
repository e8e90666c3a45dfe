// SPDX-License-Identifier: Apache-2.0

#ifndef MXLQR_INNER_PRODUCTS_HPP
#define MXLQR_INNER_PRODUCTS_HPP

#include <Eigen/Core>
#include <memory>

#include "mxlqr/boundary_mesh.hpp"
#include "mxlqr/materials.hpp"
#include "mxlqr/types.hpp"

namespace mxlqr {

// The two inner products of the problem: the eps/mu-weighted state product
// (y,z)_Y and the boundary H^{1/2}-type product behind L^2(s,T;U).
class InnerProducts {
 public:
  InnerProducts() = default;
  InnerProducts(const GridDims& dims, const MaterialField& mat,
                std::shared_ptr<const BoundaryMesh> boundary);

  const Eigen::VectorXd& y_weights() const { return y_w_; }
  const BoundaryMesh& boundary() const { return *boundary_; }
  std::shared_ptr<const BoundaryMesh> boundary_ptr() const { return boundary_; }

  double y_inner(const StateVector& a, const StateVector& b) const {
    a.require_same_shape(b);
    return a.data().cwiseProduct(y_w_).dot(b.data());
  }
  double y_norm(const StateVector& a) const { return std::sqrt(y_inner(a, a)); }

  double u_inner_slice(const BoundarySlice& f, const BoundarySlice& g) const {
    return boundary_->u_inner(f, g);
  }

  // dt * sum_k (S g1_k, g2_k) with midpoint-rule quadrature in time
  double u_traj_inner(const ControlTrajectory& g1, const ControlTrajectory& g2,
                      const TimeGrid& grid) const;
  double u_traj_norm(const ControlTrajectory& g, const TimeGrid& grid) const {
    return std::sqrt(u_traj_inner(g, g, grid));
  }

 private:
  Eigen::VectorXd y_w_;
  std::shared_ptr<const BoundaryMesh> boundary_;
};

inline double inner_y(const StateVector& a, const StateVector& b,
                      const InnerProducts& ip) {
  return ip.y_inner(a, b);
}

inline double inner_u_traj(const ControlTrajectory& g1, const ControlTrajectory& g2,
                           const InnerProducts& ip, const TimeGrid& grid) {
  return ip.u_traj_inner(g1, g2, grid);
}

}  // namespace mxlqr

#endif  // MXLQR_INNER_PRODUCTS_HPP
