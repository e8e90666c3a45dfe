// SPDX-License-Identifier: Apache-2.0

#include "mxlqr/inner_products.hpp"

namespace mxlqr {

InnerProducts::InnerProducts(const GridDims& dims, const MaterialField& mat,
                             std::shared_ptr<const BoundaryMesh> boundary)
    : boundary_(std::move(boundary)) {
  const int nx = dims.nx, ny = dims.ny;
  const double hx = dims.hx(), hy = dims.hy();
  auto cx = [&](int i) { return (i == 0 || i == nx) ? 0.5 * hx : hx; };
  auto cy = [&](int j) { return (j == 0 || j == ny) ? 0.5 * hy : hy; };

  y_w_.resize(dims.n_state());
  for (int i = 0; i <= nx; ++i) {
    for (int j = 0; j <= ny; ++j) {
      y_w_[dims.ez_index(i, j)] = cx(i) * cy(j) * mat.eps_ez[dims.ez_index(i, j)];
    }
  }
  for (int i = 0; i <= nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      y_w_[dims.hx_index(i, j)] =
          cx(i) * hy * mat.mu_hx[dims.hx_index(i, j) - dims.n_ez()];
    }
  }
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j <= ny; ++j) {
      y_w_[dims.hy_index(i, j)] =
          hx * cy(j) * mat.mu_hy[dims.hy_index(i, j) - dims.n_ez() - dims.n_hx()];
    }
  }
}

double InnerProducts::u_traj_inner(const ControlTrajectory& g1,
                                   const ControlTrajectory& g2,
                                   const TimeGrid& grid) const {
  g1.require_compatible(g2);
  double s = 0.0;
  for (int c = 0; c < g1.n_slices(); ++c) {
    s += boundary_->u_inner(g1.slices().col(c), g2.slices().col(c));
  }
  return grid.dt() * s;
}

}  // namespace mxlqr
