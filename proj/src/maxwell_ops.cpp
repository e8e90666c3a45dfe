// SPDX-License-Identifier: Apache-2.0

#include "mxlqr/maxwell_ops.hpp"

#include <vector>

namespace mxlqr {

MaxwellOperators::MaxwellOperators(GridDims dims, MaterialField materials,
                                   double kappa)
    : dims_(dims),
      mat_(std::move(materials)),
      boundary_(std::make_shared<BoundaryMesh>(dims, kappa)) {
  dims_.validate();
  mat_.validate();
  if (mat_.eps_ez.size() != dims_.n_ez() || mat_.mu_hx.size() != dims_.n_hx() ||
      mat_.mu_hy.size() != dims_.n_hy()) {
    throw std::invalid_argument("MaxwellOperators: material field shape mismatch");
  }
  ip_ = InnerProducts(dims_, mat_, boundary_);

  const int nx = dims_.nx, ny = dims_.ny;
  const double hx = dims_.hx(), hy = dims_.hy();
  const int n = dims_.n_state();

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(6 * n);
  for (int i = 0; i <= nx; ++i) {
    for (int j = 0; j <= ny; ++j) {
      const int r = dims_.ez_index(i, j);
      const double ie = 1.0 / mat_.eps_ez[r];
      // Dx of hy, half-cell one-sided at the walls (ghost value belongs to B)
      if (i == 0) {
        trip.emplace_back(r, dims_.hy_index(0, j), 2.0 * ie / hx);
      } else if (i == nx) {
        trip.emplace_back(r, dims_.hy_index(nx - 1, j), -2.0 * ie / hx);
      } else {
        trip.emplace_back(r, dims_.hy_index(i, j), ie / hx);
        trip.emplace_back(r, dims_.hy_index(i - 1, j), -ie / hx);
      }
      // -Dy of hx
      if (j == 0) {
        trip.emplace_back(r, dims_.hx_index(i, 0), -2.0 * ie / hy);
      } else if (j == ny) {
        trip.emplace_back(r, dims_.hx_index(i, ny - 1), 2.0 * ie / hy);
      } else {
        trip.emplace_back(r, dims_.hx_index(i, j), -ie / hy);
        trip.emplace_back(r, dims_.hx_index(i, j - 1), ie / hy);
      }
      const double sig = mat_.sigma_ez[r];
      if (sig != 0.0) trip.emplace_back(r, r, -sig * ie);
    }
  }
  for (int i = 0; i <= nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      const int r = dims_.hx_index(i, j);
      const double im = 1.0 / mat_.mu_hx[r - dims_.n_ez()];
      trip.emplace_back(r, dims_.ez_index(i, j + 1), -im / hy);
      trip.emplace_back(r, dims_.ez_index(i, j), im / hy);
    }
  }
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j <= ny; ++j) {
      const int r = dims_.hy_index(i, j);
      const double im = 1.0 / mat_.mu_hy[r - dims_.n_ez() - dims_.n_hx()];
      trip.emplace_back(r, dims_.ez_index(i + 1, j), im / hx);
      trip.emplace_back(r, dims_.ez_index(i, j), -im / hx);
    }
  }
  a_fwd_.resize(n, n);
  a_fwd_.setFromTriplets(trip.begin(), trip.end());
  a_fwd_.makeCompressed();

  // A* = W^{-1} A^T W, the exact adjoint in the weighted product
  const Eigen::VectorXd& w = ip_.y_weights();
  std::vector<Eigen::Triplet<double>> adj;
  adj.reserve(trip.size());
  for (const auto& t : trip) {
    adj.emplace_back(t.col(), t.row(), t.value() * w[t.row()] / w[t.col()]);
  }
  a_adj_.resize(n, n);
  a_adj_.setFromTriplets(adj.begin(), adj.end());
  a_adj_.makeCompressed();

  // B injects the wall datum into the ez stencil at perimeter nodes
  const int ng = boundary_->size();
  b_coeff_.resize(ng);
  b_star_scale_.resize(ng);
  for (int p = 0; p < ng; ++p) {
    const auto& [i, j] = boundary_->nodes()[p];
    double c = 0.0;
    if (j == 0 || j == ny) c += 2.0 / hy;
    if (i == 0 || i == nx) c += 2.0 / hx;
    const int e = dims_.ez_index(i, j);
    b_coeff_[p] = c / mat_.eps_ez[e];
    b_star_scale_[p] = w[e] * b_coeff_[p] / boundary_->arc_weights()[p];
  }
}

StateVector MaxwellOperators::apply_a(Dir dir, const StateVector& y) const {
  if (!(y.dims() == dims_)) {
    throw std::invalid_argument("apply_a: state shape mismatch");
  }
  return StateVector(dims_, a_matrix(dir) * y.data());
}

const Eigen::SparseLU<SpMat>& MaxwellOperators::resolvent_factorization(
    double lambda, Dir dir) const {
  std::scoped_lock lock(cache_mutex_);
  const auto key = std::make_pair(lambda, dir == Dir::Forward ? 0 : 1);
  auto it = resolvent_cache_.find(key);
  if (it == resolvent_cache_.end()) {
    SpMat m = -a_matrix(dir);
    for (int k = 0; k < m.rows(); ++k) m.coeffRef(k, k) += lambda;
    m.makeCompressed();
    auto lu = std::make_unique<Eigen::SparseLU<SpMat>>();
    lu->compute(m);
    if (lu->info() != Eigen::Success) {
      throw SolveError("resolvent_solve: factorization of (lambda*I - A) failed");
    }
    it = resolvent_cache_.emplace(key, std::move(lu)).first;
  }
  return *it->second;
}

StateVector MaxwellOperators::resolvent_solve(double lambda, const StateVector& rhs,
                                              Dir dir) const {
  if (!(lambda >= 1.0)) {
    throw std::invalid_argument("resolvent_solve: lambda must be >= 1");
  }
  if (!(rhs.dims() == dims_)) {
    throw std::invalid_argument("resolvent_solve: state shape mismatch");
  }
  const auto& lu = resolvent_factorization(lambda, dir);
  return StateVector(dims_, lu.solve(rhs.data()));
}

StateVector MaxwellOperators::apply_b(const BoundarySlice& g) const {
  if (g.size() != boundary_->size()) {
    throw std::invalid_argument("apply_b: slice length mismatch");
  }
  StateVector out(dims_);
  const auto& ez = boundary_->ez_indices();
  for (int p = 0; p < boundary_->size(); ++p) {
    out.data()[ez[p]] += b_coeff_[p] * g[p];
  }
  return out;
}

BoundarySlice MaxwellOperators::apply_b_star(const StateVector& y) const {
  if (!(y.dims() == dims_)) {
    throw std::invalid_argument("apply_b_star: state shape mismatch");
  }
  const auto& ez = boundary_->ez_indices();
  BoundarySlice t(boundary_->size());
  for (int p = 0; p < boundary_->size(); ++p) {
    t[p] = b_star_scale_[p] * y.data()[ez[p]];
  }
  return boundary_->apply_s_power(-1, t);
}

StateVector MaxwellOperators::green_map(const BoundarySlice& g) const {
  return resolvent_solve(1.0, apply_b(g), Dir::Forward);
}

}  // namespace mxlqr
