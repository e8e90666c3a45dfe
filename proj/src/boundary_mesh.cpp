// SPDX-License-Identifier: Apache-2.0

#include "mxlqr/boundary_mesh.hpp"

#include <Eigen/Dense>
#include <stdexcept>

namespace mxlqr {

BoundaryMesh::BoundaryMesh(GridDims dims, double kappa)
    : dims_(dims), kappa_(kappa) {
  dims_.validate();
  if (!(kappa_ > 0.0)) {
    throw std::invalid_argument("BoundaryMesh: kappa must be positive");
  }
  const int nx = dims_.nx, ny = dims_.ny;
  n_ = dims_.n_gamma();
  nodes_.reserve(n_);
  for (int i = 0; i <= nx; ++i) nodes_.emplace_back(i, 0);
  for (int j = 1; j <= ny; ++j) nodes_.emplace_back(nx, j);
  for (int k = 1; k <= nx; ++k) nodes_.emplace_back(nx - k, ny);
  for (int k = 1; k < ny; ++k) nodes_.emplace_back(0, ny - k);

  ez_idx_.reserve(n_);
  for (const auto& [i, j] : nodes_) ez_idx_.push_back(dims_.ez_index(i, j));

  // segment p connects node p to node p+1 (mod n)
  const double hx = dims_.hx(), hy = dims_.hy();
  Eigen::VectorXd seg(n_);
  for (int p = 0; p < n_; ++p) {
    const auto& [i1, j1] = nodes_[p];
    const auto& [i2, j2] = nodes_[(p + 1) % n_];
    seg[p] = std::abs(i1 - i2) * hx + std::abs(j1 - j2) * hy;
  }
  arc_w_.resize(n_);
  for (int p = 0; p < n_; ++p) {
    arc_w_[p] = 0.5 * (seg[(p + n_ - 1) % n_] + seg[p]);
  }

  Eigen::MatrixXd stiffness = Eigen::MatrixXd::Zero(n_, n_);
  for (int p = 0; p < n_; ++p) {
    const int q = (p + 1) % n_;
    const double w = 1.0 / seg[p];
    stiffness(p, p) += w;
    stiffness(q, q) += w;
    stiffness(p, q) -= w;
    stiffness(q, p) -= w;
  }
  Eigen::MatrixXd mass = arc_w_.asDiagonal();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(stiffness, mass);
  if (es.info() != Eigen::Success) {
    throw SolveError("BoundaryMesh: boundary Laplacian eigensolve failed");
  }
  lambda_ = es.eigenvalues().cwiseMax(0.0);
  phi_ = es.eigenvectors();  // mass-orthonormal columns, ascending eigenvalues
  analysis_ = phi_.transpose() * arc_w_.asDiagonal();
}

Eigen::VectorXd BoundaryMesh::analyze(const BoundarySlice& f) const {
  return analysis_ * f;
}

Eigen::VectorXd BoundaryMesh::synthesize(const Eigen::VectorXd& coeffs) const {
  return phi_ * coeffs;
}

BoundarySlice BoundaryMesh::apply_s_power(int p, const BoundarySlice& f) const {
  if (p != 1 && p != -1) {
    throw std::invalid_argument("apply_s_power: p must be +1 or -1");
  }
  if (f.size() != n_) {
    throw std::invalid_argument("apply_s_power: slice length mismatch");
  }
  Eigen::VectorXd c = analysis_ * f;
  const double half = 0.5 * p;
  for (int m = 0; m < n_; ++m) {
    c[m] *= std::pow(kappa_ + lambda_[m], half);
  }
  return phi_ * c;
}

double BoundaryMesh::u_inner(const BoundarySlice& f, const BoundarySlice& g) const {
  Eigen::VectorXd cf = analysis_ * f;
  Eigen::VectorXd cg = analysis_ * g;
  double s = 0.0;
  for (int m = 0; m < n_; ++m) {
    s += std::sqrt(kappa_ + lambda_[m]) * cf[m] * cg[m];
  }
  return s;
}

double BoundaryMesh::u_norm(const BoundarySlice& f) const {
  return std::sqrt(u_inner(f, f));
}

Eigen::MatrixXd BoundaryMesh::u_gram_matrix() const {
  Eigen::VectorXd d = (kappa_ + lambda_.array()).sqrt();
  Eigen::MatrixXd s = phi_ * d.asDiagonal() * analysis_;
  Eigen::MatrixXd gram = arc_w_.asDiagonal() * s;
  return 0.5 * (gram + gram.transpose());
}

Eigen::MatrixXd BoundaryMesh::u_gram_power(double p) const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(u_gram_matrix());
  Eigen::VectorXd d = es.eigenvalues().array().pow(p);
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace mxlqr
