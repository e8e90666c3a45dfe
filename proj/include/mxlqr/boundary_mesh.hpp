// SPDX-License-Identifier: Apache-2.0

#ifndef MXLQR_BOUNDARY_MESH_HPP
#define MXLQR_BOUNDARY_MESH_HPP

#include <Eigen/Core>
#include <utility>
#include <vector>

#include "mxlqr/types.hpp"

namespace mxlqr {

// Perimeter mesh of the unit square with the spectral toolkit for the
// boundary operator S^p = (kappa*I - Lap_Gamma)^{p/2}.
//
// Nodes run counterclockwise from the lower-left corner, corners not
// duplicated; the discrete Laplacian is the 1D periodic second difference
// along the perimeter, arc-length weighted. Eigenvectors are orthonormal in
// the arc-length-weighted pairing.
class BoundaryMesh {
 public:
  BoundaryMesh(GridDims dims, double kappa);

  int size() const { return n_; }
  double kappa() const { return kappa_; }
  const GridDims& dims() const { return dims_; }

  // (i,j) grid coordinates of perimeter node p
  const std::vector<std::pair<int, int>>& nodes() const { return nodes_; }
  // state index of the ez dof under perimeter node p
  const std::vector<int>& ez_indices() const { return ez_idx_; }

  const Eigen::VectorXd& arc_weights() const { return arc_w_; }
  const Eigen::VectorXd& eigenvalues() const { return lambda_; }
  const Eigen::MatrixXd& eigenvectors() const { return phi_; }

  // spectral coefficients (f, phi_m) in the arc-length pairing
  Eigen::VectorXd analyze(const BoundarySlice& f) const;
  Eigen::VectorXd synthesize(const Eigen::VectorXd& coeffs) const;

  // S^p f for p in {+1, -1}
  BoundarySlice apply_s_power(int p, const BoundarySlice& f) const;

  // (f, g)_U = (S f, g) in the arc-length pairing
  double u_inner(const BoundarySlice& f, const BoundarySlice& g) const;
  double u_norm(const BoundarySlice& f) const;

  // dense Gram matrix of the U inner product and its Euclidean powers
  // (used by the dense oracles only)
  Eigen::MatrixXd u_gram_matrix() const;
  Eigen::MatrixXd u_gram_power(double p) const;

 private:
  GridDims dims_;
  double kappa_ = 1.0;
  int n_ = 0;
  std::vector<std::pair<int, int>> nodes_;
  std::vector<int> ez_idx_;
  Eigen::VectorXd arc_w_;
  Eigen::VectorXd lambda_;
  Eigen::MatrixXd phi_;
  Eigen::MatrixXd analysis_;  // phi^T * diag(arc_w)
};

}  // namespace mxlqr

#endif  // MXLQR_BOUNDARY_MESH_HPP
