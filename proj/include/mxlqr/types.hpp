// SPDX-License-Identifier: Apache-2.0

#ifndef MXLQR_TYPES_HPP
#define MXLQR_TYPES_HPP

#include <Eigen/Core>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mxlqr {

using BoundarySlice = Eigen::VectorXd;

// Staggered TM grid on the unit square: ez at nodes (i,j), hx at (i,j+1/2),
// hy at (i+1/2,j). A state is stored flat as [ez; hx; hy].
struct GridDims {
  int nx = 0;
  int ny = 0;

  double hx() const { return 1.0 / nx; }
  double hy() const { return 1.0 / ny; }

  int n_ez() const { return (nx + 1) * (ny + 1); }
  int n_hx() const { return (nx + 1) * ny; }
  int n_hy() const { return nx * (ny + 1); }
  int n_state() const { return n_ez() + n_hx() + n_hy(); }
  int n_gamma() const { return 2 * nx + 2 * ny; }

  int ez_index(int i, int j) const { return i * (ny + 1) + j; }
  int hx_index(int i, int j) const { return n_ez() + i * ny + j; }
  int hy_index(int i, int j) const { return n_ez() + n_hx() + i * (ny + 1) + j; }

  bool operator==(const GridDims&) const = default;

  void validate() const {
    if (nx < 4 || ny < 4) {
      throw std::invalid_argument("GridDims: nx, ny must be >= 4");
    }
  }
};

struct TimeGrid {
  double T = 1.0;
  int nt = 1;

  TimeGrid() = default;
  TimeGrid(double T_, int nt_) : T(T_), nt(nt_) {
    if (nt < 1 || !(T > 0.0)) {
      throw std::invalid_argument("TimeGrid: need nt >= 1 and T > 0");
    }
  }

  double dt() const { return T / nt; }
  double node(int k) const { return k * dt(); }
  double midpoint(int k) const { return (k + 0.5) * dt(); }
};

class StateVector {
 public:
  StateVector() = default;
  explicit StateVector(GridDims dims)
      : dims_(dims), v_(Eigen::VectorXd::Zero(dims.n_state())) {}
  StateVector(GridDims dims, Eigen::VectorXd v) : dims_(dims), v_(std::move(v)) {
    if (v_.size() != dims_.n_state()) {
      throw std::invalid_argument("StateVector: data size does not match dims");
    }
  }

  const GridDims& dims() const { return dims_; }
  Eigen::VectorXd& data() { return v_; }
  const Eigen::VectorXd& data() const { return v_; }

  double& ez(int i, int j) { return v_[dims_.ez_index(i, j)]; }
  double ez(int i, int j) const { return v_[dims_.ez_index(i, j)]; }
  double& hx(int i, int j) { return v_[dims_.hx_index(i, j)]; }
  double hx(int i, int j) const { return v_[dims_.hx_index(i, j)]; }
  double& hy(int i, int j) { return v_[dims_.hy_index(i, j)]; }
  double hy(int i, int j) const { return v_[dims_.hy_index(i, j)]; }

  bool is_finite() const { return v_.allFinite(); }

  void require_same_shape(const StateVector& other) const {
    if (!(dims_ == other.dims_)) {
      throw std::invalid_argument("StateVector: shape mismatch");
    }
  }

 private:
  GridDims dims_;
  Eigen::VectorXd v_;
};

// Discrete element of L^2(s,T;U): one boundary slice per step midpoint
// t_{k+1/2}, k = start_index .. nt-1. Stored as columns of a matrix.
class ControlTrajectory {
 public:
  ControlTrajectory() = default;
  ControlTrajectory(int start_index, int n_gamma, int nt)
      : start_(start_index),
        slices_(Eigen::MatrixXd::Zero(n_gamma, nt - start_index)) {
    if (start_index < 0 || start_index >= nt) {
      throw std::invalid_argument("ControlTrajectory: bad start index");
    }
  }

  int start_index() const { return start_; }
  int n_slices() const { return static_cast<int>(slices_.cols()); }
  Eigen::MatrixXd& slices() { return slices_; }
  const Eigen::MatrixXd& slices() const { return slices_; }

  // slice for the midpoint t_{k+1/2} of global step k
  Eigen::MatrixXd::ColXpr slice(int k) { return slices_.col(k - start_); }
  Eigen::MatrixXd::ConstColXpr slice(int k) const { return slices_.col(k - start_); }

  void require_compatible(const ControlTrajectory& other) const {
    if (start_ != other.start_ || slices_.cols() != other.slices_.cols() ||
        slices_.rows() != other.slices_.rows()) {
      throw std::invalid_argument("ControlTrajectory: mismatched trajectories");
    }
  }

 private:
  int start_ = 0;
  Eigen::MatrixXd slices_;
};

// Failure of an iterative or direct solve; carries enough context to report.
class SolveError : public std::runtime_error {
 public:
  explicit SolveError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mxlqr

#endif  // MXLQR_TYPES_HPP
