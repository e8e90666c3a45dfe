// SPDX-License-Identifier: Apache-2.0

#ifndef MXLQR_SPECTRAL_HPP
#define MXLQR_SPECTRAL_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "mxlqr/cg.hpp"
#include "mxlqr/types.hpp"

namespace mxlqr {

struct RitzEstimate {
  double smallest = 0.0;
  double largest = 0.0;
  int iterations = 0;
};

// Symmetric Lanczos with full reorthogonalization on a matrix-free map that
// is self-adjoint in the given inner product. Returns the extreme Ritz
// values of the tridiagonal section after n_iter steps.
template <class Op, class Dot>
RitzEstimate lanczos_extremes(const Op& op, const Dot& dot, int dim, int n_iter,
                              std::uint64_t seed) {
  Rng rng(seed);
  Eigen::VectorXd v(dim);
  for (int k = 0; k < dim; ++k) v[k] = rng.normal();

  std::vector<Eigen::VectorXd> basis;
  std::vector<double> alpha, beta;
  v /= std::sqrt(dot(v, v));
  basis.push_back(v);

  const int m = std::min(n_iter, dim);
  for (int j = 0; j < m; ++j) {
    Eigen::VectorXd w = op(basis[j]);
    const double a = dot(w, basis[j]);
    alpha.push_back(a);
    w -= a * basis[j];
    if (j > 0) w -= beta[j - 1] * basis[j - 1];
    for (const auto& q : basis) w -= dot(w, q) * q;  // reorthogonalize
    const double b = std::sqrt(std::max(dot(w, w), 0.0));
    if (j + 1 == m || b < 1e-14) break;
    beta.push_back(b);
    basis.push_back(w / b);
  }

  const int k = static_cast<int>(alpha.size());
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    t(i, i) = alpha[i];
    if (i + 1 < k) t(i, i + 1) = t(i + 1, i) = beta[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
  return {es.eigenvalues()(0), es.eigenvalues()(k - 1), k};
}

// Largest eigenvalue of a self-adjoint nonnegative map by power iteration.
template <class Op, class Dot>
double power_iteration_largest(const Op& op, const Dot& dot, int dim, int n_iter,
                               std::uint64_t seed) {
  Rng rng(seed);
  Eigen::VectorXd v(dim);
  for (int k = 0; k < dim; ++k) v[k] = rng.normal();
  v /= std::sqrt(dot(v, v));
  double lam = 0.0;
  for (int it = 0; it < n_iter; ++it) {
    Eigen::VectorXd w = op(v);
    lam = dot(w, v);
    const double n = std::sqrt(dot(w, w));
    if (n == 0.0) return 0.0;
    v = w / n;
  }
  return lam;
}

}  // namespace mxlqr

#endif  // MXLQR_SPECTRAL_HPP
