// SPDX-License-Identifier: Apache-2.0

#ifndef MXLQR_MATERIALS_HPP
#define MXLQR_MATERIALS_HPP

#include <Eigen/Core>
#include <functional>
#include <stdexcept>

#include "mxlqr/types.hpp"

namespace mxlqr {

// Scalar isotropic coefficients sampled on the staggered grid: eps and sigma
// at ez nodes, mu at the hx and hy positions.
struct MaterialField {
  Eigen::VectorXd eps_ez;
  Eigen::VectorXd sigma_ez;
  Eigen::VectorXd mu_hx;
  Eigen::VectorXd mu_hy;

  using ScalarField = std::function<double(double, double)>;

  static MaterialField constant(const GridDims& d, double eps, double mu,
                                double sigma) {
    return from_functions(
        d, [eps](double, double) { return eps; },
        [mu](double, double) { return mu; },
        [sigma](double, double) { return sigma; });
  }

  static MaterialField from_functions(const GridDims& d, const ScalarField& eps,
                                      const ScalarField& mu,
                                      const ScalarField& sigma) {
    MaterialField m;
    m.eps_ez.resize(d.n_ez());
    m.sigma_ez.resize(d.n_ez());
    m.mu_hx.resize(d.n_hx());
    m.mu_hy.resize(d.n_hy());
    const double hx = d.hx(), hy = d.hy();
    for (int i = 0; i <= d.nx; ++i) {
      for (int j = 0; j <= d.ny; ++j) {
        m.eps_ez[d.ez_index(i, j)] = eps(i * hx, j * hy);
        m.sigma_ez[d.ez_index(i, j)] = sigma(i * hx, j * hy);
      }
    }
    for (int i = 0; i <= d.nx; ++i) {
      for (int j = 0; j < d.ny; ++j) {
        m.mu_hx[d.hx_index(i, j) - d.n_ez()] = mu(i * hx, (j + 0.5) * hy);
      }
    }
    for (int i = 0; i < d.nx; ++i) {
      for (int j = 0; j <= d.ny; ++j) {
        m.mu_hy[d.hy_index(i, j) - d.n_ez() - d.n_hx()] = mu((i + 0.5) * hx, j * hy);
      }
    }
    m.validate();
    return m;
  }

  void validate() const {
    auto positive = [](const Eigen::VectorXd& v) {
      return v.allFinite() && v.minCoeff() > 0.0;
    };
    if (!positive(eps_ez) || !positive(mu_hx) || !positive(mu_hy)) {
      throw std::invalid_argument("MaterialField: eps and mu must be positive and finite");
    }
    if (!sigma_ez.allFinite() || sigma_ez.minCoeff() < 0.0) {
      throw std::invalid_argument("MaterialField: sigma must be nonnegative and finite");
    }
  }

  bool sigma_is_zero() const { return sigma_ez.isZero(0.0); }
};

}  // namespace mxlqr

#endif  // MXLQR_MATERIALS_HPP
