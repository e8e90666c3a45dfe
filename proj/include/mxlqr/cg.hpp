// SPDX-License-Identifier: Apache-2.0

#ifndef MXLQR_CG_HPP
#define MXLQR_CG_HPP

#include <cmath>
#include <cstdint>
#include <string>

#include "mxlqr/types.hpp"

namespace mxlqr {

struct CgOptions {
  double tol = 1e-10;   // relative residual target
  int max_iter = 0;     // 0 -> 10*sqrt(dim) + 200
};

struct CgReport {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = true;
};

// Conjugate gradients for a self-adjoint positive definite operator in an
// arbitrary inner product. X must support Eigen-style arithmetic; `dot` is
// the inner product the operator is self-adjoint in.
//
// Non-convergence is reported, never silent; detected negative curvature
// throws (the operator handed in is not positive definite).
template <class X, class Op, class Dot>
CgReport cg_solve(const Op& op, const X& rhs, const Dot& dot, X& x,
                  const CgOptions& opt = {}) {
  const double rhs_norm = std::sqrt(dot(rhs, rhs));
  CgReport report;
  if (rhs_norm == 0.0) {
    x = rhs;  // zero of the right shape
    return report;
  }
  int max_iter = opt.max_iter;
  if (max_iter <= 0) {
    max_iter = static_cast<int>(10.0 * std::sqrt(static_cast<double>(rhs.size()))) + 200;
  }

  X r = rhs - op(x);
  X p = r;
  double rr = dot(r, r);
  report.relative_residual = std::sqrt(rr) / rhs_norm;
  if (report.relative_residual <= opt.tol) return report;

  for (int it = 1; it <= max_iter; ++it) {
    X q = op(p);
    const double pq = dot(p, q);
    if (!(pq > 0.0)) {
      throw SolveError("cg_solve: non-positive curvature (p,Ap) = " +
                       std::to_string(pq) + "; operator is not SPD");
    }
    const double alpha = rr / pq;
    x += alpha * p;
    r -= alpha * q;
    const double rr_new = dot(r, r);
    report.iterations = it;
    report.relative_residual = std::sqrt(rr_new) / rhs_norm;
    if (report.relative_residual <= opt.tol) {
      return report;
    }
    p = r + (rr_new / rr) * p;
    rr = rr_new;
  }
  report.converged = false;
  return report;
}

// Deterministic normal sampler (fixed Box-Muller over mt19937_64 output),
// so that seeded runs reproduce bit-identical streams.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  double uniform() {  // in (0,1)
    return (static_cast<double>(next() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  std::uint64_t next() {  // splitmix64
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mxlqr

#endif  // MXLQR_CG_HPP
