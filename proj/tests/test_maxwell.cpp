// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "test_helpers.hpp"

using namespace mxlqr;
using namespace mxlqr::test;

TEST_SUITE_BEGIN("maxwell-2d");

TEST_CASE("assembly rejects bad inputs") {
  GridDims dims{8, 8};
  CHECK_THROWS_AS(make_ops(3, 8), std::invalid_argument);
  CHECK_THROWS_AS(MaterialField::constant(dims, 0.0, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(MaterialField::constant(dims, 1.0, -1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(MaterialField::constant(dims, 1.0, 1.0, -0.1), std::invalid_argument);

  auto ops = make_ops(8, 8);
  StateVector wrong(GridDims{6, 6});
  CHECK_THROWS_AS(ops->apply_a(Dir::Forward, wrong), std::invalid_argument);
  CHECK_THROWS_AS(ops->apply_b(BoundarySlice::Zero(5)), std::invalid_argument);
}

TEST_CASE("sigma = 0: A is exactly skew-adjoint") {
  auto ops = make_ops(8, 8);
  const auto& ip = ops->inner();
  Rng rng(3);
  for (int t = 0; t < 10; ++t) {
    StateVector x = random_state(rng, ops->dims());
    StateVector ax = ops->apply_a(Dir::Forward, x);
    CHECK(std::abs(ip.y_inner(ax, x)) <= 1e-12 * ip.y_norm(ax) * ip.y_norm(x));
    // adjoint equals minus forward
    StateVector ax_adj = ops->apply_a(Dir::Adjoint, x);
    StateVector sum(x.dims(), ax.data() + ax_adj.data());
    CHECK(ip.y_norm(sum) <= 1e-12 * ip.y_norm(ax));
  }
}

TEST_CASE("sigma = 1: dissipativity identity") {
  GridDims dims{8, 8};
  auto ops = std::make_shared<const MaxwellOperators>(
      dims, MaterialField::constant(dims, 1.0, 1.0, 1.0), 1.0);
  const auto& ip = ops->inner();
  Rng rng(4);
  for (int t = 0; t < 5; ++t) {
    StateVector x = random_state(rng, dims);
    const double quad = ip.y_inner(ops->apply_a(Dir::Forward, x), x);
    // (Ax,x)_Y = -||sigma^{1/2} x_ez||^2 with the ez mass weights
    double expected = 0.0;
    for (int i = 0; i <= dims.nx; ++i) {
      for (int j = 0; j <= dims.ny; ++j) {
        const int e = dims.ez_index(i, j);
        expected -= ip.y_weights()[e] * x.data()[e] * x.data()[e];
      }
    }
    CHECK(quad == doctest::Approx(expected).epsilon(1e-12));
    CHECK(quad <= 0.0);
  }
}

TEST_CASE("adjoint pairing matches the dense weighted-transpose oracle") {
  GridDims dims{6, 6};
  auto ops = std::make_shared<const MaxwellOperators>(
      dims, MaterialField::constant(dims, 1.2, 0.9, 0.3), 1.0);
  const auto& ip = ops->inner();

  Eigen::MatrixXd a = Eigen::MatrixXd(ops->a_matrix(Dir::Forward));
  Eigen::VectorXd w = ip.y_weights();
  Eigen::MatrixXd a_star_oracle =
      w.cwiseInverse().asDiagonal() * a.transpose() * w.asDiagonal();

  Rng rng(9);
  for (int t = 0; t < 20; ++t) {
    StateVector x = random_state(rng, dims), y = random_state(rng, dims);
    StateVector ax = ops->apply_a(Dir::Forward, x);
    StateVector ay = ops->apply_a(Dir::Adjoint, y);
    const double lhs = ip.y_inner(ax, y), rhs = ip.y_inner(x, ay);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * (std::abs(lhs) + ip.y_norm(x) * ip.y_norm(y)));
    Eigen::VectorXd oracle = a_star_oracle * y.data();
    CHECK((ay.data() - oracle).norm() <= 1e-13 * oracle.norm());
  }

  // zero maps to zero
  StateVector z(dims);
  CHECK(ops->apply_a(Dir::Forward, z).data().norm() == 0.0);
}

TEST_CASE("dense column assembly reproduces the sparse stencil") {
  auto ops = make_ops(6, 6);
  const int n = ops->dims().n_state();
  Eigen::MatrixXd dense(n, n);
  for (int c = 0; c < n; ++c) {
    StateVector e(ops->dims());
    e.data()[c] = 1.0;
    dense.col(c) = ops->apply_a(Dir::Forward, e).data();
  }
  Rng rng(13);
  for (int t = 0; t < 20; ++t) {
    StateVector x = random_state(rng, ops->dims());
    Eigen::VectorXd via_dense = dense * x.data();
    Eigen::VectorXd via_sparse = ops->apply_a(Dir::Forward, x).data();
    CHECK((via_dense - via_sparse).norm() <= 1e-13 * via_sparse.norm());
  }
}

TEST_CASE("resolvent: composition and dense oracle") {
  auto ops = make_ops(6, 6);
  const auto& ip = ops->inner();
  Rng rng(17);

  StateVector zero(ops->dims());
  CHECK(ops->resolvent_solve(1.0, zero).data().norm() == 0.0);

  StateVector w = random_state(rng, ops->dims());
  StateVector rhs(w.dims(), w.data() - ops->apply_a(Dir::Forward, w).data());
  StateVector back = ops->resolvent_solve(1.0, rhs);
  StateVector diff(w.dims(), back.data() - w.data());
  CHECK(ip.y_norm(diff) <= 1e-11 * ip.y_norm(w));

  Eigen::MatrixXd a = Eigen::MatrixXd(ops->a_matrix(Dir::Forward));
  Eigen::MatrixXd m = 4.0 * Eigen::MatrixXd::Identity(a.rows(), a.cols()) - a;
  StateVector r = random_state(rng, ops->dims());
  Eigen::VectorXd oracle = m.partialPivLu().solve(r.data());
  StateVector got = ops->resolvent_solve(4.0, r);
  CHECK((got.data() - oracle).norm() <= 1e-10 * oracle.norm());

  CHECK_THROWS_AS(ops->resolvent_solve(0.5, r), std::invalid_argument);
}

TEST_CASE("apply_b: locality and exact stencil factor") {
  auto ops = make_ops(8, 8);
  const auto& mesh = ops->boundary();
  const GridDims& dims = ops->dims();

  StateVector zb = ops->apply_b(BoundarySlice::Zero(mesh.size()));
  CHECK(zb.data().norm() == 0.0);

  // a non-corner node on the bottom edge: the ghost enters through the
  // half-cell Dy difference, factor 2/hy
  int p_edge = 3;  // (3, 0)
  BoundarySlice g = BoundarySlice::Zero(mesh.size());
  g[p_edge] = 2.25;
  StateVector out = ops->apply_b(g);
  const auto& [ie, je] = mesh.nodes()[p_edge];
  CHECK(je == 0);
  CHECK(out.data()[dims.ez_index(ie, je)] ==
        doctest::Approx(2.25 * 2.0 / dims.hy()).epsilon(1e-14));
  out.data()[dims.ez_index(ie, je)] = 0.0;
  CHECK(out.data().norm() == 0.0);

  // the lower-left corner sees both walls
  g.setZero();
  g[0] = 1.0;
  out = ops->apply_b(g);
  CHECK(out.data()[dims.ez_index(0, 0)] ==
        doctest::Approx(2.0 / dims.hx() + 2.0 / dims.hy()).epsilon(1e-14));
}

TEST_CASE("B and B*: adjoint pairing and dense transpose oracle") {
  GridDims dims{6, 6};
  auto ops = std::make_shared<const MaxwellOperators>(
      dims, MaterialField::constant(dims, 1.4, 1.0, 0.0), 1.0);
  const auto& ip = ops->inner();
  const int ng = ops->boundary().size();
  Rng rng(29);

  StateVector zy(dims);
  CHECK(ops->apply_b_star(zy).norm() == 0.0);

  for (int t = 0; t < 20; ++t) {
    BoundarySlice g = random_slice(rng, ng);
    StateVector y = random_state(rng, dims);
    const double lhs = ip.y_inner(ops->apply_b(g), y);
    const double rhs = ip.boundary().u_inner(g, ops->apply_b_star(y));
    CHECK(std::abs(lhs - rhs) <= 1e-12 * (std::abs(lhs) + 1.0));
  }

  // dense M_U^{-1} B^T M_Y oracle
  DenseSystem sys = DenseSystem::build(*ops);
  Eigen::MatrixXd oracle =
      sys.u_gram.ldlt().solve(sys.b.transpose() * sys.y_weights.asDiagonal());
  StateVector y = random_state(rng, dims);
  BoundarySlice got = ops->apply_b_star(y);
  Eigen::VectorXd expect = oracle * y.data();
  CHECK((got - expect).norm() <= 1e-12 * expect.norm());
}

TEST_CASE("green map: defining equation and resolvent consistency") {
  auto ops = make_ops(6, 6);
  const auto& ip = ops->inner();
  Rng rng(31);

  CHECK(ops->green_map(BoundarySlice::Zero(ops->boundary().size())).data().norm() ==
        0.0);

  BoundarySlice g = random_slice(rng, ops->boundary().size());
  StateVector gm = ops->green_map(g);
  StateVector residual(gm.dims(), gm.data() - ops->apply_a(Dir::Forward, gm).data() -
                                      ops->apply_b(g).data());
  CHECK(ip.y_norm(residual) <= 1e-10 * ip.y_norm(gm));

  // dense solve of (I - A) x = B g
  Eigen::MatrixXd a = Eigen::MatrixXd(ops->a_matrix(Dir::Forward));
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(a.rows(), a.cols()) - a;
  Eigen::VectorXd oracle = m.partialPivLu().solve(ops->apply_b(g).data());
  CHECK((gm.data() - oracle).norm() <= 1e-10 * oracle.norm());
}

TEST_CASE("boundary operator: eigenvector action, inverse powers, constants") {
  auto ops = make_ops(8, 8);
  const auto& mesh = ops->boundary();
  const int ng = mesh.size();

  // eigenvector case
  for (int m : {0, 1, 5}) {
    BoundarySlice f = mesh.eigenvectors().col(m);
    const double factor = std::sqrt(mesh.kappa() + mesh.eigenvalues()[m]);
    BoundarySlice sf = boundary_frac_laplacian(mesh, +1, f);
    CHECK((sf - factor * f).norm() <= 1e-12 * factor * f.norm());
  }

  Rng rng(37);
  BoundarySlice f = random_slice(rng, ng);
  BoundarySlice round =
      boundary_frac_laplacian(mesh, +1, boundary_frac_laplacian(mesh, -1, f));
  CHECK((round - f).norm() <= 1e-12 * f.norm());

  // constants are untouched for kappa = 1 (lambda_0 = 0)
  BoundarySlice c = BoundarySlice::Constant(ng, 3.0);
  CHECK((boundary_frac_laplacian(mesh, +1, c) - c).norm() <= 1e-12 * c.norm());
  CHECK((boundary_frac_laplacian(mesh, -1, c) - c).norm() <= 1e-12 * c.norm());
}

TEST_CASE("boundary eigenbasis: orthonormality and completeness") {
  auto ops = make_ops(8, 8);
  const auto& mesh = ops->boundary();
  const int ng = mesh.size();

  Eigen::MatrixXd gram = mesh.eigenvectors().transpose() *
                         mesh.arc_weights().asDiagonal() * mesh.eigenvectors();
  CHECK((gram - Eigen::MatrixXd::Identity(ng, ng)).norm() <= 1e-12 * std::sqrt(ng));
  CHECK(mesh.eigenvalues()[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(mesh.eigenvalues().minCoeff() >= 0.0);

  Rng rng(41);
  for (int t = 0; t < 20; ++t) {
    BoundarySlice f = random_slice(rng, ng);
    BoundarySlice rec = mesh.synthesize(mesh.analyze(f));
    CHECK((rec - f).norm() <= 1e-11 * f.norm());
  }
}

TEST_CASE("spatially varying eps keeps every operator identity exact") {
  GridDims dims{6, 6};
  auto mat = MaterialField::from_functions(
      dims,
      [](double x, double y) {
        return 1.0 + 0.5 * std::exp(-((x - 0.4) * (x - 0.4) + (y - 0.6) * (y - 0.6)) /
                                    0.08);
      },
      [](double, double) { return 1.0; }, [](double, double) { return 0.0; });
  auto ops = std::make_shared<const MaxwellOperators>(dims, mat, 1.0);
  const auto& ip = ops->inner();
  Rng rng(43);
  for (int t = 0; t < 10; ++t) {
    StateVector x = random_state(rng, dims);
    StateVector ax = ops->apply_a(Dir::Forward, x);
    CHECK(std::abs(ip.y_inner(ax, x)) <= 1e-12 * ip.y_norm(ax) * ip.y_norm(x));
    BoundarySlice g = random_slice(rng, ops->boundary().size());
    const double lhs = ip.y_inner(ops->apply_b(g), x);
    const double rhs = ip.boundary().u_inner(g, ops->apply_b_star(x));
    CHECK(std::abs(lhs - rhs) <= 1e-12 * (std::abs(lhs) + 1.0));
  }
}

TEST_SUITE_END();
