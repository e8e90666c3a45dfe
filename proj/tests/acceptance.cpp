// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one pass/fail line per criterion, run on the fixed
// reference instance (8x8 grid, nt = 64, T = 1, alpha = 1, eps = mu = 1,
// sigma = 0, kappa = 1) and the dense-eligible oracle instance (6x6 grid).
// The reference initial state is the centered ez Gaussian of width 0.4; the
// Riccati probes are the two wide Gaussians pinned below.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "mxlqr/approx.hpp"
#include "mxlqr/dense_oracle.hpp"
#include "mxlqr/zero_sigma.hpp"
#include "test_helpers.hpp"

using namespace mxlqr;
using namespace mxlqr::test;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

int g_failures = 0;

void run_criterion(int number, const std::string& name,
                   const std::function<Outcome()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = fn();
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail = std::string("exception: ") + e.what();
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("[%s] %2d. %-28s %s  (%.1fs)\n", out.pass ? "PASS" : "FAIL", number,
              name.c_str(), out.detail.c_str(), secs);
  std::fflush(stdout);
  if (!out.pass) ++g_failures;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

LqProblem reference_problem(int nt = 64, double cg_tol = 1e-11) {
  LqProblem prob;
  prob.prop = make_prop(make_ops(8, 8), 1.0, nt);
  prob.cg.tol = cg_tol;
  return prob;
}

LqProblem oracle_problem(int nt, double cg_tol = 1e-11) {
  LqProblem prob;
  prob.prop = make_prop(make_ops(6, 6), 1.0, nt);
  prob.cg.tol = cg_tol;
  return prob;
}

StateVector reference_y0(const GridDims& dims) {
  return gaussian_ez(dims, 0.5, 0.5, 0.4);
}

std::vector<StateVector> reference_probes(const GridDims& dims) {
  return {gaussian_ez(dims, 0.5, 0.5, 0.40), gaussian_ez(dims, 0.45, 0.5, 0.42)};
}

// -------------------------------------------------------------------------

Outcome adjoint_exactness() {
  auto prop = make_prop(make_ops(8, 8), 1.0, 64);
  const auto& ops = prop->ops();
  const auto& ip = ops.inner();
  const int ng = ops.boundary().size();
  Rng rng(1001);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    StateVector x = random_state(rng, ops.dims());
    StateVector y = random_state(rng, ops.dims());
    const double la = ip.y_inner(ops.apply_a(Dir::Forward, x), y);
    const double ra = ip.y_inner(x, ops.apply_a(Dir::Adjoint, y));
    worst = std::max(worst, std::abs(la - ra) / (std::abs(la) + std::abs(ra) + 1e-300));

    BoundarySlice g = random_slice(rng, ng);
    const double lb = ip.y_inner(ops.apply_b(g), y);
    const double rb = ip.boundary().u_inner(g, ops.apply_b_star(y));
    worst = std::max(worst, std::abs(lb - rb) / (std::abs(lb) + std::abs(rb) + 1e-300));

    ControlTrajectory gt = random_trajectory(rng, 0, ng, 64);
    StateVector z = random_state(rng, ops.dims());
    const double ll = ip.y_inner(prop->input_map_final(gt), z);
    const double rl = ip.u_traj_inner(gt, prop->adjoint_input_map(z, 0), prop->grid());
    worst = std::max(worst, std::abs(ll - rl) / (std::abs(ll) + std::abs(rl) + 1e-300));
  }
  return {worst <= 1e-11, "max_rel=" + fmt(worst) + " tol=1e-11"};
}

Outcome stone_contraction() {
  auto prop0 = make_prop(make_ops(8, 8), 1.0, 128);
  const auto& ip0 = prop0->inner();
  Rng rng(1002);
  StateVector y = random_state(rng, prop0->ops().dims());
  const double n0 = ip0.y_norm(y);
  double worst = 0.0;
  StateVector cur = y;
  for (int k = 0; k < 128; ++k) {
    cur = prop0->step_forward(cur, nullptr);
    worst = std::max(worst, std::abs(ip0.y_norm(cur) - n0) / n0);
  }

  GridDims dims{8, 8};
  auto lossy = std::make_shared<const MaxwellOperators>(
      dims, MaterialField::constant(dims, 1.0, 1.0, 1.0), 1.0);
  auto prop1 = make_prop(lossy, 1.0, 128);
  StateVector z = random_state(rng, dims);
  double prev = prop1->inner().y_norm(z);
  bool monotone = true;
  for (int k = 0; k < 128; ++k) {
    z = prop1->step_forward(z, nullptr);
    const double n = prop1->inner().y_norm(z);
    monotone = monotone && (n <= prev * (1.0 + 1e-12));
    prev = n;
  }
  const bool pass = worst <= 1e-12 && monotone;
  return {pass, "sigma0_drift=" + fmt(worst) + " tol=1e-12, sigma1_monotone=" +
                    (monotone ? std::string("yes") : std::string("no"))};
}

Outcome openloop_optimality() {
  LqProblem prob = reference_problem();
  const auto& ip = prob.inner();
  StateVector y0 = reference_y0(prob.prop->ops().dims());
  OpenLoopSolution sol = solve_open_loop(prob, y0);

  Rng rng(1003);
  double worst_gap = 0.0, worst_id = 0.0;
  for (int t = 0; t < 20; ++t) {
    ControlTrajectory g =
        random_trajectory(rng, 0, prob.prop->ops().boundary().size(), 64);
    ControlTrajectory d = g;
    d.slices() -= sol.g_hat.slices();
    const double lhs = evaluate_cost(prob, g, y0) - sol.cost;
    const double rhs = ip.u_traj_inner(gram_apply(prob, d), d, prob.grid());
    worst_gap = std::min(worst_gap, lhs);
    worst_id = std::max(worst_id, std::abs(lhs - rhs) / (std::abs(rhs) + 1e-300));
  }

  LqProblem oprob = oracle_problem(16);
  StateVector oy0 = reference_y0(oprob.prop->ops().dims());
  OpenLoopSolution mf = solve_open_loop(oprob, oy0);
  DenseOpenLoopResult oracle = dense_openloop_oracle(oprob, oy0);
  ControlTrajectory diff = mf.g_hat;
  diff.slices() -= oracle.g_hat.slices();
  const double rel = oprob.inner().u_traj_norm(diff, oprob.grid()) /
                     oprob.inner().u_traj_norm(oracle.g_hat, oprob.grid());

  const bool pass = worst_gap >= -1e-9 && worst_id <= 1e-9 && rel <= 1e-7;
  return {pass, "min_gap=" + fmt(worst_gap) + " id_err=" + fmt(worst_id) +
                    " dense_rel=" + fmt(rel) + " tol=1e-7"};
}

Outcome optimal_cost_identity() {
  LqProblem prob = reference_problem();
  const auto& ip = prob.inner();
  StateVector y0 = reference_y0(prob.prop->ops().dims());
  double worst = 0.0;
  for (int s : {0, 32}) {
    LqProblem sub = prob;
    sub.k_s = s;
    OpenLoopSolution sol = solve_open_loop(sub, y0);
    const double quad = ip.y_inner(riccati_apply(prob, s, y0), y0);
    worst = std::max(worst, std::abs(quad - sol.cost) / sol.cost);
  }
  return {worst <= 1e-8, "max_rel=" + fmt(worst) + " tol=1e-8"};
}

Outcome feedback_identity() {
  LqProblem prob = reference_problem();
  StateVector y0 = reference_y0(prob.prop->ops().dims());
  FeedbackReport rep = feedback_residual(prob, y0, {8, 24, 40, 56});
  double cheap = 0.0, indep = 0.0;
  for (const auto& s : rep.samples) {
    cheap = std::max(cheap, s.cheap_residual);
    indep = std::max(indep, s.independent_residual);
  }
  const bool pass = cheap <= 1e-8 && indep <= 1e-6;
  return {pass, "cheap=" + fmt(cheap) + " tol=1e-8, independent=" + fmt(indep) +
                    " tol=1e-6"};
}

Outcome transition_property() {
  LqProblem prob = reference_problem();
  StateVector y0 = reference_y0(prob.prop->ops().dims());
  Rng rng(1006);
  double worst_state = 0.0, worst_control = 0.0;
  for (int split = 0; split < 3; ++split) {
    const int k_tau = 1 + static_cast<int>(rng.next() % 62);
    const int k_t = k_tau + static_cast<int>(rng.next() % (64 - k_tau + 1));
    TransitionReport tr = transition_check(prob, y0, k_tau, k_t);
    worst_state = std::max(worst_state, tr.state_error);
    worst_control = std::max(worst_control, tr.control_error);
  }
  const bool pass = worst_state <= 1e-7 && worst_control <= 1e-7;
  return {pass,
          "state=" + fmt(worst_state) + " control=" + fmt(worst_control) + " tol=1e-7"};
}

Outcome approximation_convergence() {
  LqProblem prob = reference_problem();
  StateVector y0 = reference_y0(prob.prop->ops().dims());
  std::vector<StateVector> probes = reference_probes(prob.prop->ops().dims());
  const std::vector<int> n_list = {1, 2, 4, 8, 16, 32, 64};

  ConvergenceTable table = convergence_study(prob, y0, n_list, probes, {0}, 1);

  bool monotone = true;
  auto check_col = [&](const std::vector<double>& col) {
    for (size_t i = 1; i + 1 < col.size(); ++i) {
      if (col[i + 1] > col[i] * (1.0 + 1e-9)) monotone = false;
    }
  };
  check_col(table.g_err);
  check_col(table.y_err_sup);
  check_col(table.cost_err);
  for (size_t c = 0; c < table.p_err.front().size(); ++c) {
    std::vector<double> col;
    for (const auto& row : table.p_err) col.push_back(row[c]);
    check_col(col);
  }

  const double g_rel = table.g_err.back() / table.g_norm;
  double p_rel = 0.0;
  for (size_t z = 0; z < table.probe_norms.size(); ++z) {
    p_rel = std::max(p_rel, table.p_err.back()[z] / table.probe_norms[z]);
  }
  const bool pass = monotone && g_rel <= 1e-3 && p_rel <= 1e-3;
  return {pass, std::string("monotone=") + (monotone ? "yes" : "no") +
                    " g_final_rel=" + fmt(g_rel) + " p_final_rel=" + fmt(p_rel) +
                    " tol=1e-3"};
}

Outcome dre_oracle_agreement() {
  double gap64 = 0.0, gap128 = 0.0;
  for (int nt : {64, 128}) {
    LqProblem prob = oracle_problem(nt);
    StateVector y0 = reference_y0(prob.prop->ops().dims());
    OpenLoopSolution mf = solve_open_loop(prob, y0);
    DenseDreResult dre = dense_dre_oracle(prob, y0);
    const double gap = std::abs(dre.cost_quadform - mf.cost) / mf.cost;
    (nt == 64 ? gap64 : gap128) = gap;
  }
  const double order = std::log2(gap64 / gap128);
  const bool pass = gap64 <= 3e-3 && gap128 <= 1e-3 && order >= 1.8;
  return {pass, "gap@64=" + fmt(gap64) + " tol=3e-3, gap@128=" + fmt(gap128) +
                    " tol=1e-3, order=" + fmt(order) + " min=1.8"};
}

Outcome zero_sigma_explicit() {
  double err32 = 0.0, err64 = 0.0, err128 = 0.0;
  double pq_mid = 0.0, pq_term = 0.0, term64 = 0.0;
  for (int nt : {32, 64, 128}) {
    LqProblem prob = reference_problem(nt);
    const auto& ip = prob.inner();
    QHandle q(prob.prop, 1.0, prob.cg);
    StateVector y0 = reference_y0(prob.prop->ops().dims());
    QHandle::OpenLoop via_q = q.open_loop(y0);
    OpenLoopSolution via_lq = solve_open_loop(prob, y0);
    ControlTrajectory d = via_q.g_hat;
    d.slices() -= via_lq.g_hat.slices();
    const double rel =
        ip.u_traj_norm(d, prob.grid()) / ip.u_traj_norm(via_lq.g_hat, prob.grid());
    if (nt == 32) err32 = rel;
    if (nt == 64) {
      err64 = rel;
      StateVector dy(y0.dims(),
                     via_q.y_hat.back().data() - via_lq.y_hat.back().data());
      term64 = ip.y_norm(dy) / ip.y_norm(via_lq.y_hat.back());
      std::vector<StateVector> probes = reference_probes(prob.prop->ops().dims());
      Rng rng(1009);
      probes.push_back(random_state(rng, prob.prop->ops().dims()));
      pq_mid = q.pq_identity_error(prob, 32, probes);
      pq_term = q.pq_identity_error(prob, nt, probes);
    }
    if (nt == 128) err128 = rel;
  }
  const double order = 0.5 * std::log2(err32 / err128);
  const bool pass = err64 <= 5e-3 && order >= 1.8 && pq_mid <= 5e-3 &&
                    pq_term <= 1e-12 && term64 <= 5e-3;
  return {pass, "g_rel@64=" + fmt(err64) + " tol=5e-3, order=" + fmt(order) +
                    " min=1.8, PQ_mid=" + fmt(pq_mid) + " tol=5e-3, PQ_T=" +
                    fmt(pq_term)};
}

Outcome dual_re_residual_order() {
  auto ops = make_ops(8, 8);
  Rng rng(1010);
  StateVector x = random_state(rng, ops->dims());
  StateVector y = random_state(rng, ops->dims());
  double res[3];
  int idx = 0;
  for (int nt : {32, 64, 128}) {
    auto prop = make_prop(ops, 1.0, nt);
    QHandle q(prop);
    res[idx++] = q.dual_re_residual(nt / 2, x, y);
  }
  const double r1 = res[0] / res[1], r2 = res[1] / res[2];
  const bool pass = r1 >= 3.0 && r1 <= 5.0 && r2 >= 3.0 && r2 <= 5.0;
  return {pass, "residuals=" + fmt(res[0]) + "/" + fmt(res[1]) + "/" + fmt(res[2]) +
                    " ratios=" + fmt(r1) + "," + fmt(r2) + " in [3,5]"};
}

Outcome coercivity_isomorphism() {
  LqProblem prob = reference_problem();
  QHandle q(prob.prop, 1.0, prob.cg);
  CoercivityReport cr = coercivity_estimate(prob, 0, 60, 1011);
  const double qmax = q.lambda_max_estimate(0, 80, 1011);
  const bool lower = cr.lambda_min >= 0.5;
  const bool cross = cr.lambda_min >= 1.0 / qmax - 1e-3;
  return {lower && cross, "lambda_min=" + fmt(cr.lambda_min) +
                              " threshold=0.5, 1/lambda_max(Q)=" + fmt(1.0 / qmax) +
                              " cross_check=" + (cross ? "ok" : "violated")};
}

Outcome admissibility_trend() {
  double ratios[3];
  int idx = 0;
  for (int g : {8, 16, 32}) {
    auto prop = make_prop(make_ops(g, g), 1.0, 64);
    AdmissibilityReport rep = prop->admissibility_ratio(8, 1012);
    ratios[idx++] = rep.max_ratio;
  }
  double lo = ratios[0], hi = ratios[0];
  bool finite = true;
  for (double r : ratios) {
    finite = finite && std::isfinite(r) && r > 0.0;
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  const double spread = hi / lo;
  // the 4x band is a report-only trend; only divergence beyond 10x fails
  const bool pass = finite && spread <= 10.0;
  return {pass, "max_ratios=" + fmt(ratios[0]) + "/" + fmt(ratios[1]) + "/" +
                    fmt(ratios[2]) + " spread=" + fmt(spread) +
                    (spread <= 4.0 ? " within 4x trend" : " (4x trend exceeded, report-only)")};
}

}  // namespace

int main() {
  std::printf("acceptance suite: reference 8x8/nt=64, oracle 6x6\n");
  run_criterion(1, "adjoint-exactness", adjoint_exactness);
  run_criterion(2, "stone-contraction", stone_contraction);
  run_criterion(3, "open-loop-optimality", openloop_optimality);
  run_criterion(4, "optimal-cost-identity", optimal_cost_identity);
  run_criterion(5, "feedback-identity", feedback_identity);
  run_criterion(6, "transition-property", transition_property);
  run_criterion(7, "approximation-convergence", approximation_convergence);
  run_criterion(8, "dre-oracle-agreement", dre_oracle_agreement);
  run_criterion(9, "zero-sigma-explicit", zero_sigma_explicit);
  run_criterion(10, "dual-re-residual-order", dual_re_residual_order);
  run_criterion(11, "coercivity-isomorphism", coercivity_isomorphism);
  run_criterion(12, "admissibility-trend", admissibility_trend);
  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
