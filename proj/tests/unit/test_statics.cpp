#include "latcb/interpolation.hpp"
#include "latcb/statics.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>

using namespace latcb;

namespace {

constexpr double kPi = std::numbers::pi;

TrigField mode1d(int m, double c, double s) {
  return TrigField(1, {{IVec::Constant(1, m), Vec::Constant(1, c), Vec::Constant(1, s)}});
}

TrigField two_modes() {
  return TrigField(1, {{IVec::Constant(1, 1), Vec::Constant(1, 0.3), Vec::Constant(1, 1.0)},
                       {IVec::Constant(1, 2), Vec::Constant(1, -0.2), Vec::Constant(1, 0.1)}});
}

}  // namespace

TEST(MacroForce, NormalisedToDelta) {
  const auto f = make_macro_force(two_modes(), 0.01);
  EXPECT_NEAR(f.field.dual_norm() + f.field.grad_l2_norm(), 0.01, 1e-15);
  EXPECT_THROW(make_macro_force(mode1d(0, 1.0, 0.0), 0.01), ConfigError);
  EXPECT_THROW(make_macro_force(two_modes(), -1.0), ConfigError);
}

TEST(MakeForces, ConstantFieldGivesEpsTimesConstant) {
  const MacroForce constant{mode1d(0, 2.5, 0.0), 0.0};
  const auto f = make_forces(constant, 1.0 / 16, Mat::Identity(1, 1));
  for (std::size_t i = 0; i < f.fa.site_count(); ++i) EXPECT_NEAR(f.fa[i][0], 2.5 / 16, 1e-15);
}

// sum_xi f^a(xi) w(xi) = int f^c (nodal interpolant of w), and the
// quasi-interpolant mismatch is bounded by ||grad f^c|| ||grad v||.
TEST(MakeForces, DualPairingIdentities) {
  std::mt19937_64 rng(81);
  const auto force = make_macro_force(two_modes(), 1.0);
  const double eps = 1.0 / 12;
  const auto f = make_forces(force, eps, Mat::Identity(1, 1));
  const int n = 12;
  for (int trial = 0; trial < 10; ++trial) {
    const auto w = oracle::random_field(f.fa.lattice(), rng, 1.0);
    const double discrete = l2_dot(f.fa, w);
    const double continuous = oracle::integrate_box(IVec::Zero(1), IVec::Constant(1, n), {}, [&](const Vec& x) {
      return f.fc(x).dot(oracle::nodal_value(w, x));
    }, 16);
    EXPECT_NEAR(discrete, continuous, 1e-12);

    DisplacementField wq(w.lattice());
    for (int j = 0; j < n; ++j) wq[j] = oracle::quasi_at_site(w, IVec::Constant(1, j));
    const double mismatch = std::abs(l2_dot(f.fa, wq) - discrete);
    const double grad_fc = eps * eps * force.field.grad_l2_norm() / std::sqrt(eps);  // micro-scale ||grad f^c||
    EXPECT_LE(mismatch, grad_fc * grad_norm(w, 2.0) + 1e-14);
  }
}

TEST(CBStatic, ZeroForceGivesZero) {
  const CBModel m(fixtures::lj_chain(2.0, 0.5));
  const auto sol = solve_cb_static(m, TrigField::zero(1));
  EXPECT_EQ(sol.grid.l2_norm(sol.U), 0.0);
  EXPECT_EQ(sol.residual, 0.0);
}

TEST(CBStatic, HarmonicChainFourierDivision) {
  const auto p = make_harmonic_chain(2.0, -0.25, 1.0);
  const CBModel m(p);
  const auto force = make_macro_force(two_modes(), 0.05);
  CBStaticOptions opts;
  opts.tol = 1e-13;
  const auto sol = solve_cb_static(m, force.field, opts);
  // U^ = F^ / ((a1 + 4 a2) |2 pi m|^2)
  const TrigField exact = force.field.filtered([](const IVec& k) { return 1.0 / std::pow(2 * kPi * k[0], 2); });
  const GridField expect = sol.grid.sample(exact);
  GridField diff = sol.U;
  diff.axpy(-1.0, expect);
  EXPECT_LE(sol.grid.max_abs(diff), 1e-14);
  EXPECT_LE(sol.residual, 1e-13);
}

TEST(CBStatic, NewtonConvergesQuadratically) {
  const CBModel m(fixtures::lj_chain(2.0, 0.5));
  const auto force = make_macro_force(two_modes(), 2.0);
  CBStaticOptions opts;
  opts.tol = 1e-12;
  const auto sol = solve_cb_static(m, force.field, opts);
  const auto& h = sol.residual_history;
  ASSERT_GE(h.size(), 3u);
  EXPECT_LE(sol.residual, 1e-12);
  EXPECT_LT(sol.max_strain, 0.5);
  // late steps, i.e. once the first Newton step has left the initial guess
  int checked = 0;
  for (std::size_t k = 2; k < h.size(); ++k) {
    EXPECT_LE(h[k] / h[k - 1], 0.1) << "step " << k;
    ++checked;
  }
  EXPECT_GE(checked, 1);
}

TEST(CBStatic, UnstableModuliRejected) {
  const CBModel m(make_harmonic_chain(1.0, -0.5, 1.0));  // a1 + 4 a2 < 0
  EXPECT_THROW(solve_cb_static(m, make_macro_force(two_modes(), 0.01).field), StabilityError);
}

TEST(AtomisticStatic, ZeroForceGivesZero) {
  const auto p = fixtures::lj_chain();
  const DisplacementField zero(LatticeSpec::cubic(1, 16));
  const auto sol = solve_atomistic_static(p, zero, zero);
  EXPECT_EQ(l2_norm(sol.u), 0.0);
  EXPECT_GT(sol.min_rayleigh, 0.0);
}

TEST(AtomisticStatic, HarmonicChainMatchesDenseSolve) {
  const auto p = make_harmonic_chain(2.0, -0.25, 1.0);
  const int n = 16;
  const auto force = make_macro_force(two_modes(), 0.05);
  const auto f = make_forces(force, 1.0 / n, p.orientation());
  const DisplacementField zero(f.fa.lattice());
  AtomisticStaticOptions opts;
  opts.tol = 1e-13;
  const auto sol = solve_atomistic_static(p, f.fa, zero, opts);

  Eigen::MatrixXd H(n + 1, n + 1);
  H.setZero();
  for (int c = 0; c < n; ++c) {
    DisplacementField e(zero.lattice());
    e[c][0] = 1.0;
    const auto he = hessian_apply(p, zero, e);
    for (int r = 0; r < n; ++r) H(r, c) = he[r][0];
  }
  // bordered system for the zero-mean gauge
  H.block(0, n, n, 1).setOnes();
  H.block(n, 0, 1, n).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
  for (int r = 0; r < n; ++r) rhs[r] = f.fa[r][0];
  const Eigen::VectorXd x = H.fullPivLu().solve(rhs);
  for (int r = 0; r < n; ++r) EXPECT_NEAR(sol.u[r][0], x[r], 1e-12);
  EXPECT_NEAR(sol.u.mean().norm(), 0.0, 1e-15);
}

TEST(AtomisticStatic, ResidualCertifiedAndEnergyDescends) {
  std::mt19937_64 rng(82);
  const auto p = fixtures::lj_chain(2.0, 0.5);
  const auto force = make_macro_force(two_modes(), 0.01);
  const double eps = 1.0 / 32;
  const auto f = make_forces(force, eps, p.orientation());
  const DisplacementField zero(f.fa.lattice());
  AtomisticStaticOptions opts;
  opts.tol = 1e-12;
  const auto sol = solve_atomistic_static(p, f.fa, zero, opts);
  EXPECT_LE(sol.residual, opts.tol);
  EXPECT_NEAR(sol.u.mean().norm(), 0.0, 1e-14);
  const auto r = atomistic_static_residual(p, sol.u, f.fa);
  EXPECT_NEAR(l2_norm(r), sol.residual, 1e-15);
  for (int trial = 0; trial < 10; ++trial) {
    const auto v = oracle::random_field(f.fa.lattice(), rng, 1.0);
    EXPECT_LE(std::abs(l2_dot(r, v)), opts.tol * l2_norm(v));
  }
  const auto& e = sol.energy_history;
  for (std::size_t k = 1; k < e.size(); ++k) EXPECT_LE(e[k], e[k - 1] + 1e-13 * 32) << "step " << k;
}

TEST(AtomisticStatic, RejectsBadInputAndUnstableChain) {
  const auto p = fixtures::lj_chain();
  DisplacementField f(LatticeSpec::cubic(1, 16));
  f[0][0] = 1e-3;
  const DisplacementField zero(f.lattice());
  EXPECT_THROW(solve_atomistic_static(p, f, zero), ConfigError);
  EXPECT_THROW(solve_atomistic_static(make_harmonic_chain(-1.0, 0.5), zero, zero), StabilityError);
}

TEST(StaticError, QuasiInterpolatedCBIsSecondOrderAndGaugeFree) {
  const auto p = make_harmonic_chain(2.0, -0.25, 1.0);
  const CBModel m(p);
  const auto force = make_macro_force(two_modes(), 0.05);
  CBStaticOptions opts;
  opts.tol = 1e-13;
  const auto cb = solve_cb_static(m, force.field, opts);
  std::vector<double> eps, err;
  for (int n : {16, 32, 64, 128}) {
    auto ua = quasi_interpolated_cb(cb, 1.0 / n, p.orientation());
    const double e = static_error(cb.grid, cb.U, ua, 1.0 / n);
    for (std::size_t i = 0; i < ua.site_count(); ++i) ua[i][0] += 3.0;
    EXPECT_NEAR(static_error(cb.grid, cb.U, ua, 1.0 / n), e, 1e-12);
    eps.push_back(1.0 / n);
    err.push_back(e);
  }
  // e = c eps^2 (1 + O(eps^2)), so the fit approaches 2 from below
  EXPECT_GE(fit_rate(eps, err).slope, 1.99);
  EXPECT_NEAR(err[2] / err[3], 4.0, 0.01);
}

TEST(StaticSweep, HarmonicChainRateAndTooFewPoints) {
  const auto p = make_harmonic_chain(2.0, -0.25, 1.0);
  const auto force = make_macro_force(mode1d(1, 0.0, 1.0), 0.01);
  StaticSweepConfig cfg;
  cfg.eps = {1.0 / 8, 1.0 / 16};
  EXPECT_THROW(static_converge_sweep(p, force, cfg), ConfigError);
  cfg.eps = {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64};
  cfg.cb.tol = 1e-13;
  cfg.atomistic.tol = 1e-13;
  cfg.workers = 2;
  const auto res = static_converge_sweep(p, force, cfg);
  EXPECT_TRUE(res.rate.pass) << res.rate.slope;
  for (const auto& row : res.rows) EXPECT_GT(row.min_rayleigh, 0.0);
}
