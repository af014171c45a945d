#include "latcb/dynamics.hpp"
#include "latcb/stability.hpp"
#include "latcb/statics.hpp"

#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace latcb;

namespace {

constexpr double kPi = std::numbers::pi;

TrigField sine(double amp, int m = 1) {
  return TrigField(1, {{IVec::Constant(1, m), Vec::Zero(1), Vec::Constant(1, amp)}});
}
TrigField cosine(double amp, int m = 1) {
  return TrigField(1, {{IVec::Constant(1, m), Vec::Constant(1, amp), Vec::Zero(1)}});
}

DisplacementField mode_field(int n, int m, double amp) {
  DisplacementField u(LatticeSpec::cubic(1, n));
  for (int j = 0; j < n; ++j) u[static_cast<std::size_t>(j)][0] = amp * std::cos(2 * kPi * m * j / n);
  return u;
}

}  // namespace

TEST(AtomisticDynamics, ZeroDataStaysZero) {
  const InitialData zero{TrigField::zero(1), TrigField::zero(1)};
  const auto traj = integrate_atomistic(fixtures::lj_chain(), zero, 1.0 / 16, 0.1);
  for (const auto& u : traj.u) EXPECT_EQ(l2_norm(u), 0.0);
  for (const auto& v : traj.v) EXPECT_EQ(l2_norm(v), 0.0);
  EXPECT_EQ(traj.energy_drift(), 0.0);
}

// u(t) = A cos(k xi) cos(omega t) with omega^2 the symbol at k
TEST(AtomisticDynamics, HarmonicModeOscillatesAtDispersionFrequency) {
  const auto p = make_harmonic_chain(2.0, -0.25);
  const int n = 16, m = 2;
  const double amp = 0.01, k = 2 * kPi * m / n;
  const double omega = std::sqrt(dynamical_symbol(p, Vec::Constant(1, k))(0, 0).real());
  const auto u0 = mode_field(n, m, amp);
  const DisplacementField v0(u0.lattice());
  double prev = 0.0;
  for (double dt : {0.05, 0.025}) {
    AtomisticDynamicsOptions opts;
    opts.dt = dt;
    opts.samples = 5;
    const auto traj = integrate_atomistic(p, u0, v0, 1.0 / n, 0.5, opts);
    const double t = traj.time.back() * n;
    ASSERT_NEAR(t, 8.0, 1e-12);
    DisplacementField exact = u0;
    for (std::size_t i = 0; i < exact.site_count(); ++i) exact[i][0] *= std::cos(omega * t);
    double err = 0.0;
    for (std::size_t i = 0; i < exact.site_count(); ++i)
      err = std::max(err, std::abs(traj.u.back()[i][0] - exact[i][0]));
    EXPECT_LT(err, 1e-3 * amp);
    if (prev > 0.0) {
      EXPECT_NEAR(prev / err, 4.0, 0.2);
    }
    prev = err;
  }
}

TEST(AtomisticDynamics, EnergyDriftIsSecondOrder) {
  const auto p = fixtures::lj_chain(2.0, 0.5);
  const InitialData data{sine(0.02), cosine(0.05)};
  const double eps = 1.0 / 16;
  AtomisticDynamicsOptions opts;
  opts.samples = 101;
  const auto coarse = integrate_atomistic(p, data, eps, 0.5, opts);
  opts.dt = 0.5 * coarse.dt;
  const auto fine = integrate_atomistic(p, data, eps, 0.5, opts);
  ASSERT_GT(fine.energy_drift(), 0.0);
  EXPECT_NEAR(coarse.energy_drift() / fine.energy_drift(), 4.0, 0.5);
}

TEST(AtomisticDynamics, TimeReversible) {
  const auto p = fixtures::lj_chain(2.0, 0.5);
  const InitialData data{sine(0.02), cosine(0.05, 2)};
  const double eps = 1.0 / 16;
  const auto fwd = integrate_atomistic(p, data, eps, 0.25);
  DisplacementField back_v = fwd.v.back();
  for (auto& x : back_v.values()) x = -x;
  AtomisticDynamicsOptions opts;
  opts.dt = fwd.dt;
  const auto bwd = integrate_atomistic(p, fwd.u.back(), back_v, eps, 0.25, opts);
  DisplacementField du = bwd.u.back(), dv = bwd.v.back();
  for (std::size_t i = 0; i < du.values().size(); ++i) {
    du.values()[i] -= fwd.u.front().values()[i];
    dv.values()[i] += fwd.v.front().values()[i];
  }
  EXPECT_LT(l2_norm(du), 1e-11);
  EXPECT_LT(l2_norm(dv), 1e-11);
}

TEST(AtomisticDynamics, AdmissibilityLossCarriesTime) {
  const auto p = fixtures::lj_chain(2.0, 0.1);
  const int n = 16;
  const auto u0 = mode_field(n, 1, 0.0);
  DisplacementField v0 = mode_field(n, 4, 3.0);
  try {
    integrate_atomistic(p, u0, v0, 1.0 / n, 1.0);
    FAIL() << "expected an admissibility abort";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("T = "), std::string::npos) << e.what();
  }
}

TEST(CBDynamics, ZeroDataStaysZero) {
  const InitialData zero{TrigField::zero(1), TrigField::zero(1)};
  const auto traj = solve_cb_wave(CBModel(fixtures::lj_chain()), zero, 0.1);
  for (const auto& U : traj.U) EXPECT_EQ(traj.grid.max_abs(U), 0.0);
  EXPECT_EQ(traj.max_strain, 0.0);
}

// unit wave speed: U = A sin(2 pi (X - T))
TEST(CBDynamics, DAlembertTravellingWave) {
  const double amp = 0.01;
  const InitialData data{sine(amp), cosine(-2 * kPi * amp)};
  CBDynamicsOptions opts;
  opts.dt = 1e-4;
  opts.samples = 6;
  const auto traj = solve_cb_wave(CBModel(make_harmonic_chain(2.0, -0.25)), data, 0.5, opts);
  for (std::size_t j = 0; j < traj.time.size(); ++j) {
    const double T = traj.time[j];
    const TrigField exact(1, {{IVec::Constant(1, 1), Vec::Constant(1, -amp * std::sin(2 * kPi * T)),
                               Vec::Constant(1, amp * std::cos(2 * kPi * T))}});
    GridField diff = traj.U[j];
    diff.axpy(-1.0, traj.grid.sample(exact));
    EXPECT_LT(traj.grid.max_abs(diff), 1e-7 * amp) << "T = " << T;
  }
}

TEST(CBDynamics, EnergyConservedToSecondOrder) {
  const CBModel m(fixtures::lj_chain(2.0, 0.5));
  const InitialData data{sine(2e-4), cosine(1e-3, 2)};
  CBDynamicsOptions opts;
  opts.samples = 51;
  const auto coarse = solve_cb_wave(m, data, 0.3, opts);
  opts.dt = 0.5 * coarse.dt;
  const auto fine = solve_cb_wave(m, data, 0.3, opts);
  EXPECT_LT(coarse.energy_drift(), 1e-4 * coarse.energy.front());
  ASSERT_GT(fine.energy_drift(), 0.0);
  EXPECT_NEAR(coarse.energy_drift() / fine.energy_drift(), 4.0, 0.5);
}

TEST(CBDynamics, RejectsCoarseGridAndUnstableModuli) {
  const InitialData data{sine(0.01, 8), TrigField::zero(1)};
  CBDynamicsOptions opts;
  opts.grid_points = 24;
  EXPECT_THROW(solve_cb_wave(CBModel(fixtures::lj_chain()), data, 0.1, opts), ConfigError);
  EXPECT_THROW(solve_cb_wave(CBModel(make_harmonic_chain(1.0, -0.5)), InitialData{sine(0.01), sine(0.0)}, 0.1),
               StabilityError);
}

TEST(InitialData, Validation) {
  EXPECT_NO_THROW(validate_initial_data({sine(0.01), cosine(0.01)}, 0.5));
  const TrigField with_mean(1, {{IVec::Constant(1, 0), Vec::Constant(1, 1.0), Vec::Zero(1)}});
  EXPECT_THROW(validate_initial_data({with_mean, TrigField::zero(1)}, 0.5), ConfigError);
  EXPECT_THROW(validate_initial_data({TrigField::zero(1), with_mean}, 0.5), ConfigError);
  // sup |grad U0| = 2 pi * 0.1 > 0.5
  EXPECT_THROW(validate_initial_data({sine(0.1), TrigField::zero(1)}, 0.5), ConfigError);
}

TEST(DynamicSweep, InitialErrorIsInterpolationMismatch) {
  const auto p = make_harmonic_chain(2.0, -0.25, 1.0);
  const InitialData data{sine(0.01), cosine(0.02, 2)};
  DynamicSweepConfig cfg;
  cfg.eps = {1.0 / 16, 1.0 / 32, 1.0 / 64};
  cfg.T_macro = 0.02;
  cfg.control_run = false;
  const auto res = dynamic_error_sweep(p, data, cfg);
  std::vector<double> eps, e0;
  for (const auto& row : res.rows) {
    const auto u0 = data.lattice_displacement(row.eps, p.orientation());
    const auto v0 = data.lattice_velocity(row.eps, p.orientation());
    const double direct = static_error(res.cb.grid, res.cb.U[0], u0, row.eps) +
                          velocity_error(res.cb.grid, res.cb.V[0], v0, row.eps);
    EXPECT_NEAR(row.error_history.front(), direct, 1e-15);
    eps.push_back(row.eps);
    e0.push_back(direct);
  }
  EXPECT_GE(fit_rate(eps, e0).slope, 1.9);
  cfg.eps = {1.0 / 16, 1.0 / 32};
  EXPECT_THROW(dynamic_error_sweep(p, data, cfg), ConfigError);
}

TEST(DynamicSweep, MaxErrorNondecreasingInTime) {
  const auto p = fixtures::lj_chain(2.0, 0.5);
  const InitialData data{sine(1e-3), cosine(2e-3, 2)};
  DynamicSweepConfig cfg;
  cfg.eps = {1.0 / 16, 1.0 / 32, 1.0 / 64};
  cfg.control_run = false;
  cfg.atomistic.dt = 0.01;
  cfg.cb.dt = 1e-4;
  std::vector<double> previous(cfg.eps.size(), 0.0);
  for (auto [T, samples] : {std::pair{0.01, 2}, std::pair{0.02, 3}, std::pair{0.04, 5}}) {
    cfg.T_macro = T;
    cfg.atomistic.samples = samples;
    cfg.cb.samples = samples;
    const auto res = dynamic_error_sweep(p, data, cfg);
    for (std::size_t i = 0; i < cfg.eps.size(); ++i) {
      EXPECT_GE(res.rows[i].error, previous[i] * (1 - 1e-12)) << "T = " << T;
      previous[i] = res.rows[i].error;
    }
  }
}

TEST(Instability, StableChainAndLongWaveStayBounded) {
  const double eps = 1.0 / 64;
  const auto stable = instability_demo(2.0, -0.25, eps);
  EXPECT_LE(stable.max_speed, stable.stable_bound);
  InstabilityOptions lw;
  lw.probe = ProbeShape::long_wave;
  const auto smooth = instability_demo(-1.0, 0.5, eps, lw);
  EXPECT_LE(smooth.max_speed, eps * eps * (1 + 1e-9));
  const auto growing = instability_demo(-1.0, 0.5, eps);
  EXPECT_GE(growing.min_ratio, 1.0);
  EXPECT_THROW(instability_demo(-1.0, 0.5, 1.0 / 63), ConfigError);
}
