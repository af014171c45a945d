#pragma once

#include "latcb/potential.hpp"
#include "latcb/rate.hpp"
#include "latcb/spectral_grid.hpp"
#include "latcb/stress.hpp"
#include "latcb/trig_field.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace latcb {

/// Zero-mean band-limited body force F^c on the unit torus, scaled so that
/// ||F^c||_{W^{-1,2}} + ||grad F^c||_{L^2} = delta.
struct MacroForce {
  TrigField field;
  double delta = 0.0;
};

MacroForce make_macro_force(const TrigField& shape, double delta);

/// Micro-scale forces for a given eps: f^c(x) = eps F^c(eps x) and
/// f^a(xi) = int zeta(xi - x) f^c(x) dx, the latter exact through the
/// Fourier multiplier of zeta.
struct ScaledForces {
  double eps = 0.0;
  TrigField macro;  // F^c
  DisplacementField fa;

  Vec fc(const Vec& x) const { return eps * macro.value(eps * x); }
};

ScaledForces make_forces(const MacroForce& force, double eps, const Mat& orientation);

struct CBStaticOptions {
  int grid_points = 64;
  double tol = 1e-10;
  int max_newton = 40;
  int max_cg = 1000;
};

struct CBStaticSolution {
  SpectralGrid grid;
  GridField U;
  std::vector<double> residual_history;  // L^2 residual per Newton iterate
  double residual = 0.0;                 // recomputed from scratch
  double max_strain = 0.0;               // max |grad U| on the grid
  int newton_steps = 0;
};

/// Spectral Newton-PCG for -div_X S^c(grad U) = F^c on the unit torus,
/// zero-mean U.
CBStaticSolution solve_cb_static(const CBModel& model, const TrigField& force, const CBStaticOptions& options = {});

/// -div_X S^c(grad U) - F on the grid.
GridField cb_static_residual(const CBModel& model, const SpectralGrid& grid, const GridField& U, const GridField& F);

struct AtomisticStaticOptions {
  double tol = 1e-10;
  int max_newton = 50;
  int max_cg = 4000;
  int random_probes = 8;
  std::uint64_t seed = 0;
};

struct AtomisticStaticSolution {
  DisplacementField u;
  std::vector<double> residual_history;
  std::vector<double> energy_history;  // E^a(u) - (f^a, u) per iterate
  double residual = 0.0;               // recomputed from scratch
  double min_rayleigh = 0.0;           // smallest probe quotient <H v, v> / ||grad v||^2
  int newton_steps = 0;
};

/// Newton-CG for <delta E^a(u), v> = (f^a, v), zero-mean gauge, Armijo
/// line search on E^a(u) - (f^a, u); preconditioned by the inverse of the
/// reference Hessian. Throws StabilityError if a probe quotient is <= 0.
AtomisticStaticSolution solve_atomistic_static(const Potential& potential, const DisplacementField& fa,
                                               const DisplacementField& u_init,
                                               const AtomisticStaticOptions& options = {});

/// -forces(u) - f^a
DisplacementField atomistic_static_residual(const Potential& potential, const DisplacementField& u,
                                            const DisplacementField& fa);

/// Smallest <H(u) v, v> / ||grad v||^2 over seeded random and zone-boundary probes.
double min_rayleigh_probe(const Potential& potential, const DisplacementField& u, int random_probes,
                          std::uint64_t seed);

/// Quasi-interpolant (zeta * u^c)(xi) of the micro-scale CB solution
/// u^c(x) = U^c(eps x) / eps at the lattice sites, mean removed.
DisplacementField quasi_interpolated_cb(const CBStaticSolution& cb, double eps, const Mat& orientation);

/// eps^{d/2} ||grad u^c - grad I u^a||_{L^2}, i.e. the macroscopic
/// ||grad U^c - grad U^a_eps||_{L^2(torus)}, by Gauss quadrature on each
/// micro cell.
double static_error(const SpectralGrid& grid, const GridField& U, const DisplacementField& ua, double eps,
                    int quad_points = 6);

struct StaticSweepRow {
  double eps = 0.0;
  double error = 0.0;
  double residual_a = 0.0;
  int newton_steps = 0;
  double min_rayleigh = 0.0;
};

struct StaticSweepResult {
  CBStaticSolution cb;
  std::vector<StaticSweepRow> rows;
  RateReport rate;
};

struct StaticSweepConfig {
  std::vector<double> eps;
  CBStaticOptions cb;
  AtomisticStaticOptions atomistic;
  int quad_points = 6;
  int workers = 1;
  double band_lo = 1.8;
  double band_hi = 2.2;
};

StaticSweepResult static_converge_sweep(const Potential& potential, const MacroForce& force,
                                        const StaticSweepConfig& config);

}  // namespace latcb
