#pragma once

#include "latcb/potential.hpp"
#include "latcb/rate.hpp"
#include "latcb/spectral_grid.hpp"
#include "latcb/stress.hpp"
#include "latcb/trig_field.hpp"

#include <string>
#include <vector>

namespace latcb {

/// Macroscopic initial displacement U0 and velocity U1 = dU/dT at T = 0.
struct InitialData {
  TrigField U0;
  TrigField U1;

  /// Lattice data u0 = zeta * u^c(0), u1 = zeta * du^c/dt(0) at the sites,
  /// where u^c(x, t) = U(eps x, eps t) / eps.
  DisplacementField lattice_displacement(double eps, const Mat& orientation) const;
  DisplacementField lattice_velocity(double eps, const Mat& orientation) const;
};

/// Throws ConfigError unless U0, U1 have zero mean and sup|grad U0| < kappa.
void validate_initial_data(const InitialData& data, double kappa);

/// sqrt of the largest eigenvalue of H(k) over a Brillouin grid.
double max_frequency(const Potential& potential, int points_per_axis = 64);

/// Largest Cauchy-Born wave speed over the grid values of grad U.
double max_wave_speed(const CBModel& model, const std::vector<Mat>& strains);

struct AtomisticTrajectory {
  std::vector<double> time;  // macroscopic, T = eps t
  std::vector<DisplacementField> u;
  std::vector<DisplacementField> v;  // du/dt in micro time
  std::vector<double> energy;        // E^a(u) + |v|^2 / 2
  double dt = 0.0;                   // micro time step
  std::size_t steps = 0;
  std::vector<std::string> warnings;

  double energy_drift() const;
};

struct AtomisticDynamicsOptions {
  double dt = 0.0;    // 0: 0.2 / omega_max
  int samples = 11;   // output times, uniform in [0, T_macro]
};

/// Velocity Verlet for u'' = -dE^a/du, unit masses, up to micro time
/// T_macro / eps. Admissibility is checked by every force evaluation; a
/// violation aborts with the time stamp.
AtomisticTrajectory integrate_atomistic(const Potential& potential, const DisplacementField& u0,
                                        const DisplacementField& v0, double eps, double T_macro,
                                        const AtomisticDynamicsOptions& options = {});
AtomisticTrajectory integrate_atomistic(const Potential& potential, const InitialData& data, double eps,
                                        double T_macro, const AtomisticDynamicsOptions& options = {});

struct CBTrajectory {
  SpectralGrid grid;
  std::vector<double> time;
  std::vector<GridField> U;
  std::vector<GridField> V;  // dU/dT
  std::vector<double> energy;  // |V|^2 / 2 + int W(grad U)
  double dt = 0.0;
  std::size_t steps = 0;
  double max_strain = 0.0;

  double energy_drift() const;
};

struct CBDynamicsOptions {
  int grid_points = 64;
  double dt = 0.0;    // 0: 0.2 dx / c_max
  int samples = 11;
  double tail_tolerance = 1e-8;  // relative spectral energy allowed in the top third of modes
};

/// Leapfrog in time, Fourier in space, for U'' = div S^c(grad U) on the unit
/// torus. Aborts when grad U leaves the admissible set or the spectral tail
/// grows (loss of regularity).
CBTrajectory solve_cb_wave(const CBModel& model, const InitialData& data, double T_macro,
                           const CBDynamicsOptions& options = {});

/// eps^{d/2} ||I v^a - v^c||_{L^2} between a lattice field and the scaled
/// continuum field V(eps x) (no 1/eps factor), by Gauss quadrature per cell.
double velocity_error(const SpectralGrid& grid, const GridField& V, const DisplacementField& va, double eps,
                      int quad_points = 6);

struct DynamicSweepRow {
  double eps = 0.0;
  double error = 0.0;          // max over sample times
  double error_half_dt = 0.0;  // same with both time steps halved
  double control_change = 0.0;  // |error_half_dt - error| / error
  double energy_drift = 0.0;
  std::size_t steps = 0;
  std::vector<double> error_history;
};

struct DynamicSweepResult {
  CBTrajectory cb;
  std::vector<DynamicSweepRow> rows;
  RateReport rate;
  double max_control_change = 0.0;
};

struct DynamicSweepConfig {
  std::vector<double> eps;
  double T_macro = 0.5;
  AtomisticDynamicsOptions atomistic;
  CBDynamicsOptions cb;
  bool control_run = true;
  int quad_points = 6;
  int workers = 1;
  double band_lo = 1.8;
  double band_hi = 2.2;
};

DynamicSweepResult dynamic_error_sweep(const Potential& potential, const InitialData& data,
                                       const DynamicSweepConfig& config);

enum class ProbeShape { alternating, long_wave };

struct GrowthReport {
  double eps = 0.0;
  double window_lo = 1.0;
  double window_hi = 0.0;  // 3 |log eps|
  std::vector<double> time;   // micro time
  std::vector<double> speed;  // ||du/dt||_{l^2}
  std::vector<double> ratio;  // speed / (eps^2 e^t / 2)
  double min_ratio = 0.0;     // over the window
  double max_speed = 0.0;     // over [0, window_hi]
  double stable_bound = 0.0;  // 2 eps^2
  double cb_max = 0.0;        // sup of the CB solution with zero data
};

struct InstabilityOptions {
  ProbeShape probe = ProbeShape::alternating;
  double dt = 0.0;  // 0: min(0.2 / omega_max, 0.01)
  int samples_per_unit = 20;
};

/// Harmonic chain with u(0) = 0, du/dt(0) = eps^2 psi on 1/eps sites, psi
/// unit in l^2; the chain's domain is unrestricted.
GrowthReport instability_demo(double a1, double a2, double eps, const InstabilityOptions& options = {});

}  // namespace latcb
