#include "latcb/dynamics.hpp"

#include "latcb/interpolation.hpp"
#include "latcb/quadrature.hpp"
#include "latcb/stability.hpp"
#include "latcb/statics.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace latcb {

namespace {

std::string at_time(const std::string& what, double t) {
  std::ostringstream os;
  os << what << " at T = " << t;
  return os.str();
}

// Uniform sampling of [0, T] with a step that divides the sample spacing.
struct Schedule {
  int samples;
  long steps_per_sample;
  double dt;
};

Schedule make_schedule(double span, int samples, double dt_max) {
  if (samples < 2) throw ConfigError("need at least two output samples");
  if (!(span >= 0.0)) throw ConfigError("final time must be nonnegative");
  if (!(dt_max > 0.0) || !std::isfinite(dt_max)) throw ConfigError("time step must be positive");
  const double gap = span / (samples - 1);
  if (gap == 0.0) return {samples, 0, dt_max};
  const long n = std::max(1L, static_cast<long>(std::ceil(gap / dt_max - 1e-12)));
  return {samples, n, gap / static_cast<double>(n)};
}

DisplacementField sample_field(const TrigField& field, double eps, const Mat& orientation, double factor) {
  const int n = cells_for_scale(eps);
  const TrigField filtered = field.filtered([eps](const IVec& m) { return zeta_multiplier(m, eps); });
  DisplacementField u(LatticeSpec(field.dim(), orientation, n));
  for (std::size_t i = 0; i < u.site_count(); ++i) {
    const Vec xi = u.lattice().multi_index(i).cast<double>();
    u[i] = factor * filtered.value(eps * xi);
  }
  return u;
}

double drift(const std::vector<double>& energy) {
  double d = 0.0;
  for (double e : energy) d = std::max(d, std::abs(e - energy.front()));
  return d;
}

}  // namespace

DisplacementField InitialData::lattice_displacement(double eps, const Mat& orientation) const {
  return sample_field(U0, eps, orientation, 1.0 / eps);
}

DisplacementField InitialData::lattice_velocity(double eps, const Mat& orientation) const {
  return sample_field(U1, eps, orientation, 1.0);
}

void validate_initial_data(const InitialData& data, double kappa) {
  if (data.U0.dim() != data.U1.dim()) throw ConfigError("initial displacement and velocity dimensions differ");
  if (!data.U0.zero_mean() || !data.U1.zero_mean()) throw ConfigError("initial data must have zero mean");
  const double g = data.U0.grad_sup_norm();
  if (!(g < kappa)) {
    std::ostringstream os;
    os << "sup |grad U0| = " << g << " is not below kappa = " << kappa;
    throw ConfigError(os.str());
  }
}

double max_frequency(const Potential& potential, int points_per_axis) {
  const DynamicalSymbol symbol(potential);
  double lam = 0.0;
  for (const Vec& k : brillouin_grid(potential.dim(), points_per_axis))
    lam = std::max(lam, symbol.eigenvalues(k).maxCoeff());
  // the zone corner is where nearest-neighbour modes peak; the shifted grid misses it
  lam = std::max(lam, symbol.eigenvalues(Vec::Constant(potential.dim(), std::numbers::pi)).maxCoeff());
  return std::sqrt(lam);
}

double max_wave_speed(const CBModel& model, const std::vector<Mat>& strains) {
  const int d = model.dim();
  std::vector<Vec> dirs;
  if (d == 1) {
    dirs.push_back(Vec::Ones(1));
  } else if (d == 2) {
    for (int i = 0; i < 72; ++i) {
      const double t = std::numbers::pi * i / 72;
      Vec b(2);
      b << std::cos(t), std::sin(t);
      dirs.push_back(b);
    }
  } else {
    const int n = 200;
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < n; ++i) {
      const double z = 1.0 - (i + 0.5) * 2.0 / n;
      const double r = std::sqrt(1.0 - z * z);
      Vec b(3);
      b << r * std::cos(golden * i), r * std::sin(golden * i), z;
      dirs.push_back(b);
    }
  }
  double c2 = 0.0;
  for (const Mat& F : strains)
    for (const Vec& b : dirs) {
      const Mat a = model.acoustic_tensor(F, b);
      Eigen::SelfAdjointEigenSolver<Mat> eig(a, Eigen::EigenvaluesOnly);
      c2 = std::max(c2, eig.eigenvalues().maxCoeff());
    }
  return std::sqrt(c2);
}

double AtomisticTrajectory::energy_drift() const { return energy.empty() ? 0.0 : drift(energy); }
double CBTrajectory::energy_drift() const { return energy.empty() ? 0.0 : drift(energy); }

AtomisticTrajectory integrate_atomistic(const Potential& potential, const DisplacementField& u0,
                                        const DisplacementField& v0, double eps, double T_macro,
                                        const AtomisticDynamicsOptions& options) {
  if (!(u0.lattice() == v0.lattice())) throw ConfigError("initial displacement and velocity lattices differ");
  if (!(eps > 0.0)) throw ConfigError("eps must be positive");
  const double omega = max_frequency(potential);
  double dt = options.dt;
  if (dt <= 0.0) {
    if (!(omega > 0.0)) throw ConfigError("cannot choose a default time step for a zero spectrum");
    dt = 0.2 / omega;
  }
  const Schedule plan = make_schedule(T_macro / eps, options.samples, dt);

  AtomisticTrajectory traj;
  traj.dt = plan.dt;
  if (omega > 0.0 && plan.dt > 2.0 / omega) {
    std::ostringstream os;
    os << "time step " << plan.dt << " exceeds the Verlet stability limit 2/omega_max = " << 2.0 / omega;
    traj.warnings.push_back(os.str());
  }
  DisplacementField u = u0;
  DisplacementField v = v0;
  auto accel = [&](double t) {
    try {
      return forces(potential, u);
    } catch (const DomainError& e) {
      throw DomainError(at_time(std::string(e.what()), eps * t));
    }
  };
  auto record = [&](double t) {
    traj.time.push_back(eps * t);
    traj.u.push_back(u);
    traj.v.push_back(v);
    traj.energy.push_back(total_energy(potential, u) + 0.5 * l2_dot(v, v));
  };
  DisplacementField a = accel(0.0);
  record(0.0);
  const double h = plan.dt;
  for (int s = 1; s < plan.samples; ++s) {
    for (long k = 0; k < plan.steps_per_sample; ++k) {
      v.axpy(0.5 * h, a);
      u.axpy(h, v);
      ++traj.steps;
      a = accel(static_cast<double>(traj.steps) * h);
      v.axpy(0.5 * h, a);
    }
    record(static_cast<double>(traj.steps) * h);
  }
  return traj;
}

AtomisticTrajectory integrate_atomistic(const Potential& potential, const InitialData& data, double eps,
                                        double T_macro, const AtomisticDynamicsOptions& options) {
  validate_initial_data(data, potential.kappa());
  return integrate_atomistic(potential, data.lattice_displacement(eps, potential.orientation()),
                             data.lattice_velocity(eps, potential.orientation()), eps, T_macro, options);
}

CBTrajectory solve_cb_wave(const CBModel& model, const InitialData& data, double T_macro,
                           const CBDynamicsOptions& options) {
  const int d = model.dim();
  const Potential& potential = model.potential();
  if (data.U0.dim() != d) throw ConfigError("initial data and model dimensions differ");
  validate_initial_data(data, potential.kappa());
  const int band = std::max(data.U0.bandwidth(), data.U1.bandwidth());
  if (3 * band >= options.grid_points) throw ConfigError("grid too coarse for the initial data bandwidth");

  SpectralGrid grid(d, options.grid_points);
  GridField U = grid.sample(data.U0);
  GridField V = grid.sample(data.U1);
  const auto grad0 = grid.gradient(U);
  for (const Mat& F : grad0)
    if (!(legendre_hadamard_min(model, F) > 0.0))
      throw StabilityError("Legendre-Hadamard condition fails at the initial strain");

  double dt = options.dt;
  if (dt <= 0.0) {
    const double c = max_wave_speed(model, grad0);
    if (!(c > 0.0)) throw ConfigError("cannot choose a default time step for zero wave speed");
    dt = 0.2 * grid.spacing() / c;
  }
  const Schedule plan = make_schedule(T_macro, options.samples, dt);

  const int cutoff = options.grid_points / 3;
  auto tail_fraction = [&](const GridField& f) {
    const double total = grid.l2_norm(f);
    if (total == 0.0) return 0.0;
    const GridField tail = grid.apply_mode_matrix(f, [&](const IVec& m) -> Mat {
      return (m.cwiseAbs().maxCoeff() > cutoff ? 1.0 : 0.0) * Mat::Identity(d, d);
    });
    return grid.l2_norm(tail) / total;
  };

  CBTrajectory traj{grid, {}, {}, {}, {}, plan.dt, 0, 0.0};
  double t = 0.0;
  auto accel = [&]() {
    const auto grad = grid.gradient(U);
    std::vector<Mat> stress(grad.size());
    for (std::size_t p = 0; p < grad.size(); ++p) {
      if (potential.stencil_norm(potential.homogeneous_stencil(grad[p])) > potential.kappa())
        throw DomainError(at_time("Cauchy-Born strain left the admissible set", t));
      traj.max_strain = std::max(traj.max_strain, grad[p].norm());
      stress[p] = model.stress(grad[p]);
    }
    return grid.divergence(stress);
  };
  auto check = [&]() {
    for (double x : U.values)
      if (!std::isfinite(x)) throw SolverError(at_time("Cauchy-Born solution blew up", t));
    if (tail_fraction(U) > options.tail_tolerance)
      throw SolverError(at_time("Cauchy-Born solution lost regularity (spectral tail growth)", t));
  };
  auto record = [&]() {
    traj.time.push_back(t);
    traj.U.push_back(U);
    traj.V.push_back(V);
    double w = 0.0;
    for (const Mat& F : grid.gradient(U)) w += model.energy(F);
    traj.energy.push_back(0.5 * grid.dot(V, V) + w / static_cast<double>(grid.size()));
  };

  GridField a = accel();
  record();
  const double h = plan.dt;
  for (int s = 1; s < plan.samples; ++s) {
    for (long k = 0; k < plan.steps_per_sample; ++k) {
      V.axpy(0.5 * h, a);
      U.axpy(h, V);
      ++traj.steps;
      t = static_cast<double>(traj.steps) * h;
      if (traj.steps % 8 == 0) check();
      a = accel();
      V.axpy(0.5 * h, a);
    }
    check();
    record();
  }
  return traj;
}

double velocity_error(const SpectralGrid& grid, const GridField& V, const DisplacementField& va, double eps,
                      int quad_points) {
  const int n = cells_for_scale(eps);
  const int d = grid.dim();
  if (va.lattice().cells() != n || va.dim() != d) throw ConfigError("lattice does not match eps");
  const auto& rule = gauss_legendre_unit(quad_points);
  const int q = static_cast<int>(rule.nodes.size());
  std::vector<double> axis, axis_w;
  for (int c = 0; c < n; ++c)
    for (int k = 0; k < q; ++k) {
      axis.push_back(eps * (c + rule.nodes[k]));
      axis_w.push_back(rule.weights[k]);
    }
  const std::vector<std::vector<double>> pts(d, axis);
  std::vector<std::vector<double>> vc(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) vc[static_cast<std::size_t>(i)] = grid.tensor_eval(V, i, pts);
  const DisplacementField w = smooth_nodal_interp(va);
  const std::size_t per_axis = axis.size();
  std::size_t total = 1;
  for (int a = 0; a < d; ++a) total *= per_axis;
  double sum = 0.0;
  Vec x(d);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rest = idx;
    double weight = 1.0;
    for (int a = d - 1; a >= 0; --a) {
      const std::size_t j = rest % per_axis;
      rest /= per_axis;
      x[a] = axis[j] / eps;
      weight *= axis_w[j];
    }
    const Vec va_x = quasi_interp(w, x);
    double e2 = 0.0;
    for (int i = 0; i < d; ++i) {
      const double diff = vc[static_cast<std::size_t>(i)][idx] - va_x[i];
      e2 += diff * diff;
    }
    sum += weight * e2;
  }
  return std::sqrt(std::pow(eps, d) * sum);
}

namespace {

std::vector<double> error_history(const CBTrajectory& cb, const AtomisticTrajectory& at, double eps,
                                  int quad_points) {
  if (cb.time.size() != at.time.size()) throw SolverError("trajectories have different sample counts");
  std::vector<double> err(cb.time.size());
  for (std::size_t j = 0; j < err.size(); ++j)
    err[j] = static_error(cb.grid, cb.U[j], at.u[j], eps, quad_points) +
             velocity_error(cb.grid, cb.V[j], at.v[j], eps, quad_points);
  return err;
}

}  // namespace

DynamicSweepResult dynamic_error_sweep(const Potential& potential, const InitialData& data,
                                       const DynamicSweepConfig& config) {
  if (config.eps.size() < 3) throw ConfigError("a convergence sweep needs at least three eps values");
  const CBModel model(potential);
  DynamicSweepResult out{solve_cb_wave(model, data, config.T_macro, config.cb), {}, {}, 0.0};
  std::optional<CBTrajectory> cb_half;
  if (config.control_run) {
    CBDynamicsOptions half = config.cb;
    half.dt = 0.5 * out.cb.dt;
    cb_half = solve_cb_wave(model, data, config.T_macro, half);
  }
  out.rows.resize(config.eps.size());
  detail::parallel_for(config.eps.size(), config.workers, [&](std::size_t i) {
    const double eps = config.eps[i];
    const auto at = integrate_atomistic(potential, data, eps, config.T_macro, config.atomistic);
    DynamicSweepRow row;
    row.eps = eps;
    row.error_history = error_history(out.cb, at, eps, config.quad_points);
    row.error = *std::max_element(row.error_history.begin(), row.error_history.end());
    row.energy_drift = at.energy_drift();
    row.steps = at.steps;
    if (cb_half) {
      AtomisticDynamicsOptions half = config.atomistic;
      half.dt = 0.5 * at.dt;
      const auto at_half = integrate_atomistic(potential, data, eps, config.T_macro, half);
      const auto hist = error_history(*cb_half, at_half, eps, config.quad_points);
      row.error_half_dt = *std::max_element(hist.begin(), hist.end());
      row.control_change = std::abs(row.error_half_dt - row.error) / row.error;
    }
    out.rows[i] = std::move(row);
  });
  std::vector<double> eps, err;
  for (const auto& r : out.rows) {
    eps.push_back(r.eps);
    err.push_back(r.error);
    out.max_control_change = std::max(out.max_control_change, r.control_change);
  }
  out.rate = fit_rate(eps, err, std::nullopt, config.band_lo, config.band_hi);
  return out;
}

GrowthReport instability_demo(double a1, double a2, double eps, const InstabilityOptions& options) {
  const int n = cells_for_scale(eps);
  if (options.probe == ProbeShape::alternating && n % 2 != 0)
    throw ConfigError("alternating probe needs an even number of sites");
  if (options.samples_per_unit < 1) throw ConfigError("samples_per_unit must be positive");
  const Potential chain = make_harmonic_chain(a1, a2, std::numeric_limits<double>::infinity());
  const LatticeSpec lat = LatticeSpec::cubic(1, n);
  DisplacementField u0(lat), v0(lat);
  for (int j = 0; j < n; ++j) {
    const double psi = options.probe == ProbeShape::alternating
                           ? (j % 2 == 0 ? 1.0 : -1.0) / std::sqrt(static_cast<double>(n))
                           : std::sqrt(2.0 / n) * std::cos(2.0 * std::numbers::pi * j / n);
    v0[static_cast<std::size_t>(j)][0] = eps * eps * psi;
  }

  GrowthReport rep;
  rep.eps = eps;
  rep.window_hi = 3.0 * std::abs(std::log(eps));
  rep.stable_bound = 2.0 * eps * eps;
  AtomisticDynamicsOptions opts;
  opts.dt = options.dt > 0.0 ? options.dt : std::min(0.2 / max_frequency(chain), 0.01);
  opts.samples = static_cast<int>(std::ceil(rep.window_hi * options.samples_per_unit)) + 1;
  const auto traj = integrate_atomistic(chain, u0, v0, eps, eps * rep.window_hi, opts);

  rep.min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < traj.time.size(); ++j) {
    const double t = traj.time[j] / eps;
    const double speed = l2_norm(traj.v[j]);
    rep.time.push_back(t);
    rep.speed.push_back(speed);
    rep.ratio.push_back(speed / (0.5 * eps * eps * std::exp(t)));
    rep.max_speed = std::max(rep.max_speed, speed);
    if (t >= rep.window_lo - 1e-12 && t <= rep.window_hi + 1e-12) rep.min_ratio = std::min(rep.min_ratio, rep.ratio.back());
  }

  const CBModel model(chain);
  CBDynamicsOptions cbo;
  cbo.grid_points = 16;
  const auto cb = solve_cb_wave(model, {TrigField::zero(1), TrigField::zero(1)}, eps * rep.window_hi, cbo);
  for (const auto& U : cb.U) rep.cb_max = std::max(rep.cb_max, cb.grid.max_abs(U));
  return rep;
}

}  // namespace latcb
