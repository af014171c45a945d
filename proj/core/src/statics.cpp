#include "latcb/statics.hpp"

#include "fft.hpp"
#include "latcb/interpolation.hpp"
#include "latcb/quadrature.hpp"
#include "latcb/stability.hpp"
#include "parallel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace latcb {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string history_text(const std::vector<double>& h) {
  std::ostringstream os;
  os << "residual history:";
  for (double v : h) os << ' ' << v;
  return os.str();
}

// Largest |F rho| / |rho| over the stencil, the admissibility measure of a
// homogeneous strain.
double strain_measure(const Potential& potential, const Mat& F) {
  return potential.stencil_norm(potential.homogeneous_stencil(F));
}

}  // namespace

MacroForce make_macro_force(const TrigField& shape, double delta) {
  if (!shape.zero_mean()) throw ConfigError("macroscopic force must have zero mean");
  if (!(delta >= 0.0)) throw ConfigError("force amplitude delta must be nonnegative");
  const double n = shape.dual_norm() + shape.grad_l2_norm();
  if (!(n > 0.0)) {
    if (delta == 0.0) return {shape, 0.0};
    throw ConfigError("force shape is zero");
  }
  return {shape.scaled(delta / n), delta};
}

ScaledForces make_forces(const MacroForce& force, double eps, const Mat& orientation) {
  const int n = cells_for_scale(eps);
  const int d = force.field.dim();
  const TrigField filtered = force.field.filtered([eps](const IVec& m) { return zeta_multiplier(m, eps); });
  ScaledForces out{eps, force.field, DisplacementField(LatticeSpec(d, orientation, n))};
  for (std::size_t i = 0; i < out.fa.site_count(); ++i) {
    const Vec xi = out.fa.lattice().multi_index(i).cast<double>();
    out.fa[i] = eps * filtered.value(eps * xi);
  }
  return out;
}

GridField cb_static_residual(const CBModel& model, const SpectralGrid& grid, const GridField& U, const GridField& F) {
  const auto grad = grid.gradient(U);
  std::vector<Mat> stress(grad.size());
  for (std::size_t p = 0; p < grad.size(); ++p) stress[p] = model.stress(grad[p]);
  GridField r = grid.divergence(stress);
  for (auto& v : r.values) v = -v;
  r.axpy(-1.0, F);
  return r;
}

CBStaticSolution solve_cb_static(const CBModel& model, const TrigField& force, const CBStaticOptions& options) {
  const int d = model.dim();
  if (force.dim() != d) throw ConfigError("force and model dimensions differ");
  if (2 * force.bandwidth() >= options.grid_points) throw ConfigError("grid too coarse for the force bandwidth");
  SpectralGrid grid(d, options.grid_points);
  const GridField F = grid.sample(force);
  GridField U = grid.zeros();

  const Mat zero = Mat::Zero(d, d);
  const Moduli c0 = model.moduli(zero);
  auto preconditioner = [&](const GridField& r) {
    return grid.apply_mode_matrix(r, [&](const IVec& m) -> Mat {
      const Vec k = kTwoPi * m.cast<double>();
      Mat a = Mat::Zero(d, d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
          for (int al = 0; al < d; ++al)
            for (int be = 0; be < d; ++be) a(i, j) += c0(i * d + al, j * d + be) * k[al] * k[be];
      Eigen::SelfAdjointEigenSolver<Mat> eig(a);
      if (!(eig.eigenvalues()[0] > 0.0)) throw StabilityError("Cauchy-Born moduli violate Legendre-Hadamard");
      return a.inverse();
    });
  };

  CBStaticSolution sol{grid, U, {}, 0.0, 0.0, 0};
  GridField R = cb_static_residual(model, grid, U, F);
  double rnorm = grid.l2_norm(R);
  sol.residual_history.push_back(rnorm);
  int step = 0;
  while (rnorm > options.tol) {
    if (step >= options.max_newton)
      throw SolverError("Cauchy-Born Newton did not converge; " + history_text(sol.residual_history));
    const auto grad = grid.gradient(U);
    std::vector<Moduli> moduli(grad.size());
    for (std::size_t p = 0; p < grad.size(); ++p) moduli[p] = model.moduli(grad[p]);
    auto jacobian = [&](const GridField& v) {
      const auto gv = grid.gradient(v);
      std::vector<Mat> s(gv.size());
      for (std::size_t p = 0; p < gv.size(); ++p) s[p] = contract(moduli[p], gv[p]);
      GridField out = grid.divergence(s);
      for (auto& x : out.values) x = -x;
      return out;
    };
    // PCG on J delta = -R with an Eisenstat-Walker style forcing term
    const double forcing = std::min(0.1, rnorm);
    GridField rhs = grid.remove_mean(R);
    for (auto& x : rhs.values) x = -x;
    GridField delta = grid.zeros();
    GridField res = rhs;
    GridField z = preconditioner(res);
    GridField p = z;
    double rz = grid.dot(res, z);
    const double target = std::max(forcing * grid.l2_norm(rhs), 1e-3 * options.tol);
    for (int it = 0; it < options.max_cg && grid.l2_norm(res) > target; ++it) {
      const GridField jp = jacobian(p);
      const double pjp = grid.dot(p, jp);
      if (!(pjp > 0.0)) throw StabilityError("Cauchy-Born Hessian is not positive definite");
      const double alpha = rz / pjp;
      delta.axpy(alpha, p);
      res.axpy(-alpha, jp);
      z = preconditioner(res);
      const double rz_new = grid.dot(res, z);
      const double beta = rz_new / rz;
      rz = rz_new;
      for (std::size_t i = 0; i < p.values.size(); ++i) p.values[i] = z.values[i] + beta * p.values[i];
    }
    // backtracking on the residual norm
    double step_len = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 30 && !accepted; ++ls, step_len *= 0.5) {
      GridField trial = U;
      trial.axpy(step_len, delta);
      try {
        GridField r_trial = cb_static_residual(model, grid, trial, F);
        const double n_trial = grid.l2_norm(r_trial);
        if (n_trial <= (1.0 - 1e-4 * step_len) * rnorm) {
          U = std::move(trial);
          R = std::move(r_trial);
          rnorm = n_trial;
          accepted = true;
        }
      } catch (const DomainError&) {
      }
    }
    if (!accepted) throw SolverError("Cauchy-Born line search failed; " + history_text(sol.residual_history));
    sol.residual_history.push_back(rnorm);
    ++step;
  }
  U = grid.remove_mean(U);
  sol.U = U;
  sol.newton_steps = step;
  sol.residual = grid.l2_norm(cb_static_residual(model, grid, U, F));
  for (const auto& g : grid.gradient(U)) {
    sol.max_strain = std::max(sol.max_strain, g.norm());
    if (strain_measure(model.potential(), g) > model.potential().kappa())
      throw StabilityError("Cauchy-Born solution leaves the admissible strain set");
  }
  return sol;
}

DisplacementField atomistic_static_residual(const Potential& potential, const DisplacementField& u,
                                            const DisplacementField& fa) {
  DisplacementField r = forces(potential, u);
  r *= -1.0;
  r -= fa;
  return r;
}

namespace {

// Applies the inverse of H(0) through the lattice Fourier transform.
class ReferencePreconditioner {
 public:
  ReferencePreconditioner(const Potential& potential, const LatticeSpec& lattice) : lattice_(lattice) {
    const DynamicalSymbol symbol(potential);
    const int d = lattice.dim();
    const int n = lattice.cells();
    inverse_.resize(lattice.site_count());
    usable_ = true;
    for (std::size_t i = 0; i < lattice.site_count(); ++i) {
      const IVec m = lattice.multi_index(i);
      if (m.isZero()) {
        inverse_[i] = CMat::Zero(d, d);
        continue;
      }
      Vec k(d);
      for (int a = 0; a < d; ++a) k[a] = -kTwoPi * detail::signed_frequency(m[a], n) / n;
      const CMat h = symbol(k);
      Eigen::SelfAdjointEigenSolver<CMat> eig(h);
      if (!(eig.eigenvalues()[0] > 0.0)) {
        usable_ = false;
        return;
      }
      inverse_[i] = h.inverse();
    }
  }

  DisplacementField apply(const DisplacementField& r) const {
    if (!usable_) {
      DisplacementField out = r;
      out.remove_mean();
      return out;
    }
    const int d = lattice_.dim();
    const int n = lattice_.cells();
    const std::size_t sites = lattice_.site_count();
    std::vector<std::vector<detail::Complex>> coeff(d);
    std::vector<double> comp(sites);
    for (int c = 0; c < d; ++c) {
      for (std::size_t i = 0; i < sites; ++i) comp[i] = r[i][c];
      coeff[c] = detail::forward_real(d, n, comp);
    }
    std::vector<std::vector<detail::Complex>> out(d, std::vector<detail::Complex>(sites));
    for (std::size_t i = 0; i < sites; ++i)
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) out[a][i] += inverse_[i](a, b) * coeff[b][i];
    DisplacementField z(lattice_);
    for (int c = 0; c < d; ++c) {
      const auto values = detail::inverse_real(d, n, out[c]);
      for (std::size_t i = 0; i < sites; ++i) z[i][c] = values[i];
    }
    return z;
  }

 private:
  LatticeSpec lattice_;
  std::vector<CMat> inverse_;
  bool usable_ = false;
};

double merit(const Potential& potential, const DisplacementField& u, const DisplacementField& fa) {
  return total_energy(potential, u) - l2_dot(fa, u);
}

double grad_sq(const DisplacementField& v) {
  const auto& lat = v.lattice();
  const int d = lat.dim();
  double s = 0.0;
  for (int a = 0; a < d; ++a) {
    IVec e = IVec::Zero(d);
    e[a] = 1;
    const Direction dir(e);
    for (std::size_t i = 0; i < lat.site_count(); ++i) s += finite_difference(v, lat.multi_index(i), dir).squaredNorm();
  }
  return s;
}

}  // namespace

double min_rayleigh_probe(const Potential& potential, const DisplacementField& u, int random_probes,
                          std::uint64_t seed) {
  const auto& lat = u.lattice();
  const int d = lat.dim();
  std::vector<DisplacementField> probes;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (int p = 0; p < random_probes; ++p) {
    DisplacementField v(lat);
    for (double& x : v.values()) x = normal(rng);
    v.remove_mean();
    probes.push_back(std::move(v));
  }
  // zone-boundary patterns: alternating along each axis and the full checkerboard
  if (lat.cells() % 2 == 0) {
    for (int axis = -1; axis < d; ++axis)
      for (int c = 0; c < d; ++c) {
        DisplacementField v(lat);
        for (std::size_t i = 0; i < lat.site_count(); ++i) {
          const IVec s = lat.multi_index(i);
          const int parity = axis < 0 ? s.sum() : s[axis];
          v[i][c] = parity % 2 == 0 ? 1.0 : -1.0;
        }
        probes.push_back(std::move(v));
      }
  }
  double best = std::numeric_limits<double>::infinity();
  for (const auto& v : probes) {
    const double g = grad_sq(v);
    if (!(g > 0.0)) continue;
    best = std::min(best, l2_dot(hessian_apply(potential, u, v), v) / g);
  }
  return best;
}

AtomisticStaticSolution solve_atomistic_static(const Potential& potential, const DisplacementField& fa,
                                               const DisplacementField& u_init,
                                               const AtomisticStaticOptions& options) {
  if (!(fa.lattice() == u_init.lattice())) throw ConfigError("force and initial guess live on different lattices");
  {
    const Vec mean = fa.mean();
    double scale = 0.0;
    for (double x : fa.values()) scale = std::max(scale, std::abs(x));
    if (mean.norm() > 1e-12 * std::max(scale, 1e-300) && mean.norm() > 1e-300)
      throw ConfigError("atomistic forces must have zero mean");
  }
  const ReferencePreconditioner precond(potential, fa.lattice());
  const double slack = 1e-13 * static_cast<double>(fa.site_count());

  AtomisticStaticSolution sol{u_init, {}, {}, 0.0, 0.0, 0};
  sol.u.remove_mean();
  DisplacementField r = atomistic_static_residual(potential, sol.u, fa);
  double rnorm = l2_norm(r);
  double energy = merit(potential, sol.u, fa);
  sol.residual_history.push_back(rnorm);
  sol.energy_history.push_back(energy);
  int step = 0;
  while (rnorm > options.tol) {
    if (step >= options.max_newton)
      throw SolverError("atomistic Newton did not converge; " + history_text(sol.residual_history));
    // PCG on H(u) delta = -r
    DisplacementField rhs = r;
    rhs *= -1.0;
    rhs.remove_mean();
    DisplacementField delta(fa.lattice());
    DisplacementField res = rhs;
    DisplacementField z = precond.apply(res);
    DisplacementField p = z;
    double rz = l2_dot(res, z);
    const double target = std::max(std::min(0.1, rnorm) * l2_norm(rhs), 1e-3 * options.tol);
    for (int it = 0; it < options.max_cg && l2_norm(res) > target; ++it) {
      const DisplacementField hp = hessian_apply(potential, sol.u, p);
      const double php = l2_dot(p, hp);
      if (!(php > 0.0)) {
        if (it == 0) delta = z;  // preconditioned steepest descent
        break;
      }
      const double alpha = rz / php;
      delta.axpy(alpha, p);
      res.axpy(-alpha, hp);
      z = precond.apply(res);
      const double rz_new = l2_dot(res, z);
      const double beta = rz_new / rz;
      rz = rz_new;
      p *= beta;
      p += z;
    }
    delta.remove_mean();
    const double slope = l2_dot(r, delta);
    if (!(slope < 0.0)) throw SolverError("Newton direction is not a descent direction");

    double step_len = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 40 && !accepted; ++ls, step_len *= 0.5) {
      DisplacementField trial = sol.u;
      trial.axpy(step_len, delta);
      try {
        const double e_trial = merit(potential, trial, fa);
        const bool armijo = e_trial <= energy + 1e-4 * step_len * slope;
        DisplacementField r_trial = atomistic_static_residual(potential, trial, fa);
        const double n_trial = l2_norm(r_trial);
        // near convergence energy differences drop below round-off; accept
        // residual-reducing steps that do not raise the energy beyond it
        const bool flat = e_trial <= energy + slack && n_trial < rnorm;
        if (armijo || flat) {
          sol.u = std::move(trial);
          r = std::move(r_trial);
          rnorm = n_trial;
          energy = e_trial;
          accepted = true;
        }
      } catch (const DomainError&) {
      }
    }
    if (!accepted) throw SolverError("atomistic line search failed; " + history_text(sol.residual_history));
    sol.residual_history.push_back(rnorm);
    sol.energy_history.push_back(energy);
    ++step;
  }
  sol.u.remove_mean();
  sol.newton_steps = step;
  sol.residual = l2_norm(atomistic_static_residual(potential, sol.u, fa));
  sol.min_rayleigh = min_rayleigh_probe(potential, sol.u, options.random_probes, options.seed);
  if (!(sol.min_rayleigh > 0.0)) throw StabilityError("atomistic equilibrium failed the stability probe");
  return sol;
}

DisplacementField quasi_interpolated_cb(const CBStaticSolution& cb, double eps, const Mat& orientation) {
  const int n = cells_for_scale(eps);
  const auto& grid = cb.grid;
  const int d = grid.dim();
  const GridField smoothed = grid.apply_mode_matrix(
      cb.U, [&](const IVec& m) -> Mat { return zeta_multiplier(m, eps) * Mat::Identity(d, d); });
  std::vector<double> axis(n);
  for (int j = 0; j < n; ++j) axis[j] = eps * j;
  const std::vector<std::vector<double>> pts(d, axis);
  DisplacementField u(LatticeSpec(d, orientation, n));
  for (int c = 0; c < d; ++c) {
    const auto values = grid.tensor_eval(smoothed, c, pts);
    for (std::size_t i = 0; i < u.site_count(); ++i) u[i][c] = values[i] / eps;
  }
  u.remove_mean();
  return u;
}

double static_error(const SpectralGrid& grid, const GridField& U, const DisplacementField& ua, double eps,
                    int quad_points) {
  const int n = cells_for_scale(eps);
  const int d = grid.dim();
  if (ua.lattice().cells() != n || ua.dim() != d) throw ConfigError("lattice does not match eps");
  const auto& rule = gauss_legendre_unit(quad_points);
  const int q = static_cast<int>(rule.nodes.size());
  std::vector<double> axis;
  std::vector<double> axis_w;
  for (int c = 0; c < n; ++c)
    for (int k = 0; k < q; ++k) {
      axis.push_back(eps * (c + rule.nodes[k]));
      axis_w.push_back(rule.weights[k]);
    }
  const std::vector<std::vector<double>> pts(d, axis);
  // grad U^c at every quadrature point, per (component, direction)
  std::vector<std::vector<double>> grad_c(static_cast<std::size_t>(d * d));
  for (int i = 0; i < d; ++i)
    for (int a = 0; a < d; ++a) {
      std::array<int, 3> order{0, 0, 0};
      order[a] = 1;
      grad_c[static_cast<std::size_t>(i * d + a)] = grid.tensor_eval(U, i, pts, order);
    }
  const DisplacementField w = smooth_nodal_interp(ua);
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
    const Mat ga = quasi_grad(w, x);
    double e2 = 0.0;
    for (int i = 0; i < d; ++i)
      for (int a = 0; a < d; ++a) {
        const double diff = grad_c[static_cast<std::size_t>(i * d + a)][idx] - ga(i, a);
        e2 += diff * diff;
      }
    sum += weight * e2;
  }
  return std::sqrt(std::pow(eps, d) * sum);
}

StaticSweepResult static_converge_sweep(const Potential& potential, const MacroForce& force,
                                        const StaticSweepConfig& config) {
  if (config.eps.size() < 3) throw ConfigError("a convergence sweep needs at least three eps values");
  const CBModel model(potential);
  StaticSweepResult out{solve_cb_static(model, force.field, config.cb), {}, {}};
  out.rows.resize(config.eps.size());
  detail::parallel_for(config.eps.size(), config.workers, [&](std::size_t i) {
    const double eps = config.eps[i];
    const ScaledForces f = make_forces(force, eps, potential.orientation());
    const DisplacementField init = quasi_interpolated_cb(out.cb, eps, potential.orientation());
    AtomisticStaticOptions opts = config.atomistic;
    opts.seed = config.atomistic.seed + i;
    const auto sol = solve_atomistic_static(potential, f.fa, init, opts);
    StaticSweepRow row;
    row.eps = eps;
    row.error = static_error(out.cb.grid, out.cb.U, sol.u, eps, config.quad_points);
    row.residual_a = sol.residual;
    row.newton_steps = sol.newton_steps;
    row.min_rayleigh = sol.min_rayleigh;
    out.rows[i] = row;
  });
  std::vector<double> eps, err;
  for (const auto& r : out.rows) {
    eps.push_back(r.eps);
    err.push_back(r.error);
  }
  out.rate = fit_rate(eps, err, config.atomistic.tol, config.band_lo, config.band_hi);
  return out;
}

}  // namespace latcb
