#include "latcb/stability.hpp"

#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace latcb {

namespace {

using Complex = std::complex<double>;
constexpr double kPi = std::numbers::pi;
constexpr double kMinWave = 1e-7;

// e^{i theta} - 1 without cancellation for small theta
Complex phase_minus_one(double theta) {
  const double s = std::sin(0.5 * theta);
  return {-2.0 * s * s, std::sin(theta)};
}

double wrap_zone(double k) {
  double w = std::fmod(k + kPi, 2.0 * kPi);
  if (w < 0.0) w += 2.0 * kPi;
  return w - kPi;
}

Vec clamp_wave(Vec k) {
  for (int a = 0; a < k.size(); ++a) k[a] = wrap_zone(k[a]);
  const double n = k.norm();
  if (n < kMinWave) {
    if (n == 0.0) {
      k.setZero();
      k[0] = kMinWave;
    } else {
      k *= kMinWave / n;
    }
  }
  return k;
}

// Golden-section minimiser of a unimodal-near-the-bracket function.
template <class F>
std::pair<double, double> golden_min(F&& f, double lo, double hi) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 80; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = f(x2);
    }
  }
  return f1 < f2 ? std::make_pair(x1, f1) : std::make_pair(x2, f2);
}

}  // namespace

DynamicalSymbol::DynamicalSymbol(const Potential& potential) : dim_(potential.dim()) {
  const auto& set = potential.stencil();
  const StencilValues zero(dim_, set.size());
  for (const auto& rho : set.directions()) directions_.push_back(rho.vec());
  for (int r = 0; r < set.size(); ++r)
    for (int s = 0; s < set.size(); ++s) {
      Mat v = potential.site_hessian(zero, r, s);
      if (!v.isZero(0.0)) blocks_.push_back({r, s, std::move(v)});
    }
}

CMat DynamicalSymbol::operator()(const Vec& k) const {
  std::vector<Complex> z(directions_.size());
  for (std::size_t r = 0; r < directions_.size(); ++r) z[r] = phase_minus_one(k.dot(directions_[r].cast<double>()));
  CMat h = CMat::Zero(dim_, dim_);
  for (const auto& b : blocks_) h += (z[b.r] * std::conj(z[b.s])) * b.value.cast<Complex>();
  // symmetrise away round-off so the Hermitian solver sees an exact Hermitian matrix
  return 0.5 * (h + h.adjoint());
}

Vec DynamicalSymbol::eigenvalues(const Vec& k) const {
  const CMat h = (*this)(k);
  if (dim_ == 1) return Vec::Constant(1, h(0, 0).real());
  Eigen::SelfAdjointEigenSolver<CMat> eig(h, Eigen::EigenvaluesOnly);
  return eig.eigenvalues();
}

double DynamicalSymbol::ratio(const Vec& k) const { return eigenvalues(k)[0] / gradient_normalizer(k); }

CMat dynamical_symbol(const Potential& potential, const Vec& k) { return DynamicalSymbol(potential)(k); }

double gradient_normalizer(const Vec& k) {
  double g = 0.0;
  for (int a = 0; a < k.size(); ++a) {
    const double s = std::sin(0.5 * k[a]);
    g += 4.0 * s * s;
  }
  return g;
}

std::vector<Vec> brillouin_grid(int dim, int points_per_axis) {
  if (points_per_axis < 1) throw ConfigError("Brillouin grid needs at least one point per axis");
  const double offset = 0.5 * (std::sqrt(5.0) - 1.0);
  std::size_t total = 1;
  for (int a = 0; a < dim; ++a) total *= static_cast<std::size_t>(points_per_axis);
  std::vector<Vec> ks;
  ks.reserve(total);
  for (std::size_t i = 0; i < total; ++i) {
    Vec k(dim);
    std::size_t rest = i;
    for (int a = dim - 1; a >= 0; --a) {
      const auto j = static_cast<double>(rest % static_cast<std::size_t>(points_per_axis));
      rest /= static_cast<std::size_t>(points_per_axis);
      k[a] = -kPi + 2.0 * kPi * (j + offset) / points_per_axis;
    }
    ks.push_back(k);
  }
  return ks;
}

DispersionSpectrum dispersion(const Potential& potential, int points_per_axis, int workers) {
  const DynamicalSymbol symbol(potential);
  DispersionSpectrum out;
  out.k = brillouin_grid(potential.dim(), points_per_axis);
  const std::size_t n = out.k.size();
  out.eigenvalues.resize(n);
  out.normalizer.resize(n);
  out.ratio.resize(n);
  detail::parallel_for(n, workers, [&](std::size_t i) {
    const Vec k = clamp_wave(out.k[i]);
    out.eigenvalues[i] = symbol.eigenvalues(k);
    out.normalizer[i] = gradient_normalizer(k);
    out.ratio[i] = out.eigenvalues[i][0] / out.normalizer[i];
  });
  return out;
}

StabilityEstimate stability_constant(const Potential& potential, int points_per_axis, int workers) {
  const DynamicalSymbol symbol(potential);
  const auto grid = brillouin_grid(potential.dim(), points_per_axis);
  if (grid.empty()) throw ConfigError("empty Brillouin grid");
  std::vector<double> ratio(grid.size());
  detail::parallel_for(grid.size(), workers, [&](std::size_t i) { ratio[i] = symbol.ratio(clamp_wave(grid[i])); });

  std::vector<std::size_t> order(grid.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t seeds = std::min<std::size_t>(4, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(seeds), order.end(),
                    [&](std::size_t a, std::size_t b) { return ratio[a] < ratio[b] || (ratio[a] == ratio[b] && a < b); });

  StabilityEstimate best;
  best.gamma = std::numeric_limits<double>::infinity();
  const int d = potential.dim();
  for (std::size_t s = 0; s < seeds; ++s) {
    Vec k = clamp_wave(grid[order[s]]);
    double value = ratio[order[s]];
    double h = 2.0 * kPi / points_per_axis;
    while (h > 1e-10) {
      bool moved = false;
      for (int a = 0; a < d && !moved; ++a)
        for (double sign : {-1.0, 1.0}) {
          Vec trial = k;
          trial[a] += sign * h;
          trial = clamp_wave(trial);
          const double v = symbol.ratio(trial);
          if (v < value) {
            value = v;
            k = trial;
            moved = true;
            break;
          }
        }
      if (!moved) h *= 0.5;
    }
    if (value < best.gamma) {
      best.gamma = value;
      best.k_min = k;
    }
  }
  return best;
}

double legendre_hadamard_min(const CBModel& model, const Mat& F) {
  const int d = model.dim();
  const Moduli c = model.moduli(F);
  if (d == 1) return c(0, 0);
  auto lowest = [&](const Vec& b) {
    Mat a = Mat::Zero(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int al = 0; al < d; ++al)
          for (int be = 0; be < d; ++be) a(i, j) += c(i * d + al, j * d + be) * b[al] * b[be];
    Eigen::SelfAdjointEigenSolver<Mat> eig(a, Eigen::EigenvaluesOnly);
    return eig.eigenvalues()[0];
  };
  if (d == 2) {
    auto f = [&](double t) {
      Vec b(2);
      b << std::cos(t), std::sin(t);
      return lowest(b);
    };
    const int samples = 360;
    double best = std::numeric_limits<double>::infinity();
    int best_i = 0;
    for (int i = 0; i < samples; ++i) {
      const double v = f(kPi * i / samples);
      if (v < best) {
        best = v;
        best_i = i;
      }
    }
    const double h = kPi / samples;
    return std::min(best, golden_min(f, kPi * best_i / samples - h, kPi * best_i / samples + h).second);
  }
  auto f = [&](double theta, double phi) {
    Vec b(3);
    b << std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta);
    return lowest(b);
  };
  double best = std::numeric_limits<double>::infinity();
  double bt = 0.0, bp = 0.0;
  const int nt = 90, np = 180;
  for (int i = 0; i <= nt; ++i)
    for (int j = 0; j < np; ++j) {
      const double t = kPi * i / nt, p = 2.0 * kPi * j / np;
      const double v = f(t, p);
      if (v < best) {
        best = v;
        bt = t;
        bp = p;
      }
    }
  double h = kPi / nt;
  while (h > 1e-10) {
    bool moved = false;
    for (auto [dt, dp] : {std::pair{h, 0.0}, {-h, 0.0}, {0.0, h}, {0.0, -h}}) {
      const double v = f(bt + dt, bp + dp);
      if (v < best) {
        best = v;
        bt += dt;
        bp += dp;
        moved = true;
        break;
      }
    }
    if (!moved) h *= 0.5;
  }
  return best;
}

EigenProbe instability_eigenprobe(const Potential& chain, int cells) {
  if (!std::holds_alternative<HarmonicChainPayload>(chain.payload()))
    throw ConfigError("eigen probe requires the harmonic chain potential");
  if (cells % 2 != 0) throw ConfigError("alternating strain needs an even number of sites");
  const LatticeSpec lat = LatticeSpec::cubic(1, cells);
  DisplacementField zero(lat), v(lat);
  for (std::size_t i = 0; i < lat.site_count(); ++i) v[i][0] = (i % 2 == 0 ? -0.5 : 0.5);
  const DisplacementField hv = hessian_apply(chain, zero, v);
  const double quad = l2_dot(hv, v);
  const double vv = l2_dot(v, v);
  double grad2 = 0.0;
  const Direction e1(IVec::Constant(1, 1));
  for (std::size_t i = 0; i < lat.site_count(); ++i)
    grad2 += finite_difference(v, lat.multi_index(i), e1).squaredNorm();
  EigenProbe out;
  out.rayleigh_quotient = quad / grad2;
  out.l2_eigenvalue = quad / vv;
  DisplacementField r = hv;
  r.axpy(-out.l2_eigenvalue, v);
  out.eigen_residual = l2_norm(r) / std::sqrt(vv);
  return out;
}

}  // namespace latcb
