#include "latcb/interpolation.hpp"

#include "fft.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace latcb {

namespace {

double hat(double s) { return std::max(0.0, 1.0 - std::abs(s)); }

// Visits every site of the box lo..hi (inclusive) as an unwrapped multi-index.
template <class F>
void for_each_site(const IVec& lo, const IVec& hi, F&& f) {
  const int d = static_cast<int>(lo.size());
  for (int a = 0; a < d; ++a)
    if (hi[a] < lo[a]) return;
  IVec site = lo;
  while (true) {
    f(site);
    int a = d - 1;
    while (a >= 0 && site[a] == hi[a]) {
      site[a] = lo[a];
      --a;
    }
    if (a < 0) return;
    ++site[a];
  }
}

}  // namespace

double zeta_eval(const Vec& x) {
  double v = 1.0;
  for (int a = 0; a < x.size(); ++a) v *= hat(x[a]);
  return v;
}

double bspline3(double s) {
  const double a = std::abs(s);
  if (a < 1.0) return 2.0 / 3.0 - a * a + 0.5 * a * a * a;
  if (a < 2.0) return (2.0 - a) * (2.0 - a) * (2.0 - a) / 6.0;
  return 0.0;
}

double bspline3_d1(double s) {
  const double a = std::abs(s);
  const double sign = s < 0.0 ? -1.0 : 1.0;
  if (a < 1.0) return sign * (-2.0 * a + 1.5 * a * a);
  if (a < 2.0) return sign * (-0.5 * (2.0 - a) * (2.0 - a));
  return 0.0;
}

double bspline3_d2(double s) {
  const double a = std::abs(s);
  if (a < 1.0) return -2.0 + 3.0 * a;
  if (a < 2.0) return 2.0 - a;
  return 0.0;
}

Vec nodal_interp(const DisplacementField& u, const Vec& x) {
  const int d = u.dim();
  const auto& lat = u.lattice();
  Vec v = Vec::Zero(d);
  IVec corner(d);
  Vec s(d);
  for (int a = 0; a < d; ++a) {
    corner[a] = static_cast<int>(std::floor(x[a]));
    s[a] = x[a] - corner[a];
  }
  IVec site(d);
  for (int b = 0; b < (1 << d); ++b) {
    double w = 1.0;
    for (int a = 0; a < d; ++a) {
      const int bit = (b >> a) & 1;
      site[a] = corner[a] + bit;
      w *= bit ? s[a] : 1.0 - s[a];
    }
    v += w * u[lat.index(site)];
  }
  if (u.has_background()) v += u.background_strain() * x;
  return v;
}

Mat nodal_grad(const DisplacementField& u, const Vec& x) {
  const int d = u.dim();
  const auto& lat = u.lattice();
  Mat g = Mat::Zero(d, d);
  IVec corner(d);
  Vec s(d);
  for (int a = 0; a < d; ++a) {
    corner[a] = static_cast<int>(std::floor(x[a]));
    s[a] = x[a] - corner[a];
  }
  IVec site(d);
  for (int b = 0; b < (1 << d); ++b) {
    for (int a = 0; a < d; ++a) site[a] = corner[a] + ((b >> a) & 1);
    const auto value = u[lat.index(site)];
    for (int alpha = 0; alpha < d; ++alpha) {
      double w = ((b >> alpha) & 1) ? 1.0 : -1.0;
      for (int beta = 0; beta < d; ++beta)
        if (beta != alpha) w *= ((b >> beta) & 1) ? s[beta] : 1.0 - s[beta];
      g.col(alpha) += w * value;
    }
  }
  if (u.has_background()) g += u.background_strain();
  return g;
}

namespace {

// Sum over the 4^d sites near x of u(xi) * prod_a B_a(x_a - xi_a) where B_a
// is the spline or one of its derivatives, chosen per axis by `order`.
Vec spline_sum(const DisplacementField& u, const Vec& x, const std::array<int, 3>& order) {
  const int d = u.dim();
  const auto& lat = u.lattice();
  IVec lo(d), hi(d);
  for (int a = 0; a < d; ++a) {
    lo[a] = static_cast<int>(std::floor(x[a])) - 1;
    hi[a] = lo[a] + 3;
  }
  Vec v = Vec::Zero(d);
  for_each_site(lo, hi, [&](const IVec& site) {
    double w = 1.0;
    for (int a = 0; a < d; ++a) {
      const double s = x[a] - site[a];
      w *= order[a] == 0 ? bspline3(s) : order[a] == 1 ? bspline3_d1(s) : bspline3_d2(s);
    }
    if (w != 0.0) v += w * u[lat.index(site)];
  });
  return v;
}

}  // namespace

Vec quasi_interp(const DisplacementField& u, const Vec& x) {
  Vec v = spline_sum(u, x, {0, 0, 0});
  if (u.has_background()) v += u.background_strain() * x;
  return v;
}

Mat quasi_grad(const DisplacementField& u, const Vec& x) {
  const int d = u.dim();
  Mat g(d, d);
  for (int a = 0; a < d; ++a) {
    std::array<int, 3> order{0, 0, 0};
    order[a] = 1;
    g.col(a) = spline_sum(u, x, order);
  }
  if (u.has_background()) g += u.background_strain();
  return g;
}

std::vector<Mat> quasi_hessian(const DisplacementField& u, const Vec& x) {
  const int d = u.dim();
  std::vector<Mat> h(d, Mat::Zero(d, d));
  for (int a = 0; a < d; ++a)
    for (int b = a; b < d; ++b) {
      std::array<int, 3> order{0, 0, 0};
      ++order[a];
      ++order[b];
      const Vec v = spline_sum(u, x, order);
      for (int i = 0; i < d; ++i) h[i](a, b) = h[i](b, a) = v[i];
    }
  return h;
}

double chi_eval(const IVec& xi, const IVec& rho, const Vec& x) {
  const int d = static_cast<int>(xi.size());
  Vec y0(d);
  double constant = 1.0;
  std::array<double, 11> breaks{};
  int nb = 0;
  breaks[nb++] = 0.0;
  breaks[nb++] = 1.0;
  for (int a = 0; a < d; ++a) {
    y0[a] = xi[a] - x[a];
    if (rho[a] == 0) {
      constant *= hat(y0[a]);
      continue;
    }
    for (int c = -1; c <= 1; ++c) {
      const double t = (c - y0[a]) / rho[a];
      if (t > 0.0 && t < 1.0) breaks[nb++] = t;
    }
  }
  if (constant == 0.0) return 0.0;
  std::sort(breaks.begin(), breaks.begin() + nb);
  // two Gauss points integrate the (degree <= 3) pieces exactly
  const double g = 0.5 / std::sqrt(3.0);
  double total = 0.0;
  for (int k = 0; k + 1 < nb; ++k) {
    const double t0 = breaks[k], t1 = breaks[k + 1];
    const double len = t1 - t0;
    if (len <= 0.0) continue;
    const double mid = 0.5 * (t0 + t1);
    for (double t : {mid - g * len, mid + g * len}) {
      double v = 1.0;
      for (int a = 0; a < d; ++a)
        if (rho[a] != 0) v *= hat(y0[a] + t * rho[a]);
      total += 0.5 * len * v;
    }
  }
  return constant * total;
}

double chi_rho_derivative(const IVec& xi, const IVec& rho, const Vec& x) {
  const int d = static_cast<int>(xi.size());
  double a = 1.0, b = 1.0;
  for (int k = 0; k < d; ++k) {
    a *= hat(xi[k] - x[k]);
    b *= hat(xi[k] + rho[k] - x[k]);
  }
  return a - b;
}

SiteWindow chi_support_window(const IVec& rho, const Vec& x) {
  const int d = static_cast<int>(rho.size());
  SiteWindow w{IVec(d), IVec(d)};
  for (int a = 0; a < d; ++a) {
    const double lo = x[a] - 1.0 - std::max(rho[a], 0);
    const double hi = x[a] + 1.0 - std::min(rho[a], 0);
    w.lo[a] = static_cast<int>(std::floor(lo)) + 1;
    w.hi[a] = static_cast<int>(std::ceil(hi)) - 1;
  }
  return w;
}

DisplacementField smooth_nodal_interp(const DisplacementField& u) {
  const auto& lat = u.lattice();
  const int d = lat.dim();
  const int n = lat.cells();
  const std::size_t sites = lat.site_count();
  std::vector<double> symbol(sites);
  for (std::size_t i = 0; i < sites; ++i) {
    const IVec m = lat.multi_index(i);
    double s = 1.0;
    for (int a = 0; a < d; ++a) s *= 2.0 / 3.0 + std::cos(2.0 * M_PI * m[a] / n) / 3.0;
    if (!(std::abs(s) > 1e-14)) throw Error("B-spline deconvolution symbol is singular");
    symbol[i] = s;
  }
  DisplacementField w(lat);
  w.set_background_strain(u.background_strain());
  std::vector<double> component(sites);
  for (int c = 0; c < d; ++c) {
    for (std::size_t i = 0; i < sites; ++i) component[i] = u[i][c];
    auto coeff = detail::forward_real(d, n, component);
    for (std::size_t i = 0; i < sites; ++i) coeff[i] /= symbol[i];
    const auto values = detail::inverse_real(d, n, coeff);
    for (std::size_t i = 0; i < sites; ++i) w[i][c] = values[i];
  }
  return w;
}

}  // namespace latcb
