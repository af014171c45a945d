#include "latcb/decay.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace latcb {

namespace {

constexpr int kOrder = 5;
using Series = std::array<double, kOrder + 1>;

Series multiply(const Series& a, const Series& b) {
  Series c{};
  for (int i = 0; i <= kOrder; ++i)
    for (int j = 0; i + j <= kOrder; ++j) c[i + j] += a[i] * b[j];
  return c;
}

// Taylor coefficients of t -> f(|x + t h|) at t = 0, |x| = r, x.h = r c.
Series radial_series(const Derivs& f, double r, double c) {
  // s(t) = sqrt(r^2 + 2 r c t + t^2), via y^2 = q
  Series q{};
  q[0] = r * r;
  q[1] = 2.0 * r * c;
  q[2] = 1.0;
  Series y{};
  y[0] = r;
  for (int n = 1; n <= kOrder; ++n) {
    double acc = q[n];
    for (int k = 1; k < n; ++k) acc -= y[k] * y[n - k];
    y[n] = acc / (2.0 * y[0]);
  }
  Series delta = y;
  delta[0] = 0.0;
  Series out{};
  Series power{};
  power[0] = 1.0;
  double factorial = 1.0;
  for (int i = 0; i <= kOrder; ++i) {
    if (i > 0) {
      power = multiply(power, delta);
      factorial *= i;
    }
    for (int n = 0; n <= kOrder; ++n) out[n] += f[i] / factorial * power[n];
  }
  return out;
}

double sphere_measure(int d) {
  switch (d) {
    case 1: return 2.0;
    case 2: return 2.0 * std::numbers::pi;
    default: return 4.0 * std::numbers::pi;
  }
}

// Accumulates sum_rho f(rho) over |rho| <= R and bounds the tail through
// f(rho) <= C |rho|^-s with C fitted on the outer half shell.
class LatticeSeries {
 public:
  LatticeSeries(int dim, double r_max) : dim_(dim), r_max_(r_max) {}

  void add(double norm, double value) {
    sum_ += value;
    if (norm > 0.5 * r_max_) samples_.emplace_back(norm, value);
  }

  double partial() const { return sum_; }

  double tail(double s) const {
    if (!(s > dim_)) return std::numeric_limits<double>::infinity();
    double c_fit = 0.0;
    for (auto [n, v] : samples_) c_fit = std::max(c_fit, std::abs(v) * std::pow(n, s));
    if (c_fit == 0.0) return 0.0;
    const double half_diag = 0.5 * std::sqrt(static_cast<double>(dim_));
    const double inner = r_max_ - half_diag;
    if (!(inner > 0.0)) return std::numeric_limits<double>::infinity();
    const double shrink = 1.0 / (1.0 + half_diag / r_max_);
    return c_fit * std::pow(shrink, -s) * sphere_measure(dim_) * std::pow(inner, dim_ - s) / (s - dim_);
  }

 private:
  int dim_;
  double r_max_;
  double sum_ = 0.0;
  std::vector<std::pair<double, double>> samples_;
};

template <class F>
double sup_on_interval(F&& f, double a, double b) {
  return max_abs_on_interval(std::forward<F>(f), a, b, 32);
}

struct Interval {
  double lo;
  double hi;
};

Interval bond_interval(const Mat& orientation, const Direction& rho, double kappa) {
  const double len = (orientation * rho.real()).norm();
  const double lo = len - kappa * rho.norm();
  if (!(lo > 0.0)) throw ConfigError("kappa too large: admissible bonds may collapse");
  return {lo, len + kappa * rho.norm()};
}

DecayConstant finish(const std::string& name, double partial, double tail, double s, bool with_tail, int d) {
  DecayConstant c;
  c.name = name;
  c.partial = partial;
  c.exponent = s;
  c.finite = s > d;
  if (with_tail) c.tail = tail;
  return c;
}

DecayReport pair_report(const RadialFunction& phi, const Potential& potential, double kappa, double r_max,
                        std::optional<double> alpha, bool with_tail) {
  const int d = potential.dim();
  const double a = alpha.value_or(std::numeric_limits<double>::infinity());
  const StencilSet all(d, r_max);
  DecayReport report;

  std::array<std::vector<double>, 5> m;  // m_j(rho), j = 1..4
  for (const auto& rho : all.directions()) {
    const auto [lo, hi] = bond_interval(potential.orientation(), rho, kappa);
    for (int j = 1; j <= 4; ++j) {
      const double sup = sup_on_interval([&](double r) { return radial_derivative_norm(phi, r, j, d); }, lo, hi);
      m[j].push_back(std::pow(rho.norm(), j) * 0.5 * sup);
    }
    report.table.push_back({rho.vec(), m[1].back()});
  }

  for (int j = 1; j <= 4; ++j) {
    LatticeSeries s(d, r_max);
    for (std::size_t i = 0; i < all.directions().size(); ++i) s.add(all[static_cast<int>(i)].norm(), m[j][i]);
    report.constants.push_back(finish("M" + std::to_string(j), s.partial(), s.tail(a), a, with_tail, d));
  }
  const double shifted = a - 2.0;
  for (int j = 2; j <= 4; ++j) {
    const double root = 1.0 / (2.0 * (j - 1));
    LatticeSeries ms(d, r_max), md(d, r_max);
    for (std::size_t i = 0; i < all.directions().size(); ++i) {
      const double n = all[static_cast<int>(i)].norm();
      const double spread = std::pow(2.0 * (j - 1) * n, root);
      ms.add(n, m[j][i] * std::pow(j * n, 2) * spread);
      md.add(n, m[j][i] * std::pow(j * n, 3) / n * spread);
    }
    const double s = shifted - root;
    if (j <= 3)
      report.constants.push_back(finish("Ms" + std::to_string(j) + "_2", ms.partial(), ms.tail(s), s, with_tail, d));
    report.constants.push_back(finish("Md" + std::to_string(j) + "_2", md.partial(), md.tail(s), s, with_tail, d));
  }
  return report;
}

DecayReport eam_report(const EamPayload& eam, const Potential& potential, double kappa, double r_max,
                       std::optional<double> beta, bool with_tail) {
  const int d = potential.dim();
  const double b = beta.value_or(std::numeric_limits<double>::infinity());
  const StencilSet all(d, r_max);
  DecayReport report;

  struct Sups {
    double norm, phi1, phi2, psi1, psi2;
  };
  std::vector<Sups> sups;
  double density_lo = 0.0, density_hi = 0.0;
  for (const auto& rho : all.directions()) {
    const auto [lo, hi] = bond_interval(potential.orientation(), rho, kappa);
    Sups s{rho.norm(), 0, 0, 0, 0};
    s.phi1 = sup_on_interval([&](double r) { return eam.phi.derivs(r)[1]; }, lo, hi);
    s.phi2 = sup_on_interval([&](double r) { return radial_derivative_norm(eam.phi, r, 2, d); }, lo, hi);
    s.psi1 = sup_on_interval([&](double r) { return eam.psi.derivs(r)[1]; }, lo, hi);
    s.psi2 = sup_on_interval([&](double r) { return radial_derivative_norm(eam.psi, r, 2, d); }, lo, hi);
    double vmin = std::numeric_limits<double>::infinity(), vmax = -vmin;
    for (int k = 0; k <= 64; ++k) {
      const double v = eam.psi(lo + (hi - lo) * k / 64.0);
      vmin = std::min(vmin, v);
      vmax = std::max(vmax, v);
    }
    density_lo += vmin;
    density_hi += vmax;
    sups.push_back(s);
  }
  const double g1 = max_abs_on_interval([&](double s) { return eam.embedding.derivs(s)[1]; }, density_lo, density_hi);
  const double g2 = max_abs_on_interval([&](double s) { return eam.embedding.derivs(s)[2]; }, density_lo, density_hi);

  LatticeSeries m1(d, r_max), diag2(d, r_max), ms_diag(d, r_max), md_diag(d, r_max);
  LatticeSeries p1(d, r_max), w1(d, r_max), w3(d, r_max), w0(d, r_max), w4(d, r_max);
  for (const auto& s : sups) {
    const double n = s.norm;
    const double w = std::sqrt(1.0 + n);
    const double local = s.phi2 + g1 * s.psi2;
    m1.add(n, n * (s.phi1 + g1 * s.psi1));
    report.table.push_back({all[static_cast<int>(&s - sups.data())].vec(), n * (s.phi1 + g1 * s.psi1)});
    diag2.add(n, n * n * local);
    ms_diag.add(n, n * n * 4.0 * n * n * std::sqrt(2.0 * n) * local);
    md_diag.add(n, n * n * 8.0 * n * n * std::sqrt(2.0 * n) * local);
    p1.add(n, n * s.psi1);
    w0.add(n, w * s.psi1);
    w1.add(n, n * w * s.psi1);
    w3.add(n, n * n * n * w * s.psi1);
    w4.add(n, n * n * n * n * w * s.psi1);
  }
  // tail of a product of two bounded series
  auto product = [](double a, double ta, double b2, double tb) { return (a + ta) * (b2 + tb) - a * b2; };
  const double s_pair = b;
  const double s_w0 = b + 0.5, s_w1 = b - 0.5, s_w3 = b - 2.5, s_w4 = b - 3.5;
  const double s_diag = b - 2.5;

  report.constants.push_back(finish("M1", m1.partial(), m1.tail(b), b, with_tail, d));
  {
    const double partial = g2 * p1.partial() * p1.partial() + diag2.partial();
    const double tail = g2 * product(p1.partial(), p1.tail(s_pair), p1.partial(), p1.tail(s_pair)) + diag2.tail(b);
    report.constants.push_back(finish("M2", partial, tail, b, with_tail, d));
  }
  {
    const double partial = 4.0 * g2 * w3.partial() * w1.partial() + ms_diag.partial();
    const double tail =
        4.0 * g2 * product(w3.partial(), w3.tail(s_w3), w1.partial(), w1.tail(s_w1)) + ms_diag.tail(s_diag);
    report.constants.push_back(finish("Ms2_2", partial, tail, std::min(s_w3, s_diag), with_tail, d));
  }
  {
    const double partial = 4.0 * g2 * (w3.partial() * w1.partial() + w0.partial() * w4.partial()) + md_diag.partial();
    const double tail = 4.0 * g2 *
                            (product(w3.partial(), w3.tail(s_w3), w1.partial(), w1.tail(s_w1)) +
                             product(w0.partial(), w0.tail(s_w0), w4.partial(), w4.tail(s_w4))) +
                        md_diag.tail(s_diag);
    report.constants.push_back(finish("Md2_2", partial, tail, std::min(s_w4, s_diag), with_tail, d));
  }
  return report;
}

DecayReport chain_report(const HarmonicChainPayload& chain, double kappa, double r_max, bool with_tail) {
  DecayReport report;
  const StencilSet all(1, r_max);
  std::array<double, 5> sums{};
  std::array<double, 4> ms{}, md{};
  for (const auto& rho : all.directions()) {
    const int n = std::abs(rho[0]);
    const double a = n == 1 ? chain.a1 : n == 2 ? chain.a2 : 0.0;
    // V_rho = a/2 g_rho and V_rho,rho = a/2; higher derivatives vanish
    const double m1 = n * 0.5 * std::abs(a) * kappa * n;
    const double m2 = n * n * 0.5 * std::abs(a);
    report.table.push_back({rho.vec(), m1});
    sums[1] += m1;
    sums[2] += m2;
    ms[2] += m2 * std::pow(2.0 * n, 2) * std::sqrt(2.0 * n);
    md[2] += m2 * std::pow(2.0 * n, 3) / n * std::sqrt(2.0 * n);
  }
  const double inf = std::numeric_limits<double>::infinity();
  for (int j = 1; j <= 4; ++j) report.constants.push_back(finish("M" + std::to_string(j), sums[j], 0.0, inf, with_tail, 1));
  report.constants.push_back(finish("Ms2_2", ms[2], 0.0, inf, with_tail, 1));
  report.constants.push_back(finish("Md2_2", md[2], 0.0, inf, with_tail, 1));
  report.constants.push_back(finish("Ms3_2", 0.0, 0.0, inf, with_tail, 1));
  report.constants.push_back(finish("Md3_2", 0.0, 0.0, inf, with_tail, 1));
  report.constants.push_back(finish("Md4_2", 0.0, 0.0, inf, with_tail, 1));
  return report;
}

}  // namespace

const DecayConstant& DecayReport::constant(const std::string& name) const {
  for (const auto& c : constants)
    if (c.name == name) return c;
  throw ConfigError("unknown decay constant " + name);
}

double radial_derivative_norm(const RadialFunction& f, double r, int j, int dim) {
  if (j < 1 || j > kOrder) throw ConfigError("derivative order must be between 1 and 5");
  const Derivs derivs = f.derivs(r);
  double factorial = 1.0;
  for (int i = 2; i <= j; ++i) factorial *= i;
  auto along = [&](double c) { return factorial * radial_series(derivs, r, c)[j]; };
  if (dim == 1) return std::max(std::abs(along(1.0)), std::abs(along(-1.0)));
  return max_abs_on_interval(along, -1.0, 1.0, 24);
}

DecayReport decay_report(const Potential& potential, double kappa, double r_max, std::optional<double> tail_exponent,
                         bool with_tail) {
  if (!(r_max >= potential.stencil().cutoff())) throw ConfigError("R_max must be at least R_cut");
  if (!(kappa > 0.0)) throw ConfigError("kappa must be positive");
  const bool finite_range = std::holds_alternative<HarmonicChainPayload>(potential.payload());
  if (with_tail && !finite_range && !tail_exponent)
    throw ConfigError("tail bound requested but no decay exponent supplied");

  DecayReport report = std::visit(
      [&](const auto& p) -> DecayReport {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, PairPayload>)
          return pair_report(p.phi, potential, kappa, r_max, tail_exponent, with_tail);
        else if constexpr (std::is_same_v<T, EamPayload>)
          return eam_report(p, potential, kappa, r_max, tail_exponent, with_tail);
        else
          return chain_report(p, kappa, r_max, with_tail);
      },
      potential.payload());
  report.kappa = kappa;
  report.r_max = r_max;
  for (const auto& c : report.constants) {
    if (c.finite) continue;
    if (c.name[0] == 'M' && std::isdigit(static_cast<unsigned char>(c.name[1])))
      report.energy_divergent = true;
    else
      report.consistency_divergent = true;
  }
  return report;
}

}  // namespace latcb
