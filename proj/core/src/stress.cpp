#include "latcb/stress.hpp"

#include "latcb/csv.hpp"
#include "latcb/interpolation.hpp"
#include "parallel.hpp"

#include <cmath>
#include <ostream>

namespace latcb {

CBModel::CBModel(Potential potential) : potential_(std::move(potential)) {}

double CBModel::energy(const Mat& F) const { return potential_.site_energy(potential_.homogeneous_stencil(F)); }

Mat CBModel::stress(const Mat& F) const {
  const auto& set = potential_.stencil();
  const auto grad = potential_.site_gradient(potential_.homogeneous_stencil(F));
  Mat s = Mat::Zero(dim(), dim());
  for (int r = 0; r < set.size(); ++r) s += Vec(grad[r]) * set[r].real().transpose();
  return s;
}

Moduli CBModel::moduli(const Mat& F) const {
  const int d = dim();
  const auto& set = potential_.stencil();
  const auto g = potential_.homogeneous_stencil(F);
  Moduli c = Moduli::Zero(d * d, d * d);
  StencilValues h(d, set.size()), out(d, set.size());
  for (int j = 0; j < d; ++j)
    for (int b = 0; b < d; ++b) {
      // h_sigma = e_j sigma_b, the homogeneous direction e_j (x) e_b
      for (int s = 0; s < set.size(); ++s) {
        h[s].setZero();
        h[s][j] = set[s][b];
      }
      potential_.site_hessian_apply(g, h, out);
      for (int r = 0; r < set.size(); ++r)
        for (int i = 0; i < d; ++i)
          for (int a = 0; a < d; ++a) c(i * d + a, j * d + b) += out[r][i] * set[r][a];
    }
  return c;
}

Mat CBModel::acoustic_tensor(const Mat& F, const Vec& k) const {
  const int d = dim();
  const Moduli c = moduli(F);
  Mat a = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int al = 0; al < d; ++al)
        for (int be = 0; be < d; ++be) a(i, j) += c(i * d + al, j * d + be) * k[al] * k[be];
  return a;
}

Mat contract(const Moduli& c, const Mat& g) {
  const int d = static_cast<int>(g.rows());
  Mat out = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int a = 0; a < d; ++a)
      for (int j = 0; j < d; ++j)
        for (int b = 0; b < d; ++b) out(i, a) += c(i * d + a, j * d + b) * g(j, b);
  return out;
}

AtomisticStress::AtomisticStress(const Potential& potential, const DisplacementField& u)
    : potential_(potential), lattice_(u.lattice()), phi_(potential, u) {
  const int reach = static_cast<int>(std::ceil(potential.stencil().cutoff()));
  if (lattice_.cells() < 2 * reach + 2) throw ConfigError("supercell too small for the stencil cutoff");
}

namespace {

template <class F>
void for_each_in_window(const SiteWindow& w, F&& f) {
  const int d = static_cast<int>(w.lo.size());
  IVec site = w.lo;
  for (int a = 0; a < d; ++a)
    if (w.hi[a] < w.lo[a]) return;
  while (true) {
    f(site);
    int a = d - 1;
    while (a >= 0 && site[a] == w.hi[a]) {
      site[a] = w.lo[a];
      --a;
    }
    if (a < 0) return;
    ++site[a];
  }
}

}  // namespace

Mat AtomisticStress::stress(const Vec& x) const {
  const int d = lattice_.dim();
  const auto& set = potential_.stencil();
  Mat s = Mat::Zero(d, d);
  for (int r = 0; r < set.size(); ++r) {
    const IVec& rho = set[r].vec();
    Vec acc = Vec::Zero(d);
    for_each_in_window(chi_support_window(rho, x), [&](const IVec& xi) {
      const double w = chi_eval(xi, rho, x);
      if (w != 0.0) acc += w * phi_(lattice_.index(xi), r);
    });
    s += acc * set[r].real().transpose();
  }
  return s;
}

Vec AtomisticStress::divergence(const Vec& x) const {
  const int d = lattice_.dim();
  const auto& set = potential_.stencil();
  Vec div = Vec::Zero(d);
  for (int r = 0; r < set.size(); ++r) {
    const IVec& rho = set[r].vec();
    for_each_in_window(chi_support_window(rho, x), [&](const IVec& xi) {
      const double w = chi_rho_derivative(xi, rho, x);
      if (w != 0.0) div += w * phi_(lattice_.index(xi), r);
    });
  }
  return div;
}

std::string to_string(StressField::Label label) {
  switch (label) {
    case StressField::Label::atomistic: return "atomistic";
    case StressField::Label::cauchy_born: return "cauchy_born";
    case StressField::Label::difference: return "difference";
  }
  return "unknown";
}

std::vector<Vec> staggered_grid(const LatticeSpec& lattice, int per_cell) {
  if (per_cell < 1) throw ConfigError("stress grid needs at least one point per cell");
  const int d = lattice.dim();
  const int n = lattice.cells() * per_cell;
  std::size_t total = 1;
  for (int a = 0; a < d; ++a) total *= static_cast<std::size_t>(n);
  std::vector<Vec> pts;
  pts.reserve(total);
  for (std::size_t i = 0; i < total; ++i) {
    Vec x(d);
    std::size_t rest = i;
    for (int a = d - 1; a >= 0; --a) {
      const auto j = static_cast<double>(rest % static_cast<std::size_t>(n));
      rest /= static_cast<std::size_t>(n);
      x[a] = (j + 0.5) / per_cell;
    }
    pts.push_back(x);
  }
  return pts;
}

StressField sample_atomistic_stress(const AtomisticStress& sa, const std::vector<Vec>& points, int workers) {
  StressField f;
  f.label = StressField::Label::atomistic;
  f.points = points;
  f.values.resize(points.size());
  detail::parallel_for(points.size(), workers, [&](std::size_t i) { f.values[i] = sa.stress(points[i]); });
  return f;
}

void write_stress_csv(std::ostream& os, const StressField& field) {
  if (field.points.empty()) {
    os << "label\n";
    return;
  }
  const int d = static_cast<int>(field.points.front().size());
  std::vector<std::string> cols;
  for (int a = 0; a < d; ++a) cols.push_back("x" + std::to_string(a));
  for (int i = 0; i < d; ++i)
    for (int a = 0; a < d; ++a) cols.push_back("S" + std::to_string(i) + std::to_string(a));
  cols.push_back("label");
  CsvTable table(cols);
  const std::string label = to_string(field.label);
  for (std::size_t p = 0; p < field.points.size(); ++p) {
    std::vector<double> row(field.points[p].data(), field.points[p].data() + d);
    for (int i = 0; i < d; ++i)
      for (int a = 0; a < d; ++a) row.push_back(field.values[p](i, a));
    table.add_row(row, label);
  }
  table.write(os);
}

int cells_for_scale(double eps) {
  if (!(eps > 0.0)) throw ConfigError("eps must be positive");
  const double inv = 1.0 / eps;
  const long n = std::lround(inv);
  if (std::abs(inv - static_cast<double>(n)) > 1e-9 * inv || n < 4)
    throw ConfigError("eps must be 1/N for an integer N >= 4");
  return static_cast<int>(n);
}

DisplacementField sample_scaled(const TrigField& U, double eps, const Mat& orientation) {
  const int n = cells_for_scale(eps);
  LatticeSpec lat(U.dim(), orientation, n);
  DisplacementField u(lat);
  for (std::size_t i = 0; i < lat.site_count(); ++i) {
    const Vec xi = lat.multi_index(i).cast<double>();
    u[i] = U.value(eps * xi) / eps;
  }
  return u;
}

StressConsistency stress_consistency_field(const Potential& potential, const CBModel& model, const TrigField& U,
                                           double eps, int per_cell, int workers) {
  const DisplacementField u = sample_scaled(U, eps, potential.orientation());
  const AtomisticStress sa(potential, u);
  const auto points = staggered_grid(u.lattice(), per_cell);
  const int d = U.dim();
  std::vector<double> stress_err(points.size()), div_err(points.size());
  detail::parallel_for(points.size(), workers, [&](std::size_t p) {
    const Vec& x = points[p];
    const Vec X = eps * x;
    const Mat F = U.gradient(X);
    stress_err[p] = (sa.stress(x) - model.stress(F)).norm();
    // div_x S^c = C(grad u) : grad^2 u with grad^2 u(x) = eps grad^2 U(eps x)
    const auto hess = U.hessian(X);
    const Moduli c = model.moduli(F);
    Vec div_c = Vec::Zero(d);
    for (int i = 0; i < d; ++i)
      for (int a = 0; a < d; ++a)
        for (int j = 0; j < d; ++j)
          for (int b = 0; b < d; ++b) div_c[i] += c(i * d + a, j * d + b) * eps * hess[j](a, b);
    div_err[p] = (sa.divergence(x) - div_c).norm();
  });
  StressConsistency out;
  out.eps = eps;
  out.points = points.size();
  for (std::size_t p = 0; p < points.size(); ++p) {
    out.stress_error = std::max(out.stress_error, stress_err[p]);
    out.divergence_error = std::max(out.divergence_error, div_err[p]);
  }
  out.divergence_error_macro = out.divergence_error / eps;
  return out;
}

}  // namespace latcb
