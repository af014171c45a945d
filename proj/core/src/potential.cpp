#include "latcb/potential.hpp"

#include <cmath>
#include <sstream>

namespace latcb {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Gradient and Hessian of x -> f(|x|).
struct RadialJet {
  double value;
  Vec gradient;
  Mat hessian;
};

RadialJet radial_jet(const RadialFunction& f, const Vec& x) {
  const double r = x.norm();
  if (!(r > 0.0)) throw DomainError("bond collapsed to zero length");
  const auto d = f.derivs(r);
  const Vec n = x / r;
  const int dim = static_cast<int>(x.size());
  Mat nn = n * n.transpose();
  Mat h = d[2] * nn + (d[1] / r) * (Mat::Identity(dim, dim) - nn);
  return {d[0], d[1] * n, h};
}

Vec radial_gradient(const RadialFunction& f, const Vec& x) {
  const double r = x.norm();
  if (!(r > 0.0)) throw DomainError("bond collapsed to zero length");
  return f.derivs(r)[1] / r * x;
}

std::string format_direction(const IVec& rho) {
  std::ostringstream os;
  os << "(";
  for (int a = 0; a < rho.size(); ++a) os << (a ? "," : "") << rho[a];
  os << ")";
  return os.str();
}

}  // namespace

double default_kappa(const Mat& orientation) {
  Eigen::JacobiSVD<Mat> svd(orientation);
  return 0.25 * svd.singularValues().minCoeff();
}

Potential::Potential(Payload payload, Mat orientation, StencilSet stencil, double kappa)
    : payload_(std::move(payload)), orientation_(std::move(orientation)), stencil_(std::move(stencil)), kappa_(kappa) {
  const int d = stencil_.dim();
  if (orientation_.rows() != d || orientation_.cols() != d) throw ConfigError("orientation must be d x d");
  if (!(orientation_.determinant() > 0.0)) throw ConfigError("orientation must have positive determinant");
  if (!(kappa_ > 0.0)) throw ConfigError("admissibility bound kappa must be positive");
  if (std::holds_alternative<HarmonicChainPayload>(payload_)) {
    if (d != 1) throw ConfigError("harmonic chain is one dimensional");
    for (const auto& rho : stencil_.directions())
      if (std::abs(rho[0]) > 2) throw ConfigError("harmonic chain stencil must be {+-1, +-2}");
  }
  bonds_.reserve(stencil_.size());
  for (const auto& rho : stencil_.directions()) {
    bonds_.push_back(orientation_ * rho.real());
    bond_lengths_.push_back(bonds_.back().norm());
  }
  std::visit(overloaded{
                 [&](const PairPayload& p) {
                   for (double r : bond_lengths_) reference_phi_.push_back(p.phi(r));
                 },
                 [&](const EamPayload& p) {
                   for (double r : bond_lengths_) {
                     reference_phi_.push_back(p.phi(r));
                     reference_density_ += p.psi(r);
                   }
                   reference_embedding_ = p.embedding.derivs(reference_density_)[0];
                 },
                 [](const HarmonicChainPayload&) {},
             },
             payload_);
}

std::string Potential::variant_name() const {
  return std::visit(overloaded{
                        [](const PairPayload&) { return std::string("pair"); },
                        [](const EamPayload&) { return std::string("eam"); },
                        [](const HarmonicChainPayload&) { return std::string("harmonic-chain"); },
                    },
                    payload_);
}

double Potential::stencil_norm(const StencilValues& g) const {
  double m = 0.0;
  for (int r = 0; r < stencil_.size(); ++r) m = std::max(m, g[r].norm() / stencil_[r].norm());
  return m;
}

void Potential::check_admissible(const StencilValues& g) const {
  if (g.count() != stencil_.size() || g.dim() != dim()) throw ConfigError("stencil shape does not match potential");
  for (int r = 0; r < stencil_.size(); ++r) {
    const double ratio = g[r].norm() / stencil_[r].norm();
    if (!(ratio <= kappa_)) {
      std::ostringstream os;
      os << "inadmissible stencil: |g_rho|/|rho| = " << ratio << " exceeds kappa = " << kappa_ << " at rho = "
         << format_direction(stencil_[r].vec());
      throw DomainError(os.str());
    }
  }
}

StencilValues Potential::homogeneous_stencil(const Mat& strain) const {
  StencilValues g(dim(), stencil_.size());
  for (int r = 0; r < stencil_.size(); ++r) g[r] = strain * stencil_[r].real();
  return g;
}

double Potential::site_energy(const StencilValues& g) const {
  check_admissible(g);
  const int n = stencil_.size();
  return std::visit(overloaded{
                        [&](const PairPayload& p) {
                          double e = 0.0;
                          for (int r = 0; r < n; ++r) {
                            const Vec x = bonds_[r] + Vec(g[r]);
                            e += p.phi(x.norm()) - reference_phi_[r];
                          }
                          return 0.5 * e;
                        },
                        [&](const EamPayload& p) {
                          double e = 0.0;
                          double density = 0.0;
                          for (int r = 0; r < n; ++r) {
                            const double len = (bonds_[r] + Vec(g[r])).norm();
                            e += p.phi(len) - reference_phi_[r];
                            density += p.psi(len);
                          }
                          return e + (p.embedding.derivs(density)[0] - reference_embedding_);
                        },
                        [&](const HarmonicChainPayload& p) {
                          double e = 0.0;
                          for (int r = 0; r < n; ++r) {
                            const double a = std::abs(stencil_[r][0]) == 1 ? p.a1 : p.a2;
                            e += 0.25 * a * g[r].squaredNorm();
                          }
                          return e;
                        },
                    },
                    payload_);
}

StencilValues Potential::site_gradient(const StencilValues& g) const {
  StencilValues out(dim(), stencil_.size());
  site_gradient(g, out);
  return out;
}

void Potential::site_gradient(const StencilValues& g, StencilValues& out) const {
  check_admissible(g);
  const int n = stencil_.size();
  std::visit(overloaded{
                 [&](const PairPayload& p) {
                   for (int r = 0; r < n; ++r) out[r] = 0.5 * radial_gradient(p.phi, bonds_[r] + Vec(g[r]));
                 },
                 [&](const EamPayload& p) {
                   double density = 0.0;
                   for (int r = 0; r < n; ++r) density += p.psi((bonds_[r] + Vec(g[r])).norm());
                   const double dG = p.embedding.derivs(density)[1];
                   for (int r = 0; r < n; ++r) {
                     const Vec x = bonds_[r] + Vec(g[r]);
                     out[r] = radial_gradient(p.phi, x) + dG * radial_gradient(p.psi, x);
                   }
                 },
                 [&](const HarmonicChainPayload& p) {
                   for (int r = 0; r < n; ++r) {
                     const double a = std::abs(stencil_[r][0]) == 1 ? p.a1 : p.a2;
                     out[r] = 0.5 * a * g[r];
                   }
                 },
             },
             payload_);
}

Mat Potential::site_hessian(const StencilValues& g, int r, int s) const {
  check_admissible(g);
  const int d = dim();
  const int n = stencil_.size();
  return std::visit(overloaded{
                        [&](const PairPayload& p) -> Mat {
                          if (r != s) return Mat::Zero(d, d);
                          return 0.5 * radial_jet(p.phi, bonds_[r] + Vec(g[r])).hessian;
                        },
                        [&](const EamPayload& p) -> Mat {
                          double density = 0.0;
                          for (int q = 0; q < n; ++q) density += p.psi((bonds_[q] + Vec(g[q])).norm());
                          const auto G = p.embedding.derivs(density);
                          const auto psi_r = radial_jet(p.psi, bonds_[r] + Vec(g[r]));
                          const Vec psi_s = radial_gradient(p.psi, bonds_[s] + Vec(g[s]));
                          Mat h = G[2] * psi_r.gradient * psi_s.transpose();
                          if (r == s) h += radial_jet(p.phi, bonds_[r] + Vec(g[r])).hessian + G[1] * psi_r.hessian;
                          return h;
                        },
                        [&](const HarmonicChainPayload& p) -> Mat {
                          if (r != s) return Mat::Zero(1, 1);
                          const double a = std::abs(stencil_[r][0]) == 1 ? p.a1 : p.a2;
                          return Mat::Constant(1, 1, 0.5 * a);
                        },
                    },
                    payload_);
}

void Potential::site_hessian_apply(const StencilValues& g, const StencilValues& h, StencilValues& out) const {
  check_admissible(g);
  const int n = stencil_.size();
  std::visit(overloaded{
                 [&](const PairPayload& p) {
                   for (int r = 0; r < n; ++r)
                     out[r] = 0.5 * radial_jet(p.phi, bonds_[r] + Vec(g[r])).hessian * Vec(h[r]);
                 },
                 [&](const EamPayload& p) {
                   double density = 0.0;
                   double projection = 0.0;  // sum_s grad Psi_s . h_s
                   std::vector<Vec> grad_psi;
                   grad_psi.reserve(n);
                   for (int r = 0; r < n; ++r) {
                     const Vec x = bonds_[r] + Vec(g[r]);
                     density += p.psi(x.norm());
                     grad_psi.push_back(radial_gradient(p.psi, x));
                     projection += grad_psi.back().dot(h[r]);
                   }
                   const auto G = p.embedding.derivs(density);
                   for (int r = 0; r < n; ++r) {
                     const Vec x = bonds_[r] + Vec(g[r]);
                     const Mat local = radial_jet(p.phi, x).hessian + G[1] * radial_jet(p.psi, x).hessian;
                     out[r] = local * Vec(h[r]) + G[2] * projection * grad_psi[r];
                   }
                 },
                 [&](const HarmonicChainPayload& p) {
                   for (int r = 0; r < n; ++r) {
                     const double a = std::abs(stencil_[r][0]) == 1 ? p.a1 : p.a2;
                     out[r] = 0.5 * a * h[r];
                   }
                 },
             },
             payload_);
}

Potential make_pair_potential(int dim, const Mat& orientation, double cutoff, RadialFunction phi,
                              std::optional<double> kappa) {
  return {PairPayload{std::move(phi)}, orientation, StencilSet(dim, cutoff), kappa.value_or(default_kappa(orientation))};
}

Potential make_eam_potential(int dim, const Mat& orientation, double cutoff, RadialFunction phi, RadialFunction psi,
                             Polynomial embedding, std::optional<double> kappa) {
  return {EamPayload{std::move(phi), std::move(psi), std::move(embedding)}, orientation, StencilSet(dim, cutoff),
          kappa.value_or(default_kappa(orientation))};
}

Potential make_harmonic_chain(double a1, double a2, std::optional<double> kappa) {
  const Mat one = Mat::Identity(1, 1);
  return {HarmonicChainPayload{a1, a2}, one, StencilSet(1, 2.0), kappa.value_or(default_kappa(one))};
}

SiteGradients::SiteGradients(const Potential& potential, const DisplacementField& u)
    : dim_(u.dim()), count_(potential.stencil().size()), sites_(u.site_count()) {
  data_.resize(sites_ * static_cast<std::size_t>(count_) * static_cast<std::size_t>(dim_));
  StencilValues grad(dim_, count_);
  for (std::size_t i = 0; i < sites_; ++i) {
    potential.site_gradient(stencil(u, i, potential.stencil()), grad);
    std::copy(grad.flat().begin(), grad.flat().end(),
              data_.begin() + static_cast<std::ptrdiff_t>(i * grad.flat().size()));
  }
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double total_energy(const Potential& potential, const DisplacementField& u) {
  std::vector<double> site(u.site_count());
  for (std::size_t i = 0; i < u.site_count(); ++i) site[i] = potential.site_energy(stencil(u, i, potential.stencil()));
  return pairwise_sum(site);
}

DisplacementField forces(const Potential& potential, const DisplacementField& u) {
  const auto& lat = u.lattice();
  const auto& set = potential.stencil();
  DisplacementField f(lat);
  StencilValues grad(u.dim(), set.size());
  for (std::size_t i = 0; i < u.site_count(); ++i) {
    const IVec site = lat.multi_index(i);
    potential.site_gradient(stencil(u, site, set), grad);
    for (int r = 0; r < set.size(); ++r) {
      f[i] += grad[r];
      f[lat.index(site + set[r].vec())] -= grad[r];
    }
  }
  return f;
}

DisplacementField hessian_apply(const Potential& potential, const DisplacementField& u, const DisplacementField& v) {
  const auto& lat = u.lattice();
  const auto& set = potential.stencil();
  DisplacementField out(lat);
  StencilValues z(u.dim(), set.size());
  for (std::size_t i = 0; i < u.site_count(); ++i) {
    const IVec site = lat.multi_index(i);
    potential.site_hessian_apply(stencil(u, site, set), stencil(v, site, set), z);
    for (int r = 0; r < set.size(); ++r) {
      out[lat.index(site + set[r].vec())] += z[r];
      out[i] -= z[r];
    }
  }
  return out;
}

double max_stencil_norm(const Potential& potential, const DisplacementField& u) {
  double m = 0.0;
  for (std::size_t i = 0; i < u.site_count(); ++i)
    m = std::max(m, potential.stencil_norm(stencil(u, i, potential.stencil())));
  return m;
}

}  // namespace latcb
