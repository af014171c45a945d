#pragma once

#include "latcb/lattice.hpp"
#include "latcb/radial.hpp"
#include "latcb/types.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace latcb {

/// V(g) = 1/2 sum_rho [phi(|A rho + g_rho|) - phi(|A rho|)].
struct PairPayload {
  RadialFunction phi;
};

/// V(g) = sum_rho [phi(R_rho) - phi(|A rho|)] + G(sum_rho psi(R_rho)) - G(psibar_0),
/// R_rho = |A rho + g_rho|.
struct EamPayload {
  RadialFunction phi;
  RadialFunction psi;
  Polynomial embedding;
};

/// 1D chain with first and second neighbour springs:
/// V(g) = a1/4 (g_1^2 + g_{-1}^2) + a2/4 (g_2^2 + g_{-2}^2).
struct HarmonicChainPayload {
  double a1 = 1.0;
  double a2 = 0.0;
};

/// kappa = 0.25 * sigma_min(A); then |A rho + g_rho| >= 0.75 sigma_min |rho|
/// for every admissible stencil.
double default_kappa(const Mat& orientation);

/// Site energy V over finite-difference stencils, with its partial
/// derivatives V_rho and V_rho,sigma. Immutable after construction.
class Potential {
 public:
  using Payload = std::variant<PairPayload, EamPayload, HarmonicChainPayload>;

  Potential(Payload payload, Mat orientation, StencilSet stencil, double kappa);

  int dim() const { return stencil_.dim(); }
  const StencilSet& stencil() const { return stencil_; }
  const Mat& orientation() const { return orientation_; }
  double kappa() const { return kappa_; }
  const Payload& payload() const { return payload_; }
  std::string variant_name() const;

  /// Highest derivative order available in closed form.
  int smoothness_order() const { return 5; }
  /// Whether the extended-time dynamic regime (k >= 5) is covered.
  bool supports_extended_time() const { return smoothness_order() >= 5; }

  /// Throws DomainError naming the offending direction if
  /// max_rho |g_rho| / |rho| > kappa.
  void check_admissible(const StencilValues& g) const;
  /// max_rho |g_rho| / |rho|
  double stencil_norm(const StencilValues& g) const;

  double site_energy(const StencilValues& g) const;
  StencilValues site_gradient(const StencilValues& g) const;
  void site_gradient(const StencilValues& g, StencilValues& out) const;
  /// d x d block V_{rho_r, rho_s}(g).
  Mat site_hessian(const StencilValues& g, int r, int s) const;
  /// out_r = sum_s V_{rs}(g) h_s.
  void site_hessian_apply(const StencilValues& g, const StencilValues& h, StencilValues& out) const;

  /// Homogeneous stencil g_rho = F rho.
  StencilValues homogeneous_stencil(const Mat& strain) const;

 private:
  Payload payload_;
  Mat orientation_;
  StencilSet stencil_;
  double kappa_;
  std::vector<Vec> bonds_;             // A rho
  std::vector<double> bond_lengths_;   // |A rho|
  std::vector<double> reference_phi_;  // phi(|A rho|)
  double reference_density_ = 0.0;     // sum psi(|A rho|)
  double reference_embedding_ = 0.0;   // G(reference_density_)
};

Potential make_pair_potential(int dim, const Mat& orientation, double cutoff, RadialFunction phi,
                              std::optional<double> kappa = std::nullopt);
Potential make_eam_potential(int dim, const Mat& orientation, double cutoff, RadialFunction phi,
                             RadialFunction psi, Polynomial embedding,
                             std::optional<double> kappa = std::nullopt);
Potential make_harmonic_chain(double a1, double a2, std::optional<double> kappa = std::nullopt);

/// Per-site table of V_rho(Du(xi)), the quantities Phi_{xi,rho}(u).
class SiteGradients {
 public:
  SiteGradients(const Potential& potential, const DisplacementField& u);

  int dim() const { return dim_; }
  int directions() const { return count_; }
  std::size_t sites() const { return sites_; }
  Eigen::Map<const Eigen::VectorXd> operator()(std::size_t site, int r) const {
    return {data_.data() + (site * static_cast<std::size_t>(count_) + static_cast<std::size_t>(r)) *
                               static_cast<std::size_t>(dim_),
            dim_};
  }

 private:
  int dim_;
  int count_;
  std::size_t sites_;
  std::vector<double> data_;
};

/// E^a(u) = sum over supercell sites of V(Du(xi)).
double total_energy(const Potential& potential, const DisplacementField& u);

/// F(eta) = -dE^a/du(eta).
DisplacementField forces(const Potential& potential, const DisplacementField& u);

/// delta^2 E^a(u) applied to v.
DisplacementField hessian_apply(const Potential& potential, const DisplacementField& u,
                                const DisplacementField& v);

/// Largest |D_rho u(xi)| / |rho| over the supercell.
double max_stencil_norm(const Potential& potential, const DisplacementField& u);

/// Deterministic pairwise (tree) summation.
double pairwise_sum(std::span<const double> values);

}  // namespace latcb
