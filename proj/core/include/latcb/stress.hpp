#pragma once

#include "latcb/potential.hpp"
#include "latcb/trig_field.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace latcb {

/// Fourth-order tensor C_{i a j b} stored as a (d^2 x d^2) matrix with
/// row i*d + a and column j*d + b.
using Moduli = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 9, 9>;

/// Cauchy-Born model W(F) = V(F . Lambda_*) of a site potential.
class CBModel {
 public:
  explicit CBModel(Potential potential);

  const Potential& potential() const { return potential_; }
  int dim() const { return potential_.dim(); }

  double energy(const Mat& F) const;
  /// S^c(F) = sum_rho V_rho(F . Lambda_*) (x) rho.
  Mat stress(const Mat& F) const;
  /// C(F) = d^2 W / dF^2.
  Moduli moduli(const Mat& F) const;
  /// Acoustic tensor A_ij(k) = C_{i a j b} k_a k_b.
  Mat acoustic_tensor(const Mat& F, const Vec& k) const;

 private:
  Potential potential_;
};

/// (C : G)_{i a}
Mat contract(const Moduli& c, const Mat& g);

/// Atomistic stress S^a(u; .) and its divergence for a fixed displacement;
/// the per-site bond forces Phi_{xi,rho}(u) are computed once.
class AtomisticStress {
 public:
  AtomisticStress(const Potential& potential, const DisplacementField& u);

  /// S^a(u; x) = sum_xi sum_rho [Phi_{xi,rho} (x) rho] chi_{xi,rho}(x),
  /// x in micro (lattice) coordinates; periodic in the supercell.
  Mat stress(const Vec& x) const;
  /// div S^a(u; x) = sum_xi sum_rho Phi_{xi,rho} (zeta(xi - x) - zeta(xi + rho - x)).
  Vec divergence(const Vec& x) const;

 private:
  Potential potential_;
  LatticeSpec lattice_;
  SiteGradients phi_;
};

struct StressField {
  enum class Label { atomistic, cauchy_born, difference };
  Label label = Label::atomistic;
  std::vector<Vec> points;
  std::vector<Mat> values;
};

std::string to_string(StressField::Label label);

/// Staggered evaluation grid: `per_cell` points per unit cell per axis at
/// offsets (j + 1/2) / per_cell.
std::vector<Vec> staggered_grid(const LatticeSpec& lattice, int per_cell);

StressField sample_atomistic_stress(const AtomisticStress& sa, const std::vector<Vec>& points, int workers = 1);

/// CSV with columns x0.., S00, S01, .., label.
void write_stress_csv(std::ostream& os, const StressField& field);

/// Lattice displacement u(xi) = U(eps xi) / eps on an N = 1/eps supercell.
DisplacementField sample_scaled(const TrigField& U, double eps, const Mat& orientation);

struct StressConsistency {
  double eps = 0.0;
  double stress_error = 0.0;          // max |S^a - S^c|
  double divergence_error = 0.0;      // max |div_x S^a - div_x S^c|, micro units
  double divergence_error_macro = 0.0;  // same in macro units, eps^-1 times the above
  std::size_t points = 0;
};

/// Sup-norm errors between the atomistic and Cauchy-Born stresses of
/// u(x) = U(eps x) / eps on a staggered grid.
StressConsistency stress_consistency_field(const Potential& potential, const CBModel& model, const TrigField& U,
                                           double eps, int per_cell = 4, int workers = 1);

/// 1 / eps as an integer; ConfigError if eps is not the reciprocal of an
/// integer >= 4.
int cells_for_scale(double eps);

}  // namespace latcb
