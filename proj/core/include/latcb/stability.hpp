#pragma once

#include "latcb/potential.hpp"
#include "latcb/stress.hpp"

#include <complex>
#include <vector>

namespace latcb {

using CMat = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;

/// H(k) = sum_{rho,sigma} V_{rho sigma}(0) (e^{i k.rho} - 1)(e^{-i k.sigma} - 1)
/// for a fixed potential; the blocks V_{rho sigma}(0) are computed once.
class DynamicalSymbol {
 public:
  explicit DynamicalSymbol(const Potential& potential);

  int dim() const { return dim_; }
  CMat operator()(const Vec& k) const;
  /// Eigenvalues of H(k), ascending.
  Vec eigenvalues(const Vec& k) const;
  /// lambda_min(H(k)) / g(k); k must be nonzero.
  double ratio(const Vec& k) const;

 private:
  struct Block {
    int r;
    int s;
    Mat value;
  };
  int dim_;
  std::vector<IVec> directions_;
  std::vector<Block> blocks_;
};

CMat dynamical_symbol(const Potential& potential, const Vec& k);

/// g(k) = sum_a 4 sin^2(k_a / 2).
double gradient_normalizer(const Vec& k);

/// Brillouin-zone grid of points_per_axis^d wave vectors in [-pi, pi)^d,
/// shifted by the golden-ratio fraction of a grid step.
std::vector<Vec> brillouin_grid(int dim, int points_per_axis);

struct DispersionSpectrum {
  std::vector<Vec> k;
  std::vector<Vec> eigenvalues;  // per k, ascending
  std::vector<double> normalizer;
  std::vector<double> ratio;     // lambda_min / normalizer
};

DispersionSpectrum dispersion(const Potential& potential, int points_per_axis = 256, int workers = 1);

struct StabilityEstimate {
  double gamma = 0.0;
  Vec k_min;
  bool stable() const { return gamma > 0.0; }
};

/// gamma = inf_k lambda_min(H(k)) / g(k), from the grid minimum refined by a
/// compass search (|k| kept >= 1e-7 and wrapped into the zone).
StabilityEstimate stability_constant(const Potential& potential, int points_per_axis = 256, int workers = 1);

/// min over unit a, b of C(F)[a (x) b, a (x) b].
double legendre_hadamard_min(const CBModel& model, const Mat& F);

struct EigenProbe {
  double rayleigh_quotient = 0.0;  // <H v, v> / ||grad v||^2
  double l2_eigenvalue = 0.0;      // <H v, v> / ||v||^2
  double eigen_residual = 0.0;     // ||H v - lambda v|| / ||v||
};

/// Applies H = delta^2 E^a(0) of a 1D harmonic chain to the alternating
/// strain profile v(xi) = -(-1)^xi / 2 on an even supercell.
EigenProbe instability_eigenprobe(const Potential& chain, int cells);

}  // namespace latcb
