#pragma once

#include "latcb/potential.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace fixtures {

inline latcb::Mat triangular() {
  latcb::Mat A(2, 2);
  A << 1.0, 0.5, 0.0, std::sqrt(3.0) / 2.0;
  return A;
}

inline latcb::Potential lj_chain(double cutoff = 2.0, double kappa = 0.25) {
  return latcb::make_pair_potential(1, latcb::Mat::Identity(1, 1), cutoff, latcb::RadialFunction(latcb::LennardJones{}),
                                    kappa);
}

inline latcb::Potential lj_square(double cutoff = 1.5) {
  return latcb::make_pair_potential(2, latcb::Mat::Identity(2, 2), cutoff,
                                    latcb::RadialFunction(latcb::LennardJones{}));
}

inline latcb::Potential morse_triangular() {
  return latcb::make_pair_potential(2, triangular(), 1.5, latcb::RadialFunction(latcb::Morse{1.0, 3.0, 1.0}));
}

inline latcb::Potential eam_square() {
  return latcb::make_eam_potential(2, latcb::Mat::Identity(2, 2), 1.5,
                                   latcb::RadialFunction(latcb::Morse{0.5, 2.5, 1.0}),
                                   latcb::RadialFunction(latcb::Exponential{1.0, 2.0, 1.0}),
                                   latcb::Polynomial({0.0, -0.8, 0.1, 0.02}));
}

inline latcb::Potential eam_cubic() {
  return latcb::make_eam_potential(3, latcb::Mat::Identity(3, 3), 1.5,
                                   latcb::RadialFunction(latcb::LennardJones{0.3, 1.0}),
                                   latcb::RadialFunction(latcb::PowerLaw{1.0, 6.0}),
                                   latcb::Polynomial({0.0, -0.5, 0.05}));
}

inline latcb::Potential harmonic(double a1 = 2.0, double a2 = -0.25) { return latcb::make_harmonic_chain(a1, a2); }

struct Named {
  std::string name;
  latcb::Potential potential;
};

/// One instance of every potential variant and radial form.
inline std::vector<Named> all_variants() {
  return {{"lj-chain", lj_chain()},
          {"lj-square", lj_square()},
          {"morse-triangular", morse_triangular()},
          {"eam-square", eam_square()},
          {"eam-cubic", eam_cubic()},
          {"harmonic-chain", harmonic()}};
}

/// Stencil with |g_rho| <= fraction * kappa |rho|.
inline latcb::StencilValues random_stencil(const latcb::Potential& p, std::mt19937_64& rng, double fraction = 0.8) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  latcb::StencilValues g(p.dim(), p.stencil().size());
  for (int r = 0; r < g.count(); ++r) {
    latcb::Vec dir(p.dim());
    for (int a = 0; a < p.dim(); ++a) dir[a] = normal(rng);
    g[r] = dir.normalized() * (fraction * p.kappa() * p.stencil()[r].norm() * unit(rng));
  }
  return g;
}

/// Smooth-ish random periodic field whose stencils stay well inside D_kappa.
inline latcb::DisplacementField small_field(const latcb::Potential& p, int cells, std::mt19937_64& rng,
                                            double fraction = 0.2) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  latcb::DisplacementField u(latcb::LatticeSpec(p.dim(), p.orientation(), cells));
  for (double& v : u.values()) v = fraction * p.kappa() * 0.5 * dist(rng);
  return u;
}

}  // namespace fixtures
