#pragma once

#include "latcb/potential.hpp"

#include <optional>
#include <string>
#include <vector>

namespace latcb {

/// A lattice sum sum_rho f(rho) truncated at |rho| <= R_max, with an
/// analytic bound for the discarded tail.
struct DecayConstant {
  std::string name;            // e.g. "M1", "Ms2_2", "Md3_2"
  double partial = 0.0;        // sum over |rho| <= R_max
  std::optional<double> tail;  // bound for |rho| > R_max, when requested
  double exponent = 0.0;       // nominal decay exponent s of the summand, |rho|^-s
  bool finite = true;          // s > d
};

struct DecayEntry {
  IVec rho;
  double m = 0.0;  // m(rho) for a single direction
};

struct DecayReport {
  double kappa = 0.0;
  double r_max = 0.0;
  std::vector<DecayEntry> table;
  std::vector<DecayConstant> constants;
  /// M^(j) diverge (alpha <= d).
  bool energy_divergent = false;
  /// Ms, Md diverge (alpha <= d + 5/2 for pair potentials).
  bool consistency_divergent = false;

  const DecayConstant& constant(const std::string& name) const;
};

/// sup over |h| = 1 of |d^j/dt^j f(|x + t h|)| at |x| = r; the operator
/// norm of the j-th derivative of x -> f(|x|).
double radial_derivative_norm(const RadialFunction& f, double r, int j, int dim);

/// Decay constants of a pair, EAM or harmonic-chain potential over
/// directions |rho| <= r_max. Pair: M1..M4, Ms2_2, Ms3_2, Md2_2..Md4_2.
/// EAM: M1, M2, Ms2_2, Md2_2 (product-structure majorants).
/// With `with_tail`, a tail exponent is required for non-finite-range
/// potentials; ConfigError otherwise.
DecayReport decay_report(const Potential& potential, double kappa, double r_max,
                         std::optional<double> tail_exponent, bool with_tail = true);

}  // namespace latcb
