#pragma once

#include "latcb/types.hpp"

#include <functional>
#include <vector>

namespace latcb {

/// One real Fourier mode a cos(2 pi m.X) + b sin(2 pi m.X), a, b in R^d.
struct TrigMode {
  IVec m;
  Vec cos_coef;
  Vec sin_coef;
};

/// Band-limited periodic vector field on the unit torus [0,1)^d.
class TrigField {
 public:
  TrigField(int dim, std::vector<TrigMode> modes);
  static TrigField zero(int dim) { return {dim, {}}; }

  int dim() const { return dim_; }
  const std::vector<TrigMode>& modes() const { return modes_; }
  bool zero_mean() const;
  /// Largest |m_a| over all modes and axes.
  int bandwidth() const;

  Vec value(const Vec& X) const;
  /// Column a holds d/dX_a.
  Mat gradient(const Vec& X) const;
  /// hess[i](a, b) = d^2 U_i / dX_a dX_b.
  std::vector<Mat> hessian(const Vec& X) const;

  TrigField scaled(double factor) const;
  /// Each mode multiplied by multiplier(m).
  TrigField filtered(const std::function<double(const IVec&)>& multiplier) const;
  /// Coefficients of each mode multiplied by the d x d matrix(m).
  TrigField apply_mode_matrix(const std::function<Mat(const IVec&)>& matrix) const;

  /// ||U||_{W^{-1,2}}: sum over modes of |coef|^2 / (2 |2 pi m|^2), square-rooted.
  double dual_norm() const;
  /// ||grad U||_{L^2} over the torus.
  double grad_l2_norm() const;
  /// max |grad U| (Frobenius) sampled on a grid of `samples` points per axis.
  double grad_sup_norm(int samples = 256) const;

 private:
  int dim_;
  std::vector<TrigMode> modes_;
};

/// Fourier multiplier of zeta on the micro lattice for macro mode m at
/// scale eps: prod_a sinc^2(pi eps m_a).
double zeta_multiplier(const IVec& m, double eps);

}  // namespace latcb
