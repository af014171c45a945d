#pragma once

#include "latcb/lattice.hpp"
#include "latcb/types.hpp"

#include <vector>

namespace latcb {

/// Q1 hat zeta(x) = prod_a max(0, 1 - |x_a|).
double zeta_eval(const Vec& x);

/// 1D centred cubic B-spline, (zeta * zeta) restricted to one axis.
double bspline3(double s);
double bspline3_d1(double s);
double bspline3_d2(double s);

/// Piecewise multilinear interpolant v(x) = sum_xi v(xi) zeta(x - xi),
/// periodic, plus the background strain F x.
Vec nodal_interp(const DisplacementField& u, const Vec& x);
/// Gradient of the nodal interpolant (column a = d/dx_a); one-sided from
/// above on cell faces.
Mat nodal_grad(const DisplacementField& u, const Vec& x);

/// Quasi-interpolant (zeta * v)(x) = sum_xi v(xi) (zeta * zeta)(x - xi).
Vec quasi_interp(const DisplacementField& u, const Vec& x);
Mat quasi_grad(const DisplacementField& u, const Vec& x);
/// hess[i](a, b) = d^2 v_i / dx_a dx_b.
std::vector<Mat> quasi_hessian(const DisplacementField& u, const Vec& x);

/// chi_{xi,rho}(x) = int_0^1 zeta(xi + t rho - x) dt, integrated exactly on
/// the pieces where the integrand is polynomial. Non-periodic (on Z^d).
double chi_eval(const IVec& xi, const IVec& rho, const Vec& x);

/// rho . grad_x chi_{xi,rho}(x) = zeta(xi - x) - zeta(xi + rho - x).
double chi_rho_derivative(const IVec& xi, const IVec& rho, const Vec& x);

/// Box of sites xi (per-axis inclusive bounds) outside of which
/// chi_{xi,rho}(x) vanishes.
struct SiteWindow {
  IVec lo;
  IVec hi;
};
SiteWindow chi_support_window(const IVec& rho, const Vec& x);

/// w with quasi_interp(w, xi) = u(xi) at every site, by Fourier division
/// with the symbol prod_a (2/3 + cos(k_a)/3). The background strain is
/// carried over unchanged.
DisplacementField smooth_nodal_interp(const DisplacementField& u);

}  // namespace latcb
