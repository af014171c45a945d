#pragma once

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace latcb {

/// Values f(r), f'(r), ..., f^(5)(r).
using Derivs = std::array<double, 6>;

/// phi(r) = depth * ((r0/r)^12 - 2 (r0/r)^6); minimum -depth at r = r0.
struct LennardJones {
  double depth = 1.0;
  double r0 = 1.0;
};

/// phi(r) = depth * (exp(-2a(r - r0)) - 2 exp(-a(r - r0))).
struct Morse {
  double depth = 1.0;
  double stiffness = 1.0;
  double r0 = 1.0;
};

/// phi(r) = scale * r^(-exponent).
struct PowerLaw {
  double scale = 1.0;
  double exponent = 6.0;
};

/// phi(r) = scale * exp(-rate (r - r0)).
struct Exponential {
  double scale = 1.0;
  double rate = 1.0;
  double r0 = 1.0;
};

/// Smooth radial profile with closed-form derivatives up to order 5.
class RadialFunction {
 public:
  using Form = std::variant<LennardJones, Morse, PowerLaw, Exponential>;

  RadialFunction(Form form) : form_(form) {}  // NOLINT(google-explicit-constructor)

  Derivs derivs(double r) const;
  double operator()(double r) const { return derivs(r)[0]; }

  /// Algebraic decay exponent alpha with |f^(j)(r)| <~ r^(-alpha-j), if any.
  /// Exponentially decaying forms report std::nullopt.
  std::optional<double> decay_exponent() const;

  std::string name() const;
  const Form& form() const { return form_; }

 private:
  Form form_;
};

/// Embedding function G(s) = sum_k c_k s^k.
class Polynomial {
 public:
  explicit Polynomial(std::vector<double> coefficients);

  Derivs derivs(double s) const;
  const std::vector<double>& coefficients() const { return coefficients_; }
  bool is_affine() const;

 private:
  std::vector<double> coefficients_;
};

/// Maximum of |f| over [a, b] by dense sampling plus local refinement.
template <class F>
double max_abs_on_interval(F&& f, double a, double b, int samples = 256);

}  // namespace latcb

#include <algorithm>
#include <cmath>

namespace latcb {

template <class F>
double max_abs_on_interval(F&& f, double a, double b, int samples) {
  if (b < a) std::swap(a, b);
  double best = std::max(std::abs(f(a)), std::abs(f(b)));
  if (b == a) return best;
  const double h = (b - a) / samples;
  int best_i = 0;
  double best_interior = -1.0;
  for (int i = 0; i <= samples; ++i) {
    const double v = std::abs(f(a + i * h));
    if (v > best_interior) {
      best_interior = v;
      best_i = i;
    }
  }
  // golden-section refinement around the best sample
  double lo = a + std::max(0, best_i - 1) * h;
  double hi = a + std::min(samples, best_i + 1) * h;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = std::abs(f(x1)), f2 = std::abs(f(x2));
  for (int it = 0; it < 80; ++it) {
    if (f1 > f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = std::abs(f(x1));
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = std::abs(f(x2));
    }
  }
  return std::max({best, best_interior, f1, f2});
}

}  // namespace latcb
