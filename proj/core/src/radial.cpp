#include "latcb/radial.hpp"

#include "latcb/types.hpp"

#include <cmath>

namespace latcb {

namespace {

// d^j/dr^j of c * r^(-p)
Derivs power_derivs(double c, double p, double r) {
  Derivs d{};
  double coef = c;
  double expo = -p;
  for (int j = 0; j <= 5; ++j) {
    d[j] = coef * std::pow(r, expo);
    coef *= expo;
    expo -= 1.0;
  }
  return d;
}

// d^j/dr^j of c * exp(-a (r - r0))
Derivs exp_derivs(double c, double a, double r0, double r) {
  Derivs d{};
  const double e = c * std::exp(-a * (r - r0));
  double f = 1.0;
  for (int j = 0; j <= 5; ++j) {
    d[j] = f * e;
    f *= -a;
  }
  return d;
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

Derivs RadialFunction::derivs(double r) const {
  return std::visit(
      overloaded{
          [r](const LennardJones& lj) {
            const double s = r / lj.r0;
            const auto a = power_derivs(1.0, 12.0, s);
            const auto b = power_derivs(2.0, 6.0, s);
            Derivs d{};
            double scale = lj.depth;
            for (int j = 0; j <= 5; ++j) {
              d[j] = scale * (a[j] - b[j]);
              scale /= lj.r0;
            }
            return d;
          },
          [r](const Morse& m) {
            const auto a = exp_derivs(1.0, 2.0 * m.stiffness, m.r0, r);
            const auto b = exp_derivs(2.0, m.stiffness, m.r0, r);
            Derivs d{};
            for (int j = 0; j <= 5; ++j) d[j] = m.depth * (a[j] - b[j]);
            return d;
          },
          [r](const PowerLaw& p) { return power_derivs(p.scale, p.exponent, r); },
          [r](const Exponential& e) { return exp_derivs(e.scale, e.rate, e.r0, r); },
      },
      form_);
}

std::optional<double> RadialFunction::decay_exponent() const {
  return std::visit(overloaded{
                        [](const LennardJones&) -> std::optional<double> { return 6.0; },
                        [](const Morse&) -> std::optional<double> { return std::nullopt; },
                        [](const PowerLaw& p) -> std::optional<double> { return p.exponent; },
                        [](const Exponential&) -> std::optional<double> { return std::nullopt; },
                    },
                    form_);
}

std::string RadialFunction::name() const {
  return std::visit(overloaded{
                        [](const LennardJones&) { return std::string("lennard-jones"); },
                        [](const Morse&) { return std::string("morse"); },
                        [](const PowerLaw&) { return std::string("power"); },
                        [](const Exponential&) { return std::string("exponential"); },
                    },
                    form_);
}

Polynomial::Polynomial(std::vector<double> coefficients) : coefficients_(std::move(coefficients)) {
  if (coefficients_.empty()) coefficients_.push_back(0.0);
}

Derivs Polynomial::derivs(double s) const {
  Derivs d{};
  // Horner for each derivative order
  const int n = static_cast<int>(coefficients_.size());
  for (int j = 0; j <= 5; ++j) {
    double acc = 0.0;
    for (int k = n - 1; k >= j; --k) {
      double falling = 1.0;
      for (int i = 0; i < j; ++i) falling *= (k - i);
      acc = acc * s + falling * coefficients_[k];
    }
    d[j] = acc;
  }
  return d;
}

bool Polynomial::is_affine() const {
  for (std::size_t k = 2; k < coefficients_.size(); ++k)
    if (coefficients_[k] != 0.0) return false;
  return true;
}

}  // namespace latcb
