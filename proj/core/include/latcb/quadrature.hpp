#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace latcb {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

namespace detail {

// Gauss-Legendre nodes on [0, 1] by Newton iteration on P_n.
inline QuadratureRule make_gauss_legendre(int n) {
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[n - 1 - i] = 0.5 * (x + 1.0);
    rule.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

}  // namespace detail

/// Gauss-Legendre rule with n points on [0, 1]; exact for degree 2n - 1.
inline const QuadratureRule& gauss_legendre_unit(int n) {
  static const auto rules = [] {
    std::array<QuadratureRule, 17> all;
    for (int k = 1; k <= 16; ++k) all[k] = detail::make_gauss_legendre(k);
    return all;
  }();
  if (n < 1 || n > 16) throw std::out_of_range("Gauss-Legendre order must be in [1, 16]");
  return rules[n];
}

}  // namespace latcb
