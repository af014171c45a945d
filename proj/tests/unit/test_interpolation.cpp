#include "latcb/interpolation.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace latcb;

namespace {

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

IVec ivec(std::initializer_list<int> xs) {
  IVec v(static_cast<int>(xs.size()));
  int i = 0;
  for (int x : xs) v[i++] = x;
  return v;
}

Vec random_point(int d, double lo, double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Vec x(d);
  for (int a = 0; a < d; ++a) x[a] = dist(rng);
  return x;
}

}  // namespace

TEST(Zeta, NodalValues) {
  EXPECT_EQ(zeta_eval(vec({0.0, 0.0})), 1.0);
  EXPECT_EQ(zeta_eval(vec({1.0, 0.0})), 0.0);
  EXPECT_EQ(zeta_eval(vec({-2.0, 1.0, 0.0})), 0.0);
  EXPECT_DOUBLE_EQ(zeta_eval(vec({0.5, 0.5})), 0.25);
  EXPECT_EQ(zeta_eval(vec({0.3, -0.2})), zeta_eval(vec({-0.3, 0.2})));
}

TEST(Zeta, AffineReproduction) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec x = random_point(2, -3.0, 3.0, rng);
    double sum = 0.0;
    for (int i = -5; i <= 5; ++i)
      for (int j = -5; j <= 5; ++j) sum += (0.7 + 2.0 * i - 1.5 * j) * zeta_eval(x - vec({double(i), double(j)}));
    EXPECT_NEAR(sum, 0.7 + 2.0 * x[0] - 1.5 * x[1], 1e-13);
  }
}

TEST(BSpline, CentralValueAndDerivatives) {
  EXPECT_NEAR(bspline3(0.0), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(bspline3(1.0), 1.0 / 6.0, 1e-15);
  EXPECT_EQ(bspline3(2.0), 0.0);
  // (zeta * zeta)(s) = int hat(t) hat(s - t) dt
  for (double s : {0.0, 0.3, 0.9, 1.4}) {
    double direct = 0.0;
    const int n = 200000;
    for (int k = 0; k < n; ++k) {
      const double t = -1.0 + 2.0 * (k + 0.5) / n;
      direct += oracle::hat(t) * oracle::hat(s - t) * 2.0 / n;
    }
    EXPECT_NEAR(bspline3(s), direct, 1e-9);
    const double h = 1e-5;
    EXPECT_NEAR(bspline3_d1(s + 0.01), (bspline3(s + 0.01 + h) - bspline3(s + 0.01 - h)) / (2 * h), 1e-8);
    EXPECT_NEAR(bspline3_d2(s + 0.01), (bspline3_d1(s + 0.01 + h) - bspline3_d1(s + 0.01 - h)) / (2 * h), 1e-8);
  }
}

TEST(NodalInterp, SitesAffineAndMidpoint) {
  std::mt19937_64 rng(42);
  auto u = oracle::random_field(LatticeSpec::cubic(2, 6), rng, 1.0);
  for (std::size_t i = 0; i < u.site_count(); ++i)
    EXPECT_NEAR((nodal_interp(u, u.lattice().multi_index(i).cast<double>()) - Vec(u[i])).norm(), 0.0, 1e-15);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec x = random_point(2, -2.0, 8.0, rng);
    EXPECT_NEAR((nodal_interp(u, x) - oracle::nodal_value(u, x)).norm(), 0.0, 1e-14);
    EXPECT_NEAR((nodal_grad(u, x) - oracle::nodal_gradient(u, x)).norm(), 0.0, 1e-13);
  }

  DisplacementField a(LatticeSpec::cubic(2, 6));
  Mat F(2, 2);
  F << 0.2, -0.1, 0.05, 0.3;
  a.set_background_strain(F);
  for (std::size_t i = 0; i < a.site_count(); ++i) a[i] << 1.0, -2.0;
  for (int trial = 0; trial < 10; ++trial) {
    const Vec x = random_point(2, 0.0, 6.0, rng);
    EXPECT_NEAR((nodal_interp(a, x) - (F * x + vec({1.0, -2.0}))).norm(), 0.0, 1e-13);
    EXPECT_NEAR((nodal_grad(a, x) - F).norm(), 0.0, 1e-13);
  }

  const auto c = oracle::random_field(LatticeSpec::cubic(1, 8), rng, 1.0);
  EXPECT_NEAR(nodal_interp(c, vec({3.5}))[0], 0.5 * (c[3][0] + c[4][0]), 1e-15);
}

TEST(QuasiInterp, ImpulseConstantAndAffine) {
  DisplacementField u(LatticeSpec::cubic(1, 8));
  u[0][0] = 1.0;
  EXPECT_NEAR(quasi_interp(u, vec({0.0}))[0], 2.0 / 3.0, 1e-15);

  std::mt19937_64 rng(43);
  DisplacementField c(LatticeSpec::cubic(2, 6));
  for (std::size_t i = 0; i < c.site_count(); ++i) c[i] << 0.4, -1.1;
  Mat F(2, 2);
  F << 0.1, 0.2, -0.3, 0.05;
  for (int trial = 0; trial < 10; ++trial) {
    const Vec x = random_point(2, 0.0, 6.0, rng);
    EXPECT_NEAR((quasi_interp(c, x) - vec({0.4, -1.1})).norm(), 0.0, 1e-14);
  }
  c.set_background_strain(F);
  for (int trial = 0; trial < 10; ++trial) {
    const Vec x = random_point(2, 0.0, 6.0, rng);
    EXPECT_NEAR((quasi_interp(c, x) - (F * x + vec({0.4, -1.1}))).norm(), 0.0, 1e-13);
    EXPECT_NEAR((quasi_grad(c, x) - F).norm(), 0.0, 1e-13);
  }
}

TEST(QuasiInterp, SiteValuesAndDerivatives) {
  std::mt19937_64 rng(44);
  const auto u = oracle::random_field(LatticeSpec::cubic(2, 7), rng, 1.0);
  for (std::size_t i = 0; i < u.site_count(); ++i) {
    const IVec s = u.lattice().multi_index(i);
    EXPECT_NEAR((quasi_interp(u, s.cast<double>()) - oracle::quasi_at_site(u, s)).norm(), 0.0, 1e-14);
  }
  const double h = 1e-5;
  for (int trial = 0; trial < 20; ++trial) {
    const Vec x = random_point(2, 0.0, 7.0, rng);
    const Mat g = quasi_grad(u, x);
    const auto hess = quasi_hessian(u, x);
    for (int a = 0; a < 2; ++a) {
      Vec e = Vec::Zero(2);
      e[a] = h;
      const Vec fd = (quasi_interp(u, x + e) - quasi_interp(u, x - e)) / (2 * h);
      EXPECT_NEAR((g.col(a) - fd).norm(), 0.0, 1e-8);
      const Mat fd2 = (quasi_grad(u, x + e) - quasi_grad(u, x - e)) / (2 * h);
      for (int i = 0; i < 2; ++i) EXPECT_NEAR((hess[i].col(a) - fd2.row(i).transpose()).norm(), 0.0, 1e-7);
    }
  }
}

TEST(QuasiInterp, SecondDerivativeContinuousAcrossCellFaces) {
  std::mt19937_64 rng(45);
  const auto u = oracle::random_field(LatticeSpec::cubic(1, 8), rng, 1.0);
  for (int j = 0; j < 8; ++j) {
    const double l = quasi_hessian(u, vec({j - 1e-9}))[0](0, 0);
    const double r = quasi_hessian(u, vec({j + 1e-9}))[0](0, 0);
    EXPECT_NEAR(l, r, 1e-6);
  }
}

TEST(Chi, MatchesOracleAndExample) {
  EXPECT_NEAR(chi_eval(ivec({0}), ivec({1}), vec({0.5})), 0.75, 1e-15);
  std::mt19937_64 rng(46);
  for (int d = 1; d <= 3; ++d)
    for (int trial = 0; trial < 200; ++trial) {
      const IVec rho = oracle::random_direction(d, 3.0, rng);
      const IVec xi = IVec::Zero(d);
      const Vec x = random_point(d, -4.0, 4.0, rng);
      EXPECT_NEAR(chi_eval(xi, rho, x), oracle::chi(xi, rho, x), 1e-13);
    }
}

TEST(Chi, VanishesFarFromSegmentAndOutsideWindow) {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 100; ++trial) {
    const IVec rho = oracle::random_direction(2, 3.0, rng);
    const Vec x = random_point(2, -6.0, 6.0, rng);
    const auto window = chi_support_window(rho, x);
    for (int i = -10; i <= 10; ++i)
      for (int j = -10; j <= 10; ++j) {
        const IVec xi = ivec({i, j});
        const bool inside = (xi.array() >= window.lo.array()).all() && (xi.array() <= window.hi.array()).all();
        if (!inside) {
          EXPECT_EQ(oracle::chi(xi, rho, x), 0.0);
        }
        // distance from x to the segment [xi, xi + rho]
        const Vec a = xi.cast<double>(), b = (xi + rho).cast<double>();
        const double t = std::clamp((x - a).dot(b - a) / (b - a).squaredNorm(), 0.0, 1.0);
        if ((a + t * (b - a) - x).norm() > std::sqrt(2.0)) {
          EXPECT_EQ(chi_eval(xi, rho, x), 0.0);
        }
      }
  }
}

TEST(Chi, RhoDerivativeMatchesFiniteDifference) {
  std::mt19937_64 rng(48);
  for (int trial = 0; trial < 100; ++trial) {
    const IVec rho = oracle::random_direction(2, 3.0, rng);
    const IVec xi = ivec({0, 0});
    const Vec x = random_point(2, -3.0, 3.0, rng);
    const Vec r = rho.cast<double>();
    const double h = 1e-6;
    const double fd = (chi_eval(xi, rho, x + h * r) - chi_eval(xi, rho, x - h * r)) / (2 * h);
    EXPECT_NEAR(chi_rho_derivative(xi, rho, x), fd, 1e-5);
    EXPECT_NEAR(chi_rho_derivative(xi, rho, x), oracle::zeta(-x) - oracle::zeta(r - x), 1e-15);
  }
}

TEST(SmoothNodalInterp, InterpolatesSiteValues) {
  std::mt19937_64 rng(49);
  for (int d = 1; d <= 3; ++d) {
    const auto u = oracle::random_field(LatticeSpec::cubic(d, d == 3 ? 5 : 8), rng, 1.0);
    const auto w = smooth_nodal_interp(u);
    for (std::size_t i = 0; i < u.site_count(); ++i)
      EXPECT_NEAR((oracle::quasi_at_site(w, u.lattice().multi_index(i)) - Vec(u[i])).norm(), 0.0, 1e-12);
  }
  DisplacementField c(LatticeSpec::cubic(2, 6));
  for (std::size_t i = 0; i < c.site_count(); ++i) c[i] << 2.0, -3.0;
  Mat F(2, 2);
  F << 0.1, 0.0, 0.2, -0.1;
  c.set_background_strain(F);
  const auto w = smooth_nodal_interp(c);
  EXPECT_EQ(w.background_strain(), F);
  for (std::size_t i = 0; i < w.site_count(); ++i) EXPECT_NEAR((Vec(w[i]) - vec({2.0, -3.0})).norm(), 0.0, 1e-13);
}

// ||D_rho v~||_{l2} <= ||grad_rho v||_{L2}
TEST(QuasiInterp, DiscreteH1Stability) {
  std::mt19937_64 rng(50);
  for (int trial = 0; trial < 5; ++trial) {
    const auto u = oracle::random_field(LatticeSpec::cubic(2, 6), rng, 1.0);
    for (const IVec& rho : {ivec({1, 0}), ivec({1, 1}), ivec({2, -1})}) {
      double lhs = 0.0;
      for (std::size_t i = 0; i < u.site_count(); ++i) {
        const IVec s = u.lattice().multi_index(i);
        lhs += (oracle::quasi_at_site(u, IVec(s + rho)) - oracle::quasi_at_site(u, s)).squaredNorm();
      }
      const Vec r = rho.cast<double>();
      const double rhs = oracle::integrate_box(IVec::Zero(2), IVec::Constant(2, 6), {}, [&](const Vec& x) {
        return (oracle::nodal_gradient(u, x) * r).squaredNorm();
      });
      EXPECT_LE(lhs, rhs * (1 + 1e-12));
    }
  }
}
