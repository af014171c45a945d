#include "latcb/trig_field.hpp"

#include <cmath>
#include <numbers>

namespace latcb {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double sinc(double x) { return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x; }

}  // namespace

TrigField::TrigField(int dim, std::vector<TrigMode> modes) : dim_(dim), modes_(std::move(modes)) {
  if (dim < 1 || dim > kMaxDim) throw ConfigError("field dimension must be 1, 2 or 3");
  for (const auto& mode : modes_)
    if (mode.m.size() != dim || mode.cos_coef.size() != dim || mode.sin_coef.size() != dim)
      throw ConfigError("Fourier mode has wrong dimension");
}

bool TrigField::zero_mean() const {
  for (const auto& mode : modes_)
    if (mode.m.isZero() && !mode.cos_coef.isZero(0.0)) return false;
  return true;
}

int TrigField::bandwidth() const {
  int b = 0;
  for (const auto& mode : modes_) b = std::max(b, mode.m.cwiseAbs().maxCoeff());
  return b;
}

Vec TrigField::value(const Vec& X) const {
  Vec v = Vec::Zero(dim_);
  for (const auto& mode : modes_) {
    const double phase = kTwoPi * mode.m.cast<double>().dot(X);
    v += std::cos(phase) * mode.cos_coef + std::sin(phase) * mode.sin_coef;
  }
  return v;
}

Mat TrigField::gradient(const Vec& X) const {
  Mat g = Mat::Zero(dim_, dim_);
  for (const auto& mode : modes_) {
    const Vec k = kTwoPi * mode.m.cast<double>();
    const double phase = k.dot(X);
    const Vec amp = -std::sin(phase) * mode.cos_coef + std::cos(phase) * mode.sin_coef;
    g += amp * k.transpose();
  }
  return g;
}

std::vector<Mat> TrigField::hessian(const Vec& X) const {
  std::vector<Mat> h(dim_, Mat::Zero(dim_, dim_));
  for (const auto& mode : modes_) {
    const Vec k = kTwoPi * mode.m.cast<double>();
    const double phase = k.dot(X);
    const Vec amp = -(std::cos(phase) * mode.cos_coef + std::sin(phase) * mode.sin_coef);
    const Mat kk = k * k.transpose();
    for (int i = 0; i < dim_; ++i) h[i] += amp[i] * kk;
  }
  return h;
}

TrigField TrigField::scaled(double factor) const {
  auto modes = modes_;
  for (auto& mode : modes) {
    mode.cos_coef *= factor;
    mode.sin_coef *= factor;
  }
  return {dim_, std::move(modes)};
}

TrigField TrigField::filtered(const std::function<double(const IVec&)>& multiplier) const {
  auto modes = modes_;
  for (auto& mode : modes) {
    const double s = multiplier(mode.m);
    mode.cos_coef *= s;
    mode.sin_coef *= s;
  }
  return {dim_, std::move(modes)};
}

TrigField TrigField::apply_mode_matrix(const std::function<Mat(const IVec&)>& matrix) const {
  auto modes = modes_;
  for (auto& mode : modes) {
    const Mat a = matrix(mode.m);
    mode.cos_coef = a * mode.cos_coef;
    mode.sin_coef = a * mode.sin_coef;
  }
  return {dim_, std::move(modes)};
}

double TrigField::dual_norm() const {
  double s = 0.0;
  for (const auto& mode : modes_) {
    if (mode.m.isZero()) continue;
    const double k2 = kTwoPi * kTwoPi * mode.m.cast<double>().squaredNorm();
    s += (mode.cos_coef.squaredNorm() + mode.sin_coef.squaredNorm()) / (2.0 * k2);
  }
  return std::sqrt(s);
}

double TrigField::grad_l2_norm() const {
  double s = 0.0;
  for (const auto& mode : modes_) {
    const double k2 = kTwoPi * kTwoPi * mode.m.cast<double>().squaredNorm();
    s += 0.5 * k2 * (mode.cos_coef.squaredNorm() + mode.sin_coef.squaredNorm());
  }
  return std::sqrt(s);
}

double TrigField::grad_sup_norm(int samples) const {
  double best = 0.0;
  std::size_t total = 1;
  for (int a = 0; a < dim_; ++a) total *= static_cast<std::size_t>(samples);
  Vec X(dim_);
  for (std::size_t i = 0; i < total; ++i) {
    std::size_t rest = i;
    for (int a = 0; a < dim_; ++a) {
      X[a] = static_cast<double>(rest % static_cast<std::size_t>(samples)) / samples;
      rest /= static_cast<std::size_t>(samples);
    }
    best = std::max(best, gradient(X).norm());
  }
  return best;
}

double zeta_multiplier(const IVec& m, double eps) {
  double s = 1.0;
  for (int a = 0; a < m.size(); ++a) {
    const double v = sinc(std::numbers::pi * eps * m[a]);
    s *= v * v;
  }
  return s;
}

}  // namespace latcb
