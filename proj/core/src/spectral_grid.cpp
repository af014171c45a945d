#include "latcb/spectral_grid.hpp"

#include "fft.hpp"

#include <cmath>
#include <numbers>

namespace latcb {

using detail::Complex;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// i k for derivative along an axis, with the Nyquist bin dropped.
Complex derivative_factor(int m, int n) {
  if (n % 2 == 0 && m == n / 2) return 0.0;
  return {0.0, kTwoPi * detail::signed_frequency(m, n)};
}

}  // namespace

Vec GridField::at(std::size_t p) const {
  Vec v(dim);
  for (int c = 0; c < dim; ++c) v[c] = values[static_cast<std::size_t>(c) * points + p];
  return v;
}

void GridField::set(std::size_t p, const Vec& v) {
  for (int c = 0; c < dim; ++c) values[static_cast<std::size_t>(c) * points + p] = v[c];
}

void GridField::axpy(double a, const GridField& other) {
  if (other.values.size() != values.size()) throw Error("grid field size mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) values[i] += a * other.values[i];
}

SpectralGrid::SpectralGrid(int dim, int points_per_axis) : dim_(dim), m_(points_per_axis) {
  if (dim < 1 || dim > kMaxDim) throw ConfigError("grid dimension must be 1, 2 or 3");
  if (points_per_axis < 4) throw ConfigError("spectral grid needs at least 4 points per axis");
  size_ = 1;
  for (int a = 0; a < dim; ++a) size_ *= static_cast<std::size_t>(m_);
}

Vec SpectralGrid::position(std::size_t p) const {
  Vec X(dim_);
  for (int a = dim_ - 1; a >= 0; --a) {
    X[a] = static_cast<double>(p % static_cast<std::size_t>(m_)) / m_;
    p /= static_cast<std::size_t>(m_);
  }
  return X;
}

IVec SpectralGrid::frequency(std::size_t p) const {
  IVec k(dim_);
  for (int a = dim_ - 1; a >= 0; --a) {
    k[a] = detail::signed_frequency(static_cast<int>(p % static_cast<std::size_t>(m_)), m_);
    p /= static_cast<std::size_t>(m_);
  }
  return k;
}

GridField SpectralGrid::sample(const TrigField& field) const {
  if (field.dim() != dim_) throw ConfigError("field and grid dimensions differ");
  GridField f = zeros();
  for (std::size_t p = 0; p < size_; ++p) f.set(p, field.value(position(p)));
  return f;
}

std::vector<Mat> SpectralGrid::gradient(const GridField& u) const {
  std::vector<Mat> grad(size_, Mat::Zero(dim_, dim_));
  std::vector<Complex> work(size_);
  for (int c = 0; c < dim_; ++c) {
    const auto coeff = detail::forward_real(dim_, m_, u.component(c));
    for (int a = 0; a < dim_; ++a) {
      for (std::size_t p = 0; p < size_; ++p) {
        const IVec k = frequency(p);
        const int bin = k[a] < 0 ? k[a] + m_ : k[a];
        work[p] = coeff[p] * derivative_factor(bin, m_);
      }
      const auto values = detail::inverse_real(dim_, m_, work);
      for (std::size_t p = 0; p < size_; ++p) grad[p](c, a) = values[p];
    }
  }
  return grad;
}

GridField SpectralGrid::divergence(const std::vector<Mat>& stress) const {
  if (stress.size() != size_) throw Error("stress field size mismatch");
  GridField out = zeros();
  std::vector<double> comp(size_);
  std::vector<Complex> acc(size_);
  for (int i = 0; i < dim_; ++i) {
    std::fill(acc.begin(), acc.end(), Complex{});
    for (int a = 0; a < dim_; ++a) {
      for (std::size_t p = 0; p < size_; ++p) comp[p] = stress[p](i, a);
      const auto coeff = detail::forward_real(dim_, m_, comp);
      for (std::size_t p = 0; p < size_; ++p) {
        const IVec k = frequency(p);
        const int bin = k[a] < 0 ? k[a] + m_ : k[a];
        acc[p] += coeff[p] * derivative_factor(bin, m_);
      }
    }
    const auto values = detail::inverse_real(dim_, m_, acc);
    std::copy(values.begin(), values.end(), out.component(i).begin());
  }
  return out;
}

GridField SpectralGrid::apply_mode_matrix(const GridField& f, const std::function<Mat(const IVec&)>& matrix) const {
  std::vector<std::vector<Complex>> coeff(dim_);
  for (int c = 0; c < dim_; ++c) coeff[c] = detail::forward_real(dim_, m_, f.component(c));
  std::vector<std::vector<Complex>> result(dim_, std::vector<Complex>(size_));
  for (std::size_t p = 0; p < size_; ++p) {
    const IVec k = frequency(p);
    if (k.isZero()) continue;
    const Mat a = matrix(k);
    for (int i = 0; i < dim_; ++i) {
      Complex s = 0.0;
      for (int j = 0; j < dim_; ++j) s += a(i, j) * coeff[j][p];
      result[i][p] = s;
    }
  }
  GridField out = zeros();
  for (int c = 0; c < dim_; ++c) {
    const auto values = detail::inverse_real(dim_, m_, result[c]);
    std::copy(values.begin(), values.end(), out.component(c).begin());
  }
  return out;
}

GridField SpectralGrid::remove_mean(const GridField& f) const {
  GridField out = f;
  for (int c = 0; c < dim_; ++c) {
    auto comp = out.component(c);
    double mean = 0.0;
    for (double v : comp) mean += v;
    mean /= static_cast<double>(size_);
    for (double& v : comp) v -= mean;
  }
  return out;
}

double SpectralGrid::dot(const GridField& a, const GridField& b) const {
  double s = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) s += a.values[i] * b.values[i];
  return s / static_cast<double>(size_);
}

double SpectralGrid::max_abs(const GridField& a) const {
  double m = 0.0;
  for (std::size_t p = 0; p < size_; ++p) m = std::max(m, a.at(p).norm());
  return m;
}

std::vector<double> SpectralGrid::tensor_eval(const GridField& u, int c,
                                              const std::vector<std::vector<double>>& axis_points,
                                              const std::array<int, 3>& order) const {
  if (static_cast<int>(axis_points.size()) != dim_) throw Error("tensor_eval needs one point list per axis");
  std::vector<Complex> cur = detail::forward_real(dim_, m_, u.component(c));
  const double norm = 1.0 / static_cast<double>(size_);
  for (auto& v : cur) v *= norm;

  std::vector<std::size_t> shape(dim_, static_cast<std::size_t>(m_));
  for (int a = 0; a < dim_; ++a) {
    const auto& pts = axis_points[a];
    const std::size_t np = pts.size();
    // E[p][m] = (i k)^o e^{i k x_p}
    std::vector<Complex> e(np * static_cast<std::size_t>(m_));
    for (std::size_t p = 0; p < np; ++p)
      for (int m = 0; m < m_; ++m) {
        Complex v;
        if (m_ % 2 == 0 && m == m_ / 2) {
          const double k = std::numbers::pi * m_;
          v = order[a] % 2 ? 0.0 : std::pow(-1.0, order[a] / 2) * std::pow(k, order[a]) * std::cos(k * pts[p]);
        } else {
          const double k = kTwoPi * detail::signed_frequency(m, m_);
          v = std::pow(Complex(0.0, k), order[a]) * std::polar(1.0, k * pts[p]);
        }
        e[p * static_cast<std::size_t>(m_) + static_cast<std::size_t>(m)] = v;
      }
    std::size_t outer = 1, inner = 1;
    for (int b = 0; b < a; ++b) outer *= shape[b];
    for (int b = a + 1; b < dim_; ++b) inner *= shape[b];
    std::vector<Complex> next(outer * np * inner);
    for (std::size_t o = 0; o < outer; ++o)
      for (std::size_t p = 0; p < np; ++p)
        for (std::size_t m = 0; m < static_cast<std::size_t>(m_); ++m) {
          const Complex w = e[p * static_cast<std::size_t>(m_) + m];
          const Complex* src = cur.data() + (o * static_cast<std::size_t>(m_) + m) * inner;
          Complex* dst = next.data() + (o * np + p) * inner;
          for (std::size_t i = 0; i < inner; ++i) dst[i] += w * src[i];
        }
    cur = std::move(next);
    shape[a] = np;
  }
  std::vector<double> out(cur.size());
  for (std::size_t i = 0; i < cur.size(); ++i) out[i] = cur[i].real();
  return out;
}

}  // namespace latcb
