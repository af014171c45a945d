#pragma once

#include "latcb/trig_field.hpp"
#include "latcb/types.hpp"

#include <array>
#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace latcb {

/// Periodic vector field sampled on the points of a SpectralGrid,
/// component-major.
struct GridField {
  int dim = 0;
  std::size_t points = 0;
  std::vector<double> values;

  GridField() = default;
  GridField(int d, std::size_t n) : dim(d), points(n), values(static_cast<std::size_t>(d) * n, 0.0) {}

  std::span<double> component(int c) { return {values.data() + static_cast<std::size_t>(c) * points, points}; }
  std::span<const double> component(int c) const {
    return {values.data() + static_cast<std::size_t>(c) * points, points};
  }
  Vec at(std::size_t p) const;
  void set(std::size_t p, const Vec& v);
  void axpy(double a, const GridField& other);
};

/// Uniform M^d grid on the unit torus with Fourier differentiation.
class SpectralGrid {
 public:
  SpectralGrid(int dim, int points_per_axis);

  int dim() const { return dim_; }
  int points_per_axis() const { return m_; }
  std::size_t size() const { return size_; }
  double spacing() const { return 1.0 / m_; }
  Vec position(std::size_t p) const;
  IVec frequency(std::size_t p) const;  // signed frequency of FFT bin p

  GridField sample(const TrigField& field) const;
  GridField zeros() const { return {dim_, size_}; }

  /// grad[p](i, a) = dU_i/dX_a at grid point p.
  std::vector<Mat> gradient(const GridField& u) const;
  /// (div S)_i = sum_a dS_ia/dX_a.
  GridField divergence(const std::vector<Mat>& stress) const;
  /// Per mode m != 0: coefficient vector replaced by matrix(m) * coefficient;
  /// the mean mode is zeroed.
  GridField apply_mode_matrix(const GridField& f, const std::function<Mat(const IVec&)>& matrix) const;
  GridField remove_mean(const GridField& f) const;

  /// Mean-square inner product over the torus.
  double dot(const GridField& a, const GridField& b) const;
  double l2_norm(const GridField& a) const { return std::sqrt(dot(a, a)); }
  double max_abs(const GridField& a) const;

  /// Trigonometric interpolant of component c (derivative multi-index
  /// `order`) evaluated on the tensor product of per-axis point lists;
  /// row-major result.
  std::vector<double> tensor_eval(const GridField& u, int c, const std::vector<std::vector<double>>& axis_points,
                                  const std::array<int, 3>& order = {0, 0, 0}) const;

 private:
  int dim_;
  int m_;
  std::size_t size_;
};

}  // namespace latcb
