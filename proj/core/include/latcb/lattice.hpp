#pragma once

#include "latcb/types.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace latcb {

/// Periodic supercell of the reference lattice Z^d, deformed by y = A xi + u.
///
/// Sites are stored in row-major order (last axis fastest) and every site
/// index is taken modulo N along each axis.
class LatticeSpec {
 public:
  LatticeSpec(int dim, Mat orientation, int cells_per_axis);

  /// Convenience constructor with A = identity.
  static LatticeSpec cubic(int dim, int cells_per_axis);

  int dim() const { return dim_; }
  int cells() const { return cells_; }
  const Mat& orientation() const { return orientation_; }
  std::size_t site_count() const { return site_count_; }
  double volume() const { return static_cast<double>(site_count_); }

  /// Row-major index of a (possibly out-of-range) multi-index, wrapped
  /// periodically.
  std::size_t index(const IVec& site) const;
  IVec multi_index(std::size_t index) const;

  bool operator==(const LatticeSpec& other) const;

 private:
  int dim_;
  Mat orientation_;
  int cells_;
  std::size_t site_count_;
};

/// A nonzero lattice direction rho in Z^d.
class Direction {
 public:
  explicit Direction(IVec rho);

  const IVec& vec() const { return rho_; }
  int dim() const { return static_cast<int>(rho_.size()); }
  double norm() const { return norm_; }
  Vec real() const { return rho_.cast<double>(); }
  int operator[](int axis) const { return rho_[axis]; }

  bool operator==(const Direction& other) const { return rho_ == other.rho_; }

 private:
  IVec rho_;
  double norm_;
};

/// All rho in Z^d with 0 < |rho| <= cutoff, ordered by length and then
/// lexicographically; closed under negation.
class StencilSet {
 public:
  StencilSet(int dim, double cutoff);

  /// Explicit direction list; must be closed under negation.
  StencilSet(int dim, std::vector<Direction> directions);

  int dim() const { return dim_; }
  double cutoff() const { return cutoff_; }
  int size() const { return static_cast<int>(directions_.size()); }
  const Direction& operator[](int r) const { return directions_[r]; }
  const std::vector<Direction>& directions() const { return directions_; }

  /// Position of -rho for the direction at position r.
  int negated(int r) const { return negated_[r]; }
  /// Position of rho in the set, or -1.
  int find(const IVec& rho) const;

 private:
  void index_negations();

  int dim_;
  double cutoff_;
  std::vector<Direction> directions_;
  std::vector<int> negated_;
};

/// Family (g_rho) of R^d vectors indexed by the directions of a stencil set.
class StencilValues {
 public:
  StencilValues(int dim, int count);

  int dim() const { return dim_; }
  int count() const { return count_; }

  Eigen::Map<Eigen::VectorXd> operator[](int r) {
    return {data_.data() + static_cast<std::ptrdiff_t>(r) * dim_, dim_};
  }
  Eigen::Map<const Eigen::VectorXd> operator[](int r) const {
    return {data_.data() + static_cast<std::ptrdiff_t>(r) * dim_, dim_};
  }

  std::span<double> flat() { return data_; }
  std::span<const double> flat() const { return data_; }
  void set_zero();

 private:
  int dim_;
  int count_;
  std::vector<double> data_;
};

/// Periodic displacement u : supercell -> R^d, optionally superposed on a
/// homogeneous background strain F so that u(xi) = F xi + u_per(xi).
///
/// The background is what makes affine states representable on a torus.
class DisplacementField {
 public:
  explicit DisplacementField(LatticeSpec lattice);

  const LatticeSpec& lattice() const { return lattice_; }
  int dim() const { return lattice_.dim(); }
  std::size_t site_count() const { return lattice_.site_count(); }

  Eigen::Map<Eigen::VectorXd> operator[](std::size_t site) {
    return {values_.data() + site * static_cast<std::size_t>(dim()), dim()};
  }
  Eigen::Map<const Eigen::VectorXd> operator[](std::size_t site) const {
    return {values_.data() + site * static_cast<std::size_t>(dim()), dim()};
  }

  /// Periodic part, site-major.
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  const Mat& background_strain() const { return background_; }
  void set_background_strain(const Mat& strain);
  bool has_background() const;

  /// Full displacement F xi + u_per(xi) at an unwrapped site.
  Vec value_at(const IVec& site) const;

  void set_zero();
  /// Removes the mean of the periodic part, per component.
  void remove_mean();
  Vec mean() const;

  DisplacementField& operator+=(const DisplacementField& other);
  DisplacementField& operator-=(const DisplacementField& other);
  DisplacementField& operator*=(double factor);
  /// this += factor * other (periodic parts and backgrounds).
  void axpy(double factor, const DisplacementField& other);

 private:
  LatticeSpec lattice_;
  std::vector<double> values_;
  Mat background_;
};

/// D_rho u(xi) = u(xi + rho) - u(xi), indices wrapped.
Vec finite_difference(const DisplacementField& u, const IVec& site, const Direction& rho);

/// Du(xi) restricted to the directions of the stencil set.
StencilValues stencil(const DisplacementField& u, const IVec& site, const StencilSet& set);
StencilValues stencil(const DisplacementField& u, std::size_t site, const StencilSet& set);

/// Inner product sum_xi u(xi) . v(xi) over periodic parts.
double l2_dot(const DisplacementField& u, const DisplacementField& v);
double l2_norm(const DisplacementField& u);

/// L^p norm of the gradient of the Q1 interpolant over the supercell.
/// p must be 1, 2 or infinity (pass std::numeric_limits<double>::infinity()).
double grad_norm(const DisplacementField& u, double p);

}  // namespace latcb
