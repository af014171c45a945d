#include "latcb/lattice.hpp"

#include "latcb/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace latcb {

namespace {

int wrap(int i, int n) {
  const int r = i % n;
  return r < 0 ? r + n : r;
}

// Gradient (d x d, column alpha = d/dx_alpha) of the Q1 interpolant of the
// periodic part inside the cell with lower corner `corner`, at local
// coordinates s in [0,1]^d.
Mat cell_gradient(const DisplacementField& u, const IVec& corner, const Vec& s) {
  const int d = u.dim();
  Mat grad = Mat::Zero(d, d);
  const int corners = 1 << d;
  IVec lo(d), hi(d);
  // edge differences, so constant fields give an exact zero
  for (int alpha = 0; alpha < d; ++alpha) {
    for (int b = 0; b < corners; ++b) {
      if ((b >> alpha) & 1) continue;
      double w = 1.0;
      for (int a = 0; a < d; ++a) {
        lo[a] = corner[a] + ((b >> a) & 1);
        if (a != alpha) w *= ((b >> a) & 1) ? s[a] : 1.0 - s[a];
      }
      hi = lo;
      hi[alpha] += 1;
      grad.col(alpha) += w * (u[u.lattice().index(hi)] - u[u.lattice().index(lo)]);
    }
  }
  if (u.has_background()) grad += u.background_strain();
  return grad;
}

}  // namespace

LatticeSpec::LatticeSpec(int dim, Mat orientation, int cells_per_axis)
    : dim_(dim), orientation_(std::move(orientation)), cells_(cells_per_axis) {
  if (dim < 1 || dim > kMaxDim) throw ConfigError("lattice dimension must be 1, 2 or 3");
  if (orientation_.rows() != dim || orientation_.cols() != dim)
    throw ConfigError("orientation matrix must be d x d");
  if (!(orientation_.determinant() > 0.0))
    throw ConfigError("orientation matrix must have positive determinant");
  if (cells_per_axis < 4) throw ConfigError("supercell needs at least 4 sites per axis");
  site_count_ = 1;
  for (int a = 0; a < dim; ++a) site_count_ *= static_cast<std::size_t>(cells_);
}

LatticeSpec LatticeSpec::cubic(int dim, int cells_per_axis) {
  return {dim, Mat::Identity(dim, dim), cells_per_axis};
}

std::size_t LatticeSpec::index(const IVec& site) const {
  std::size_t idx = 0;
  for (int a = 0; a < dim_; ++a)
    idx = idx * static_cast<std::size_t>(cells_) + static_cast<std::size_t>(wrap(site[a], cells_));
  return idx;
}

IVec LatticeSpec::multi_index(std::size_t index) const {
  IVec site(dim_);
  for (int a = dim_ - 1; a >= 0; --a) {
    site[a] = static_cast<int>(index % static_cast<std::size_t>(cells_));
    index /= static_cast<std::size_t>(cells_);
  }
  return site;
}

bool LatticeSpec::operator==(const LatticeSpec& other) const {
  return dim_ == other.dim_ && cells_ == other.cells_ && orientation_ == other.orientation_;
}

Direction::Direction(IVec rho) : rho_(std::move(rho)) {
  if (rho_.size() < 1 || rho_.size() > kMaxDim) throw ConfigError("direction has invalid dimension");
  if (rho_.isZero()) throw ConfigError("lattice direction must be nonzero");
  norm_ = rho_.cast<double>().norm();
}

StencilSet::StencilSet(int dim, double cutoff) : dim_(dim), cutoff_(cutoff) {
  if (dim < 1 || dim > kMaxDim) throw ConfigError("stencil dimension must be 1, 2 or 3");
  if (!(cutoff >= 1.0)) throw ConfigError("stencil cutoff must include nearest neighbours (R_cut >= 1)");
  const int r = static_cast<int>(std::floor(cutoff));
  const double cut2 = cutoff * cutoff * (1.0 + 1e-12);
  IVec rho = IVec::Constant(dim, -r);
  while (true) {
    const double n2 = rho.cast<double>().squaredNorm();
    if (n2 > 0.0 && n2 <= cut2) directions_.emplace_back(rho);
    int a = dim - 1;
    while (a >= 0 && rho[a] == r) {
      rho[a] = -r;
      --a;
    }
    if (a < 0) break;
    ++rho[a];
  }
  std::stable_sort(directions_.begin(), directions_.end(), [](const Direction& x, const Direction& y) {
    const int nx = x.vec().squaredNorm();
    const int ny = y.vec().squaredNorm();
    if (nx != ny) return nx < ny;
    return std::lexicographical_compare(x.vec().data(), x.vec().data() + x.dim(), y.vec().data(),
                                        y.vec().data() + y.dim());
  });
  index_negations();
}

StencilSet::StencilSet(int dim, std::vector<Direction> directions)
    : dim_(dim), cutoff_(0.0), directions_(std::move(directions)) {
  for (const auto& rho : directions_) {
    if (rho.dim() != dim) throw ConfigError("direction dimension does not match stencil");
    cutoff_ = std::max(cutoff_, rho.norm());
  }
  index_negations();
}

void StencilSet::index_negations() {
  negated_.assign(directions_.size(), -1);
  for (std::size_t r = 0; r < directions_.size(); ++r) {
    const int s = find(-directions_[r].vec());
    if (s < 0) throw ConfigError("stencil set is not closed under negation");
    negated_[r] = s;
  }
}

int StencilSet::find(const IVec& rho) const {
  for (std::size_t r = 0; r < directions_.size(); ++r)
    if (directions_[r].vec() == rho) return static_cast<int>(r);
  return -1;
}

StencilValues::StencilValues(int dim, int count)
    : dim_(dim), count_(count), data_(static_cast<std::size_t>(dim) * static_cast<std::size_t>(count), 0.0) {}

void StencilValues::set_zero() { std::fill(data_.begin(), data_.end(), 0.0); }

DisplacementField::DisplacementField(LatticeSpec lattice)
    : lattice_(std::move(lattice)),
      values_(lattice_.site_count() * static_cast<std::size_t>(lattice_.dim()), 0.0),
      background_(Mat::Zero(lattice_.dim(), lattice_.dim())) {}

void DisplacementField::set_background_strain(const Mat& strain) {
  if (strain.rows() != dim() || strain.cols() != dim()) throw ConfigError("background strain must be d x d");
  background_ = strain;
}

bool DisplacementField::has_background() const { return !background_.isZero(0.0); }

Vec DisplacementField::value_at(const IVec& site) const {
  Vec v = (*this)[lattice_.index(site)];
  if (has_background()) v += background_ * site.cast<double>();
  return v;
}

void DisplacementField::set_zero() {
  std::fill(values_.begin(), values_.end(), 0.0);
  background_.setZero();
}

Vec DisplacementField::mean() const {
  Vec m = Vec::Zero(dim());
  for (std::size_t i = 0; i < site_count(); ++i) m += (*this)[i];
  return m / static_cast<double>(site_count());
}

void DisplacementField::remove_mean() {
  const Vec m = mean();
  for (std::size_t i = 0; i < site_count(); ++i) (*this)[i] -= m;
}

DisplacementField& DisplacementField::operator+=(const DisplacementField& other) {
  axpy(1.0, other);
  return *this;
}

DisplacementField& DisplacementField::operator-=(const DisplacementField& other) {
  axpy(-1.0, other);
  return *this;
}

DisplacementField& DisplacementField::operator*=(double factor) {
  for (double& x : values_) x *= factor;
  background_ *= factor;
  return *this;
}

void DisplacementField::axpy(double factor, const DisplacementField& other) {
  if (!(lattice_ == other.lattice_)) throw ConfigError("displacement fields live on different lattices");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += factor * other.values_[i];
  background_ += factor * other.background_;
}

Vec finite_difference(const DisplacementField& u, const IVec& site, const Direction& rho) {
  const auto& lat = u.lattice();
  Vec diff = u[lat.index(site + rho.vec())] - u[lat.index(site)];
  if (u.has_background()) diff += u.background_strain() * rho.real();
  return diff;
}

StencilValues stencil(const DisplacementField& u, const IVec& site, const StencilSet& set) {
  const auto& lat = u.lattice();
  StencilValues g(u.dim(), set.size());
  const auto here = u[lat.index(site)];
  const bool bg = u.has_background();
  for (int r = 0; r < set.size(); ++r) {
    g[r] = u[lat.index(site + set[r].vec())] - here;
    if (bg) g[r] += u.background_strain() * set[r].real();
  }
  return g;
}

StencilValues stencil(const DisplacementField& u, std::size_t site, const StencilSet& set) {
  return stencil(u, u.lattice().multi_index(site), set);
}

double l2_dot(const DisplacementField& u, const DisplacementField& v) {
  const auto a = u.values();
  const auto b = v.values();
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double l2_norm(const DisplacementField& u) { return std::sqrt(l2_dot(u, u)); }

double grad_norm(const DisplacementField& u, double p) {
  const bool inf = std::isinf(p) && p > 0;
  if (!inf && p != 1.0 && p != 2.0) throw ConfigError("grad_norm supports p = 1, 2 or infinity");
  const auto& lat = u.lattice();
  const int d = lat.dim();

  if (inf) {
    // |grad v|^2 is convex along every coordinate line of a cell, so the
    // maximum over a cell sits at one of its corners.
    double best = 0.0;
    const int corners = 1 << d;
    for (std::size_t c = 0; c < lat.site_count(); ++c) {
      const IVec corner = lat.multi_index(c);
      for (int b = 0; b < corners; ++b) {
        Vec s(d);
        for (int a = 0; a < d; ++a) s[a] = (b >> a) & 1;
        best = std::max(best, cell_gradient(u, corner, s).norm());
      }
    }
    return best;
  }

  // p = 2 is integrated exactly by two Gauss points per axis; p = 1 uses a
  // higher order rule since |grad v| is not polynomial for d >= 2.
  const auto& rule = (p == 2.0 || d == 1) ? gauss_legendre_unit(2) : gauss_legendre_unit(8);
  double total = 0.0;
  const int q = static_cast<int>(rule.nodes.size());
  int qpoints = 1;
  for (int a = 0; a < d; ++a) qpoints *= q;
  for (std::size_t c = 0; c < lat.site_count(); ++c) {
    const IVec corner = lat.multi_index(c);
    for (int k = 0; k < qpoints; ++k) {
      Vec s(d);
      double w = 1.0;
      int rest = k;
      for (int a = 0; a < d; ++a) {
        s[a] = rule.nodes[rest % q];
        w *= rule.weights[rest % q];
        rest /= q;
      }
      const double g = cell_gradient(u, corner, s).norm();
      total += w * (p == 2.0 ? g * g : g);
    }
  }
  return p == 2.0 ? std::sqrt(total) : total;
}

}  // namespace latcb
