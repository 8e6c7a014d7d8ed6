#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "nilconv/product_group.hpp"

namespace nilconv {

using cplx = std::complex<double>;

/// One lattice axis: points m * spacing for m in [lo, hi].
struct Axis {
  int count = 0;
  double spacing = 0.0;
  int lo() const { return -(count / 2); }
  int hi() const { return lo() + count - 1; }
  bool operator==(const Axis&) const = default;
};

/// Cartesian lattice in exponential coordinates. Weight-1 axes cover
/// [-T, T) with spacing h = 2T/N. An axis of weight l has spacing
/// h^l / D^(l-1), D the factor's lattice denominator, which makes the
/// lattice closed under the group law.
class GridSpec {
 public:
  GridSpec(ProductGroup group, std::vector<Axis> axes, int n, double t);
  static GridSpec make(const ProductGroup& group, int n, double t);

  /// Same spacing, count multiplied by `factor` on every axis. Kernels
  /// live on the doubled grid so that all differences of points in this
  /// grid are covered.
  GridSpec scaled_counts(int factor) const;
  GridSpec kernel_grid() const { return scaled_counts(2); }
  /// The axes of factor mu as a one-factor grid.
  GridSpec factor_spec(int mu) const;

  const ProductGroup& group() const { return *group_; }
  std::shared_ptr<const ProductGroup> group_ptr() const { return group_; }
  int n() const { return n_; }
  double t() const { return t_; }
  const std::vector<Axis>& axes() const { return axes_; }
  int ndim() const { return static_cast<int>(axes_.size()); }
  std::size_t size() const { return size_; }
  double cell_volume() const { return cell_volume_; }
  /// Product of spacings over the axes of factor mu.
  double factor_cell_volume(int mu) const;
  bool lattice_exact() const { return lattice_exact_; }

  void lattice(std::size_t flat, std::span<int> m) const;
  std::size_t flat(std::span<const int> m) const;
  bool in_range(std::span<const int> m) const;
  /// |m_a| <= min(-lo_a, hi_a) on every axis; lookups outside this
  /// symmetric range read as zero so that reflection is exact.
  bool in_symmetric_range(std::span<const int> m) const;
  void coords(std::size_t flat, std::span<double> x) const;
  std::vector<double> coords(std::size_t flat) const;
  /// Nearest lattice index per axis.
  void nearest(std::span<const double> x, std::span<int> m) const;
  std::size_t stride(int axis) const { return strides_.at(static_cast<std::size_t>(axis)); }

  bool same_spacing(const GridSpec& o) const;
  bool operator==(const GridSpec& o) const;
  nlohmann::json to_json() const;

 private:
  std::shared_ptr<const ProductGroup> group_;
  std::vector<Axis> axes_;
  std::vector<std::size_t> strides_;
  int n_ = 0;
  double t_ = 0.0;
  std::size_t size_ = 0;
  double cell_volume_ = 0.0;
  bool lattice_exact_ = true;
};

/// Complex samples on a GridSpec, row-major with the last axis fastest.
class GridFunction {
 public:
  explicit GridFunction(GridSpec spec);
  GridFunction(GridSpec spec, std::vector<cplx> values);

  static GridFunction sample(const GridSpec& spec, const std::function<cplx(std::span<const double>)>& f);
  /// Discrete delta: mass amplitude / cell_volume at the origin.
  static GridFunction delta(const GridSpec& spec, cplx amplitude = 1.0);

  const GridSpec& spec() const { return spec_; }
  std::size_t size() const { return values_.size(); }
  const std::vector<cplx>& values() const { return values_; }
  std::vector<cplx>& values() { return values_; }
  cplx operator[](std::size_t i) const { return values_[i]; }
  cplx& operator[](std::size_t i) { return values_[i]; }
  /// Value at a lattice index, zero outside the grid.
  cplx at_lattice(std::span<const int> m) const;

  double l2_norm() const;
  /// <f, g> = sum f conj(g) dV.
  cplx inner(const GridFunction& g) const;
  double sup_norm() const;

  /// Values copied onto another grid with the same spacing; points
  /// outside this grid read as zero.
  GridFunction resampled(const GridSpec& target) const;

  GridFunction& operator+=(const GridFunction& o);
  GridFunction& operator-=(const GridFunction& o);
  GridFunction& operator*=(cplx c);
  void axpy(cplx a, const GridFunction& x);

 private:
  GridSpec spec_;
  std::vector<cplx> values_;
};

}  // namespace nilconv
