#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "nilconv/graded_group.hpp"

namespace nilconv {

/// Subset of the factors {0..nu-1} as a bitmask.
class SubsetMask {
 public:
  constexpr SubsetMask() = default;
  constexpr explicit SubsetMask(std::uint32_t bits) : bits_(bits) {}
  static SubsetMask all(int nu) { return SubsetMask((1u << nu) - 1u); }
  static SubsetMask single(int mu) { return SubsetMask(1u << mu); }

  bool contains(int mu) const { return (bits_ >> mu) & 1u; }
  bool empty() const { return bits_ == 0; }
  std::uint32_t bits() const { return bits_; }
  int count() const;
  SubsetMask complement(int nu) const { return SubsetMask(~bits_ & ((1u << nu) - 1u)); }
  /// Factor indices in increasing order.
  std::vector<int> members(int nu) const;
  /// All 2^nu subsets, each exactly once, in increasing bit order.
  static std::vector<SubsetMask> enumerate(int nu);
  std::string to_string(int nu) const;
  bool operator==(const SubsetMask&) const = default;

 private:
  std::uint32_t bits_ = 0;
};

/// Per-factor derivative orders, alpha_mu in N^{q_mu}.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<std::vector<int>> parts);
  /// All-zero index shaped like the given factor dimensions.
  static MultiIndex zero(std::span<const int> dims);

  int factors() const { return static_cast<int>(parts_.size()); }
  const std::vector<int>& part(int mu) const { return parts_.at(static_cast<std::size_t>(mu)); }
  const std::vector<std::vector<int>>& parts() const { return parts_; }
  /// |alpha_mu|.
  int isotropic(int mu) const;
  MultiIndex operator+(const MultiIndex& o) const;
  bool operator==(const MultiIndex&) const = default;
  bool operator<(const MultiIndex& o) const { return parts_ < o.parts_; }
  std::string to_string() const;

 private:
  std::vector<std::vector<int>> parts_;
};

class ProductGroup {
 public:
  explicit ProductGroup(std::vector<GradedLieAlgebra> factors);
  static ProductGroup single(GradedLieAlgebra g) { return ProductGroup(std::vector<GradedLieAlgebra>{std::move(g)}); }

  int nu() const { return static_cast<int>(factors_.size()); }
  const GradedLieAlgebra& factor(int mu) const { return factors_.at(static_cast<std::size_t>(mu)); }
  const std::vector<GradedLieAlgebra>& factors() const { return factors_; }
  int dim() const { return q_; }
  int dim(int mu) const { return qs_.at(static_cast<std::size_t>(mu)); }
  int homogeneous_dimension(int mu) const { return factor(mu).homogeneous_dimension(); }
  /// First coordinate of factor mu in the flat coordinate vector.
  int offset(int mu) const { return offsets_.at(static_cast<std::size_t>(mu)); }
  const std::vector<int>& dims() const { return qs_; }
  /// Weight d_j of every flat coordinate.
  const std::vector<int>& weights() const { return weights_; }
  /// Factor index of every flat coordinate.
  const std::vector<int>& factor_of() const { return factor_of_; }
  bool all_abelian() const;

  GroupElement multiply(std::span<const double> x, std::span<const double> y) const;
  void multiply_into(std::span<const double> x, std::span<const double> y, std::span<double> out) const;
  GroupElement invert(std::span<const double> x) const;
  GroupElement multi_dilate(std::span<const double> r, std::span<const double> t) const;
  /// |t_mu|_mu for each factor.
  std::vector<double> factor_norms(std::span<const double> t) const;

  /// deg alpha_mu = sum_j d_j (alpha_mu)_j per factor.
  std::vector<int> hom_degree(const MultiIndex& alpha) const;
  /// All alpha with |alpha_mu| <= k_mu for mu in S and alpha_mu = 0 elsewhere.
  std::vector<MultiIndex> multi_indices_up_to(std::span<const int> k, SubsetMask s) const;

  nlohmann::json to_json() const;
  bool operator==(const ProductGroup& o) const { return factors_ == o.factors_; }

 private:
  std::vector<GradedLieAlgebra> factors_;
  std::vector<int> qs_, offsets_, weights_, factor_of_;
  int q_ = 0;
};

/// alpha^S: factors outside S set to zero.
MultiIndex project(const MultiIndex& alpha, SubsetMask s);
/// k with the entries outside S replaced by 0.
std::vector<int> zero_outside(std::span<const int> k, SubsetMask s);

}  // namespace nilconv
