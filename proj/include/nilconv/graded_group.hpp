#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "nilconv/polynomial.hpp"

namespace nilconv {

/// Exponential coordinates of the first kind.
using GroupElement = std::vector<double>;

/// [X_i, X_j] has coefficient c on X_k.
struct StructureConstant {
  int i = 0;
  int j = 0;
  int k = 0;
  double c = 0.0;
};

/// X_j f(x) = sum_k coeffs[k](x) df/dx_k.
struct VectorField {
  int index = 0;
  int degree = 0;
  std::vector<Polynomial> coeffs;

  double coefficient(std::size_t k, std::span<const double> x) const { return coeffs[k].evaluate(x); }
};

class GradedLieAlgebra {
 public:
  /// Validates antisymmetry, grading and Jacobi. Throws ValidationError.
  GradedLieAlgebra(std::vector<int> layer_dims, const std::vector<StructureConstant>& constants,
                   std::string name = "custom");

  static GradedLieAlgebra abelian(int q);
  /// Heisenberg group of dimension 2n+1 with [X_i, X_{n+i}] = X_{2n}.
  static GradedLieAlgebra heisenberg(int n = 1);
  /// Parses {n_layers, layer_dims, structure_constants}. Errors name the
  /// offending JSON pointer under `where`.
  static GradedLieAlgebra from_json(const nlohmann::json& j, const std::string& where = "");
  nlohmann::json to_json() const;

  const std::string& name() const { return name_; }
  int n_layers() const { return static_cast<int>(layer_dims_.size()); }
  int dim() const { return static_cast<int>(weights_.size()); }
  int homogeneous_dimension() const { return hom_dim_; }
  const std::vector<int>& layer_dims() const { return layer_dims_; }
  const std::vector<int>& weights() const { return weights_; }
  bool is_abelian() const { return constants_.empty(); }
  /// Constants with i < j.
  const std::vector<StructureConstant>& constants() const { return constants_; }

  void bracket(std::span<const double> x, std::span<const double> y, std::span<double> out) const;

  GroupElement multiply(std::span<const double> x, std::span<const double> y) const;
  /// Writes x*y into out (size q); out may not alias x or y.
  void multiply_into(std::span<const double> x, std::span<const double> y, std::span<double> out) const;
  GroupElement invert(std::span<const double> x) const;
  GroupElement dilate(double r, std::span<const double> t) const;
  double hom_norm(std::span<const double> t) const;

  /// Group law (x*y)_k as polynomials in (x_0..x_{q-1}, y_0..y_{q-1}).
  const std::vector<Polynomial>& group_law() const { return law_; }
  std::vector<VectorField> left_invariant_fields() const;
  std::vector<VectorField> right_invariant_fields() const;

  /// Smallest D such that the lattice with weight-l spacing h^l / D^(l-1)
  /// is closed under the group law. 0 if the constants have no small
  /// rational denominators.
  std::int64_t lattice_denominator() const { return lattice_den_; }

  /// Max Jacobi residual over basis triples.
  double jacobi_residual() const;

  bool operator==(const GradedLieAlgebra& o) const;

 private:
  void build_law();
  std::string name_;
  std::vector<int> layer_dims_;
  std::vector<int> weights_;
  int hom_dim_ = 0;
  std::vector<StructureConstant> constants_;
  // Dense table: table_[i*q+j] lists (k, c) for [X_i, X_j].
  std::vector<std::vector<std::pair<int, double>>> table_;
  std::vector<Polynomial> law_;
  std::int64_t lattice_den_ = 1;
};

/// Empirical quasi-triangle constant max |x y^-1| / (|x| + |y|), at least 1.
/// Sample i is a deterministic function of (seed, i), so smaller sample
/// counts see a prefix of larger ones.
double triangle_constant(const GradedLieAlgebra& g, std::size_t sample_count, std::uint64_t seed = 1);

}  // namespace nilconv
