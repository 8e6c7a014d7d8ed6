#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "nilconv/grid.hpp"

namespace nilconv {

class DyadicDecomposition;

/// Closed-form kernels with known singular behaviour.
enum class ClosedFormId {
  Hilbert,       // 1/(pi t) on R
  InverseCross,  // 1/(t1 t2) on R x R
  FlagModel,     // 1/(t1 (|t1| + |t2|)) on R x R
  Riesz,         // c_q t_k / |t|^(q+1) on R^q, component k
};

std::string to_string(ClosedFormId id);
ClosedFormId closed_form_from_string(const std::string& s);

struct DeltaKernel {
  cplx amplitude = 1.0;
};
struct ClosedFormKernel {
  ClosedFormId id = ClosedFormId::Hilbert;
  int component = 0;
};
struct GridKernel {
  std::shared_ptr<const GridFunction> data;
  bool principal_value = true;
};
struct DyadicKernel {
  std::shared_ptr<const DyadicDecomposition> data;
};
class KernelRep;
struct TensorKernel {
  std::vector<KernelRep> factors;
};

/// A kernel on a product group: one of the representations above,
/// multiplied by `scale`, optionally reflected (t -> t^-1) and conjugated.
class KernelRep {
 public:
  using Variant = std::variant<DeltaKernel, ClosedFormKernel, GridKernel, DyadicKernel, TensorKernel>;

  KernelRep(std::shared_ptr<const ProductGroup> group, Variant v);

  static KernelRep delta(const ProductGroup& g, cplx amplitude = 1.0);
  static KernelRep closed_form(const ProductGroup& g, ClosedFormId id, int component = 0);
  static KernelRep grid(GridFunction f, bool principal_value = true);
  static KernelRep dyadic(std::shared_ptr<const DyadicDecomposition> d);
  /// One single-factor kernel per factor; the group is their product.
  static KernelRep tensor(std::vector<KernelRep> factors);

  const ProductGroup& group() const { return *group_; }
  std::shared_ptr<const ProductGroup> group_ptr() const { return group_; }
  const Variant& variant() const { return rep_; }
  cplx scale() const { return scale_; }
  bool reflected() const { return reflected_; }
  bool conjugated() const { return conjugated_; }

  KernelRep scaled(cplx c) const;
  /// The factors of a tensor kernel with this kernel's scale and
  /// reflection pushed into them, so their tensor product equals *this.
  std::vector<KernelRep> tensor_factors() const;
  /// K~(t) = conj K(t^-1). An involution.
  KernelRep adjoint() const;

  std::string kind() const;
  nlohmann::json describe() const;

  /// Amplitude when the kernel is a multiple of the delta.
  std::optional<cplx> delta_amplitude() const;
  /// False for Delta (and tensors containing one): no pointwise values
  /// away from the singular set carry the kernel.
  bool is_function() const;

  /// Pointwise value. Points on the singular set give 0.
  cplx eval(std::span<const double> t) const;
  /// Euclidean partial derivative d^alpha K(t) (alpha per flat coordinate)
  /// when a closed formula exists.
  std::optional<cplx> analytic_derivative(std::span<const int> alpha, std::span<const double> t) const;

  /// Samples on `spec`. Delta becomes a discrete delta; 1/t type factors
  /// use the odd-lattice rule (2/t at odd multiples of h, 0 at even ones),
  /// whose discrete multiplier is exactly that of the continuum kernel.
  GridFunction render(const GridSpec& spec) const;

 private:
  cplx base_eval(std::span<const double> t) const;
  GridFunction base_render(const GridSpec& spec) const;
  std::shared_ptr<const ProductGroup> group_;
  Variant rep_;
  cplx scale_ = 1.0;
  bool reflected_ = false;
  bool conjugated_ = false;
};

/// Multilinear interpolation of grid data; zero outside the grid.
cplx interpolate(const GridFunction& f, std::span<const double> t);

}  // namespace nilconv
