#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include <json.hpp>

#include "nilconv/grid.hpp"
#include "nilconv/kernel.hpp"

namespace nilconv {

struct ConvolveOptions {
  /// Route all-abelian convolutions through zero-padded FFTs.
  bool allow_fast = true;
  /// Direct path refuses calls above this many point pairs.
  double pair_budget = 2e8;
};

/// (f*g)(x) = sum_y f(x y^-1) g(y) dV for x on `out`. The three grids must
/// share their spacing. Values of f outside its grid count as zero; the
/// L2 mass of the full convolution falling outside `out` is written to
/// `truncated` when given (fast path only, else 0).
GridFunction convolve(const GridFunction& f, const GridFunction& g, const GridSpec& out,
                      const ConvolveOptions& opt = {}, double* truncated = nullptr);
/// Output on g's grid.
GridFunction convolve(const GridFunction& f, const GridFunction& g, const ConvolveOptions& opt = {});

/// Zeroes entries outside the symmetric index range, so that the
/// reflected kernel is supported on the same set.
GridFunction symmetric_support(const GridFunction& k);

/// f -> K*f on a fixed domain grid. The kernel is held on its own grid
/// (by default the doubled domain grid). Immutable once built.
class DiscreteOperator {
 public:
  DiscreteOperator(const KernelRep& k, const GridSpec& domain, ConvolveOptions opt = {});
  DiscreteOperator(const GridFunction& kernel, const GridSpec& domain, ConvolveOptions opt = {});

  const GridSpec& domain() const { return domain_; }
  const GridFunction& kernel() const { return *kernel_; }
  const GridFunction& adjoint_kernel() const { return *adjoint_; }
  bool fast() const { return fast_; }

  GridFunction apply(const GridFunction& f) const;
  GridFunction apply_adjoint(const GridFunction& f) const;
  /// A*A f.
  GridFunction apply_normal(const GridFunction& f) const { return apply_adjoint(apply(f)); }

 private:
  GridFunction apply_with(const GridFunction& kernel, const std::vector<cplx>& spectrum, const GridFunction& f) const;
  void init();
  GridSpec domain_;
  ConvolveOptions opt_;
  std::shared_ptr<const GridFunction> kernel_;
  std::shared_ptr<const GridFunction> adjoint_;
  bool fast_ = false;
  std::vector<int> pad_dims_;
  std::vector<cplx> spec_k_, spec_adj_;
  // Per-factor operators for tensor kernels on nonabelian products.
  std::vector<std::shared_ptr<const DiscreteOperator>> factor_ops_;
};

GridFunction apply_op(const KernelRep& k, const GridFunction& f, const ConvolveOptions& opt = {});

/// K*L as a Grid kernel on `kernel_grid`, both kernels rendered there.
KernelRep compose_kernels(const KernelRep& k, const KernelRep& l, const GridSpec& kernel_grid,
                          const ConvolveOptions& opt = {}, double* truncated = nullptr);

struct OpNormEstimate {
  double value = 0.0;
  int iterations = 0;
  /// ||M v - rho v|| / rho for M = A*A at the final iterate.
  double residual = 0.0;
  bool converged = false;
  nlohmann::json grid;
  nlohmann::json to_json() const;
};

/// Largest eigenvalue of a Hermitian positive semidefinite map by power
/// iteration from a seeded random start; returns sqrt of it.
OpNormEstimate power_iteration(const std::function<std::vector<cplx>(const std::vector<cplx>&)>& normal_map,
                               std::size_t n, int max_iter, double tol, std::uint64_t seed);

OpNormEstimate op_norm(const KernelRep& k, const GridSpec& grid, int max_iter = 500, double tol = 1e-8,
                       std::uint64_t seed = 1, const ConvolveOptions& opt = {});
OpNormEstimate op_norm(const DiscreteOperator& a, int max_iter = 500, double tol = 1e-8, std::uint64_t seed = 1);

}  // namespace nilconv
