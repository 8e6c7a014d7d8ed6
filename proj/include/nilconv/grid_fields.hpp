#pragma once

#include <span>
#include <vector>

#include "nilconv/grid.hpp"

namespace nilconv {

/// (X^alpha f)(m) ~ sum_i weights[i] f(m + offsets[i]).
struct Stencil {
  std::vector<std::vector<int>> offsets;
  std::vector<double> weights;
  /// max_i max_a |offsets[i][a]|.
  int reach() const;
};

/// Left-invariant fields X^alpha = prod_mu X_{mu,1}^{alpha_{mu,1}} ... X_{mu,q}^{alpha_{mu,q}}
/// (leftmost applied last) at lattice point m, each field discretized as
/// sum_k a_jk(x) times a centered difference in x_k with a one-cell step.
/// Exact on polynomials of degree <= 2 per field application.
Stencil field_stencil(const GridSpec& spec, const MultiIndex& alpha, std::span<const int> m);

/// Field stencils with the field polynomials built once.
class FieldStencils {
 public:
  explicit FieldStencils(const GridSpec& spec);
  Stencil at(const MultiIndex& alpha, std::span<const int> m) const;

 private:
  GridSpec spec_;
  std::vector<std::vector<VectorField>> fields_;
};

/// X^alpha f on the same grid, values outside the grid read as zero.
GridFunction apply_fields(const GridFunction& f, const MultiIndex& alpha);

/// Lattice cells a stencil of X^alpha can reach per field application.
int field_reach(const MultiIndex& alpha);

}  // namespace nilconv
