#pragma once

#include <cmath>
#include <vector>

#include "nilconv/convolution.hpp"
#include "nilconv/rng.hpp"
#include "nilconv/seminorms.hpp"
#include "oracles.hpp"

namespace seminorm_oracle {

using namespace nilconv;

inline double bump(double s) { return s < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s * s)) : 0.0; }

// Weight of phi or gamma at x: product over the listed bumps.
inline double bump_at(const ProductGroup& g, const std::vector<BumpSpec>& bs, const std::vector<double>& x) {
  double v = 1.0;
  for (const auto& b : bs) {
    const auto& f = g.factor(b.mu);
    std::vector<double> xm(x.begin() + g.offset(b.mu), x.begin() + g.offset(b.mu) + g.dim(b.mu));
    v *= bump(f.hom_norm(f.multiply(f.invert(b.center), xm)) / b.radius);
  }
  return v;
}

// One first-order left-invariant field (or none) on abelian2 or the
// Heisenberg group, written out by hand with centered differences.
inline GridFunction field(const GridFunction& u, int axis) {
  if (axis < 0) return u;
  const GridSpec& s = u.spec();
  const bool heisen = s.ndim() == 3;
  GridFunction out(s);
  std::vector<int> m(static_cast<std::size_t>(s.ndim()));
  auto diff = [&](std::vector<int> p, int a) {
    auto q = p;
    p[a] += 1;
    q[a] -= 1;
    return (u.at_lattice(p) - u.at_lattice(q)) / (2.0 * s.axes()[a].spacing);
  };
  for (std::size_t i = 0; i < s.size(); ++i) {
    s.lattice(i, m);
    const auto x = s.coords(i);
    cplx v = diff(m, axis);
    if (heisen && axis == 0) v -= 0.5 * x[1] * diff(m, 2);
    if (heisen && axis == 1) v += 0.5 * x[0] * diff(m, 2);
    out[i] = v;
  }
  return out;
}

inline double dense_block(const GridFunction& kernel, const GridSpec& dom, int axis, const std::vector<BumpSpec>& phi,
                   const std::vector<BumpSpec>& gamma) {
  const DiscreteOperator op(kernel, dom);
  const ProductGroup& g = dom.group();
  auto m = oracle::dense_matrix(dom.size(), [&](const std::vector<cplx>& e) {
    GridFunction u(dom);
    for (std::size_t i = 0; i < dom.size(); ++i) u[i] = e[i] * bump_at(g, gamma, dom.coords(i));
    GridFunction w = field(op.apply(u), axis);
    std::vector<cplx> out(dom.size());
    for (std::size_t i = 0; i < dom.size(); ++i) out[i] = w[i] * bump_at(g, phi, dom.coords(i));
    return out;
  });
  return oracle::largest_singular_value(m);
}

inline GridFunction random_kernel(const GridSpec& kgrid, std::uint64_t seed) {
  Rng rng(seed);
  GridFunction k(kgrid);
  for (std::size_t i = 0; i < k.size(); ++i) k[i] = cplx(rng.normal(), rng.normal());
  return k;
}

inline MultiIndex order_one(const ProductGroup& g, int factor, int axis) {
  auto parts = MultiIndex::zero(g.dims()).parts();
  if (axis >= 0) parts[factor][axis] = 1;
  return MultiIndex(parts);
}

}  // namespace seminorm_oracle
