#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "nilconv/grid.hpp"
#include "nilconv/rng.hpp"

namespace testing_util {

using nilconv::cplx;
using nilconv::GridFunction;
using nilconv::GridSpec;

/// Random complex values on the lattice points with |m_a| <= radius_a.
inline GridFunction random_compact(const GridSpec& spec, std::vector<int> radius, nilconv::Rng& rng) {
  GridFunction f(spec);
  std::vector<int> m(static_cast<std::size_t>(spec.ndim()));
  for (std::size_t i = 0; i < spec.size(); ++i) {
    spec.lattice(i, m);
    bool inside = true;
    for (int a = 0; a < spec.ndim(); ++a) inside = inside && std::abs(m[a]) <= radius[a];
    if (inside) f[i] = cplx(rng.normal(), rng.normal());
  }
  return f;
}

inline GridFunction random_compact(const GridSpec& spec, int radius, nilconv::Rng& rng) {
  return random_compact(spec, std::vector<int>(static_cast<std::size_t>(spec.ndim()), radius), rng);
}

/// Smooth probe: a product of Gaussian derivatives in every coordinate,
/// which has vanishing mean in every variable.
inline GridFunction gaussian_derivative_probe(const GridSpec& spec, double width) {
  return GridFunction::sample(spec, [&](std::span<const double> x) {
    double v = 1.0;
    for (std::size_t a = 0; a < x.size(); ++a) {
      const double s = x[a] / std::pow(width, spec.group().weights()[a]);
      v *= s * std::exp(-0.5 * s * s);
    }
    return cplx(v);
  });
}

inline double relative_diff(const GridFunction& a, const GridFunction& b) {
  GridFunction d = a;
  d -= b;
  return d.l2_norm() / std::max(b.l2_norm(), 1e-300);
}

}  // namespace testing_util
