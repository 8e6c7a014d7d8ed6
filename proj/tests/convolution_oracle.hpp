#pragma once

#include <cmath>
#include <vector>

#include "nilconv/grid.hpp"
#include "oracles.hpp"

namespace convolution_oracle {

using namespace nilconv;

// Textbook sum over lattice indices: out(m) = sum_n f(m - n) g(n) dV.
inline GridFunction naive_abelian(const GridFunction& f, const GridFunction& g) {
  const GridSpec& s = g.spec();
  GridFunction out(s);
  std::vector<int> m(static_cast<std::size_t>(s.ndim())), n(m.size()), d(m.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    s.lattice(i, m);
    cplx acc = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j) {
      s.lattice(j, n);
      for (std::size_t a = 0; a < m.size(); ++a) d[a] = m[a] - n[a];
      acc += f.at_lattice(d) * g[j];
    }
    out[i] = acc * s.cell_volume();
  }
  return out;
}

// Heisenberg convolution through the matrix group law.
inline GridFunction naive_heisenberg(const GridFunction& f, const GridFunction& g) {
  const oracle::UpperTriangular mat(3);
  const GridSpec& s = g.spec();
  GridFunction out(s);
  std::vector<int> d(3);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto x = s.coords(i);
    cplx acc = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (g[j] == 0.0) continue;
      auto y = s.coords(j);
      for (auto& v : y) v = -v;
      const auto z = mat.multiply(x, y);
      for (int a = 0; a < 3; ++a) d[a] = static_cast<int>(std::lround(z[a] / s.axes()[a].spacing));
      acc += f.at_lattice(d) * g[j];
    }
    out[i] = acc * s.cell_volume();
  }
  return out;
}

}  // namespace convolution_oracle
