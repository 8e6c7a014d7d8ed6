#include "nilconv/grid_fields.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>

#include "nilconv/error.hpp"
#include "nilconv/parallel.hpp"

namespace nilconv {

namespace {

struct FieldWord {
  int axis_offset;                 // first flat axis of the factor
  const VectorField* field;
};

using StencilMap = std::map<std::vector<int>, double>;

// Stencil of word[pos..] at lattice point m, accumulated with factor c.
void expand(const GridSpec& spec, const std::vector<FieldWord>& word, std::size_t pos, std::vector<int>& m,
            std::vector<int>& offset, double c, StencilMap& out) {
  if (pos == word.size()) {
    out[offset] += c;
    return;
  }
  const FieldWord& w = word[pos];
  const int q = static_cast<int>(w.field->coeffs.size());
  std::vector<double> x(static_cast<std::size_t>(q));
  for (int k = 0; k < q; ++k) x[k] = m[w.axis_offset + k] * spec.axes()[w.axis_offset + k].spacing;
  for (int k = 0; k < q; ++k) {
    const double a = w.field->coefficient(static_cast<std::size_t>(k), x);
    if (a == 0.0) continue;
    const int ax = w.axis_offset + k;
    const double h2 = 2.0 * spec.axes()[ax].spacing;
    for (int s : {1, -1}) {
      m[ax] += s;
      offset[ax] += s;
      expand(spec, word, pos + 1, m, offset, c * a * s / h2, out);
      m[ax] -= s;
      offset[ax] -= s;
    }
  }
}

std::vector<FieldWord> make_word(const ProductGroup& g, const MultiIndex& alpha,
                                 const std::vector<std::vector<VectorField>>& fields) {
  require(alpha.factors() == g.nu(), "fields: multi-index has the wrong number of factors");
  std::vector<FieldWord> word;
  for (int mu = 0; mu < g.nu(); ++mu) {
    require(static_cast<int>(alpha.part(mu).size()) == g.dim(mu), "fields: multi-index has the wrong shape");
    for (int j = 0; j < g.dim(mu); ++j)
      for (int r = 0; r < alpha.part(mu)[j]; ++r) word.push_back({g.offset(mu), &fields[mu][j]});
  }
  return word;
}

std::vector<std::vector<VectorField>> all_fields(const ProductGroup& g) {
  std::vector<std::vector<VectorField>> f;
  for (int mu = 0; mu < g.nu(); ++mu) f.push_back(g.factor(mu).left_invariant_fields());
  return f;
}

Stencil to_stencil(const StencilMap& map) {
  Stencil s;
  for (const auto& [o, w] : map) {
    if (w == 0.0) continue;
    s.offsets.push_back(o);
    s.weights.push_back(w);
  }
  return s;
}

}  // namespace

int Stencil::reach() const {
  int r = 0;
  for (const auto& o : offsets)
    for (int v : o) r = std::max(r, std::abs(v));
  return r;
}

int field_reach(const MultiIndex& alpha) {
  int r = 0;
  for (int mu = 0; mu < alpha.factors(); ++mu) r += alpha.isotropic(mu);
  return r;
}

Stencil field_stencil(const GridSpec& spec, const MultiIndex& alpha, std::span<const int> m) {
  return FieldStencils(spec).at(alpha, m);
}

FieldStencils::FieldStencils(const GridSpec& spec) : spec_(spec), fields_(all_fields(spec.group())) {}

Stencil FieldStencils::at(const MultiIndex& alpha, std::span<const int> m) const {
  const auto word = make_word(spec_.group(), alpha, fields_);
  std::vector<int> mm(m.begin(), m.end()), offset(m.size(), 0);
  StencilMap map;
  expand(spec_, word, 0, mm, offset, 1.0, map);
  return to_stencil(map);
}

GridFunction apply_fields(const GridFunction& f, const MultiIndex& alpha) {
  const GridSpec& spec = f.spec();
  const auto fields = all_fields(spec.group());
  const auto word = make_word(spec.group(), alpha, fields);
  if (word.empty()) return f;
  GridFunction out(spec);
  parallel_for(spec.size(), [&](std::size_t i) {
    std::vector<int> m(static_cast<std::size_t>(spec.ndim())), offset(m.size(), 0), p(m.size());
    spec.lattice(i, m);
    StencilMap map;
    expand(spec, word, 0, m, offset, 1.0, map);
    cplx acc = 0.0;
    for (const auto& [o, w] : map) {
      for (std::size_t a = 0; a < m.size(); ++a) p[a] = m[a] + o[a];
      acc += w * f.at_lattice(p);
    }
    out[i] = acc;
  });
  return out;
}

}  // namespace nilconv
