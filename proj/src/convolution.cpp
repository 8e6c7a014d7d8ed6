#include "nilconv/convolution.hpp"

#include <cmath>

#include "fft.hpp"
#include "nilconv/error.hpp"
#include "nilconv/parallel.hpp"
#include "nilconv/rng.hpp"

namespace nilconv {

namespace {

void check_compatible(const GridSpec& a, const GridSpec& b, const char* what) {
  require(a.group().dim() == b.group().dim() && a.group().nu() == b.group().nu(),
          std::string(what) + ": grids belong to different groups");
  require(a.same_spacing(b), std::string(what) + ": grids must share their spacing");
}

// Zero-padded FFT layout for a linear convolution of grids a and b.
std::vector<int> pad_dims_for(const GridSpec& a, const GridSpec& b) {
  std::vector<int> dims;
  for (int ax = 0; ax < a.ndim(); ++ax)
    dims.push_back(detail::nice_fft_size(a.axes()[ax].count + b.axes()[ax].count - 1));
  return dims;
}

std::size_t padded_index(const std::vector<int>& dims, std::span<const int> k) {
  std::size_t f = 0;
  for (std::size_t a = 0; a < dims.size(); ++a) f = f * static_cast<std::size_t>(dims[a]) + static_cast<std::size_t>(k[a]);
  return f;
}

std::vector<cplx> padded_spectrum(const GridFunction& f, const std::vector<int>& dims) {
  std::size_t total = 1;
  for (int d : dims) total *= static_cast<std::size_t>(d);
  std::vector<cplx> buf(total, 0.0);
  const GridSpec& s = f.spec();
  std::vector<int> m(static_cast<std::size_t>(s.ndim()));
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (f[i] == 0.0) continue;
    s.lattice(i, m);
    for (int a = 0; a < s.ndim(); ++a) m[a] -= s.axes()[a].lo();
    buf[padded_index(dims, m)] = f[i];
  }
  detail::fft_inplace(buf, dims, false);
  return buf;
}

// Inverse transform of spec_a * spec_b, read back on `out` with index
// offset lo_a + lo_b. Returns the L2 mass outside `out`.
double extract_product(std::vector<cplx> prod, const std::vector<int>& dims, const GridSpec& a, const GridSpec& b,
                       GridFunction& out) {
  detail::fft_inplace(prod, dims, true);
  const double norm = 1.0 / static_cast<double>(prod.size());
  const GridSpec& os = out.spec();
  const int d = os.ndim();
  std::vector<int> m(static_cast<std::size_t>(d)), k(static_cast<std::size_t>(d));
  double inside = 0.0;
  for (std::size_t i = 0; i < os.size(); ++i) {
    os.lattice(i, m);
    bool ok = true;
    for (int ax = 0; ax < d && ok; ++ax) {
      k[ax] = m[ax] - a.axes()[ax].lo() - b.axes()[ax].lo();
      ok = k[ax] >= 0 && k[ax] < a.axes()[ax].count + b.axes()[ax].count - 1;
    }
    out[i] = ok ? prod[padded_index(dims, k)] * norm * os.cell_volume() : cplx(0.0);
    inside += std::norm(out[i]);
  }
  double total = 0.0;
  for (auto& v : prod) total += std::norm(v * norm * os.cell_volume());
  return std::sqrt(std::max(0.0, total - inside) * os.cell_volume());
}

GridFunction convolve_direct(const GridFunction& f, const GridFunction& g, const GridSpec& out,
                             const ConvolveOptions& opt) {
  const ProductGroup& grp = out.group();
  const int d = out.ndim();
  std::vector<std::size_t> nz;
  for (std::size_t j = 0; j < g.size(); ++j)
    if (g[j] != 0.0) nz.push_back(j);
  const double pairs = static_cast<double>(out.size()) * static_cast<double>(nz.size());
  if (pairs > opt.pair_budget)
    throw BudgetError("convolve: direct path needs " + std::to_string(static_cast<long long>(pairs)) +
                      " point pairs, over the budget of " + std::to_string(static_cast<long long>(opt.pair_budget)));
  std::vector<int> ylat(nz.size() * static_cast<std::size_t>(d));
  std::vector<double> ycoord(nz.size() * static_cast<std::size_t>(d));
  for (std::size_t n = 0; n < nz.size(); ++n) {
    g.spec().lattice(nz[n], std::span<int>(ylat).subspan(n * d, d));
    for (int a = 0; a < d; ++a) ycoord[n * d + a] = -ylat[n * d + a] * out.axes()[a].spacing;
  }
  std::vector<bool> abelian_factor;
  for (int mu = 0; mu < grp.nu(); ++mu) abelian_factor.push_back(grp.factor(mu).is_abelian());
  GridFunction result(out);
  const double vol = out.cell_volume();
  parallel_for(out.size(), [&](std::size_t i) {
    std::vector<int> mx(static_cast<std::size_t>(d)), diff(static_cast<std::size_t>(d));
    std::vector<double> x(static_cast<std::size_t>(d)), z(static_cast<std::size_t>(d));
    out.lattice(i, mx);
    out.coords(i, x);
    cplx acc = 0.0;
    for (std::size_t n = 0; n < nz.size(); ++n) {
      const int* yl = &ylat[n * d];
      for (int mu = 0; mu < grp.nu(); ++mu) {
        const int o = grp.offset(mu), q = grp.dim(mu);
        if (abelian_factor[mu]) {
          for (int a = o; a < o + q; ++a) diff[a] = mx[a] - yl[a];
        } else {
          const std::span<const double> xs(&x[o], q), yinv(&ycoord[n * d + o], q);
          grp.factor(mu).multiply_into(xs, yinv, std::span<double>(&z[o], q));
          for (int a = o; a < o + q; ++a) diff[a] = static_cast<int>(std::lround(z[a] / out.axes()[a].spacing));
        }
      }
      if (!f.spec().in_range(diff)) continue;
      acc += f[f.spec().flat(diff)] * g[nz[n]];
    }
    result[i] = acc * vol;
  });
  return result;
}

}  // namespace

GridFunction convolve(const GridFunction& f, const GridFunction& g, const GridSpec& out, const ConvolveOptions& opt,
                      double* truncated) {
  check_compatible(f.spec(), g.spec(), "convolve");
  check_compatible(g.spec(), out, "convolve");
  if (truncated) *truncated = 0.0;
  if (opt.allow_fast && out.group().all_abelian()) {
    const auto dims = pad_dims_for(f.spec(), g.spec());
    auto sf = padded_spectrum(f, dims);
    const auto sg = padded_spectrum(g, dims);
    for (std::size_t i = 0; i < sf.size(); ++i) sf[i] *= sg[i];
    GridFunction result(out);
    const double lost = extract_product(std::move(sf), dims, f.spec(), g.spec(), result);
    if (truncated) *truncated = lost;
    return result;
  }
  return convolve_direct(f, g, out, opt);
}

GridFunction convolve(const GridFunction& f, const GridFunction& g, const ConvolveOptions& opt) {
  return convolve(f, g, g.spec(), opt);
}

GridFunction symmetric_support(const GridFunction& k) {
  GridFunction out = k;
  std::vector<int> m(static_cast<std::size_t>(k.spec().ndim()));
  for (std::size_t i = 0; i < k.size(); ++i) {
    k.spec().lattice(i, m);
    if (!k.spec().in_symmetric_range(m)) out[i] = 0.0;
  }
  return out;
}

DiscreteOperator::DiscreteOperator(const KernelRep& k, const GridSpec& domain, ConvolveOptions opt)
    : domain_(domain), opt_(opt) {
  kernel_ = std::make_shared<const GridFunction>(symmetric_support(k.render(domain.kernel_grid())));
  if (std::holds_alternative<TensorKernel>(k.variant()) && !domain.group().all_abelian() && domain.group().nu() > 1) {
    const auto parts = k.tensor_factors();
    for (int mu = 0; mu < domain.group().nu(); ++mu)
      factor_ops_.push_back(std::make_shared<const DiscreteOperator>(parts[mu], domain.factor_spec(mu), opt));
  }
  init();
}

DiscreteOperator::DiscreteOperator(const GridFunction& kernel, const GridSpec& domain, ConvolveOptions opt)
    : domain_(domain), opt_(opt) {
  check_compatible(kernel.spec(), domain, "operator");
  kernel_ = std::make_shared<const GridFunction>(symmetric_support(kernel));
  init();
}

void DiscreteOperator::init() {
  const GridSpec& ks = kernel_->spec();
  GridFunction adj(ks);
  std::vector<int> m(static_cast<std::size_t>(ks.ndim()));
  for (std::size_t i = 0; i < ks.size(); ++i) {
    ks.lattice(i, m);
    for (auto& e : m) e = -e;
    adj[i] = std::conj(kernel_->at_lattice(m));
  }
  adjoint_ = std::make_shared<const GridFunction>(std::move(adj));
  fast_ = opt_.allow_fast && domain_.group().all_abelian();
  if (fast_) {
    pad_dims_ = pad_dims_for(ks, domain_);
    spec_k_ = padded_spectrum(*kernel_, pad_dims_);
    spec_adj_ = padded_spectrum(*adjoint_, pad_dims_);
  }
}

GridFunction DiscreteOperator::apply_with(const GridFunction& kernel, const std::vector<cplx>& spectrum,
                                          const GridFunction& f) const {
  require(f.spec() == domain_, "operator: input is not on the operator's domain grid");
  if (fast_) {
    auto sf = padded_spectrum(f, pad_dims_);
    for (std::size_t i = 0; i < sf.size(); ++i) sf[i] *= spectrum[i];
    GridFunction out(domain_);
    extract_product(std::move(sf), pad_dims_, kernel.spec(), domain_, out);
    return out;
  }
  return convolve(kernel, f, domain_, opt_);
}

namespace {

// Applies per-factor operators along each factor's axes in turn.
GridFunction apply_factorwise(const std::vector<std::shared_ptr<const DiscreteOperator>>& ops, const GridFunction& f,
                              bool adjoint) {
  const GridSpec& spec = f.spec();
  const auto& grp = spec.group();
  GridFunction cur = f;
  for (int mu = 0; mu < grp.nu(); ++mu) {
    const GridSpec fs = spec.factor_spec(mu);
    const int o = grp.offset(mu), q = grp.dim(mu);
    std::vector<std::size_t> inner(1, 0), outer(1, 0);
    for (int a = 0; a < spec.ndim(); ++a) {
      auto& target = (a >= o && a < o + q) ? inner : outer;
      std::vector<std::size_t> next;
      for (std::size_t base : target)
        for (int c = 0; c < spec.axes()[a].count; ++c) next.push_back(base + static_cast<std::size_t>(c) * spec.stride(a));
      target = std::move(next);
    }
    GridFunction next(spec);
    parallel_for(outer.size(), [&](std::size_t s) {
      GridFunction slice(fs);
      bool any = false;
      for (std::size_t i = 0; i < inner.size(); ++i) {
        slice[i] = cur[outer[s] + inner[i]];
        any = any || slice[i] != 0.0;
      }
      if (!any) return;
      const GridFunction r = adjoint ? ops[mu]->apply_adjoint(slice) : ops[mu]->apply(slice);
      for (std::size_t i = 0; i < inner.size(); ++i) next[outer[s] + inner[i]] = r[i];
    });
    cur = std::move(next);
  }
  return cur;
}

}  // namespace

GridFunction DiscreteOperator::apply(const GridFunction& f) const {
  if (!factor_ops_.empty()) {
    require(f.spec() == domain_, "operator: input is not on the operator's domain grid");
    return apply_factorwise(factor_ops_, f, false);
  }
  return apply_with(*kernel_, spec_k_, f);
}

GridFunction DiscreteOperator::apply_adjoint(const GridFunction& f) const {
  if (!factor_ops_.empty()) {
    require(f.spec() == domain_, "operator: input is not on the operator's domain grid");
    return apply_factorwise(factor_ops_, f, true);
  }
  return apply_with(*adjoint_, spec_adj_, f);
}

GridFunction apply_op(const KernelRep& k, const GridFunction& f, const ConvolveOptions& opt) {
  return DiscreteOperator(k, f.spec(), opt).apply(f);
}

KernelRep compose_kernels(const KernelRep& k, const KernelRep& l, const GridSpec& kernel_grid,
                          const ConvolveOptions& opt, double* truncated) {
  const GridFunction kk = symmetric_support(k.render(kernel_grid));
  const GridFunction ll = symmetric_support(l.render(kernel_grid));
  GridFunction out = convolve(kk, ll, kernel_grid, opt, truncated);
  return KernelRep::grid(symmetric_support(out));
}

nlohmann::json OpNormEstimate::to_json() const {
  return {{"value", value}, {"iterations", iterations}, {"residual", residual}, {"converged", converged}, {"grid", grid}};
}

OpNormEstimate power_iteration(const std::function<std::vector<cplx>(const std::vector<cplx>&)>& normal_map,
                               std::size_t n, int max_iter, double tol, std::uint64_t seed) {
  require(max_iter >= 8, "power iteration: max_iter must be at least 8");
  auto norm = [](const std::vector<cplx>& v) {
    double s = 0.0;
    for (const auto& e : v) s += std::norm(e);
    return std::sqrt(s);
  };
  Rng rng(seed);
  std::vector<cplx> v(n);
  for (auto& e : v) e = cplx(rng.normal(), rng.normal());
  double nv = norm(v);
  for (auto& e : v) e /= nv;
  OpNormEstimate est;
  double rho = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    std::vector<cplx> w = normal_map(v);
    cplx dot = 0.0;
    for (std::size_t i = 0; i < n; ++i) dot += std::conj(v[i]) * w[i];
    rho = dot.real();
    est.iterations = it;
    if (rho <= 0.0) {
      const double nw = norm(w);
      est.residual = nw == 0.0 ? 0.0 : 1.0;
      est.converged = nw == 0.0;
      rho = 0.0;
      if (nw == 0.0) break;
    } else {
      double r = 0.0;
      for (std::size_t i = 0; i < n; ++i) r += std::norm(w[i] - rho * v[i]);
      est.residual = std::sqrt(r) / rho;
      if (est.residual <= tol) {
        est.converged = true;
        break;
      }
    }
    const double nw = norm(w);
    if (nw == 0.0) break;
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / nw;
  }
  est.value = std::sqrt(std::max(rho, 0.0));
  return est;
}

OpNormEstimate op_norm(const DiscreteOperator& a, int max_iter, double tol, std::uint64_t seed) {
  const GridSpec& dom = a.domain();
  auto map = [&](const std::vector<cplx>& v) {
    return a.apply_normal(GridFunction(dom, v)).values();
  };
  OpNormEstimate est = power_iteration(map, dom.size(), max_iter, tol, seed);
  est.grid = dom.to_json();
  return est;
}

OpNormEstimate op_norm(const KernelRep& k, const GridSpec& grid, int max_iter, double tol, std::uint64_t seed,
                       const ConvolveOptions& opt) {
  return op_norm(DiscreteOperator(k, grid, opt), max_iter, tol, seed);
}

}  // namespace nilconv
