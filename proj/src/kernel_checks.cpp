#include "nilconv/kernel_checks.hpp"

#include <algorithm>
#include <cmath>

#include "nilconv/dyadic.hpp"
#include "nilconv/error.hpp"
#include "nilconv/parallel.hpp"
#include "nilconv/rng.hpp"

namespace nilconv {

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::vector<int> flatten(const MultiIndex& a) {
  std::vector<int> out;
  for (const auto& p : a.parts()) out.insert(out.end(), p.begin(), p.end());
  return out;
}

// Weights w_mu(t): |t_mu| or |t_1| + ... + |t_mu|.
std::vector<double> growth_weights(const ProductGroup& g, GrowthMode mode, std::span<const double> t) {
  auto w = g.factor_norms(t);
  if (mode == GrowthMode::Flag)
    for (std::size_t mu = 1; mu < w.size(); ++mu) w[mu] += w[mu - 1];
  return w;
}

double weight_product(const ProductGroup& g, const std::vector<double>& w, const std::vector<int>& deg) {
  double p = 1.0;
  for (int mu = 0; mu < g.nu(); ++mu) p *= std::pow(w[mu], g.homogeneous_dimension(mu) + deg[mu]);
  return p;
}

// Sum_i prod_j (-1)^{i_j} C(k_j, i_j) f(t + sum_j (k_j - 2 i_j) H_j e_j) / (2 H_j)^{k_j}.
template <class F>
cplx central_difference(const F& f, const std::vector<int>& alpha, const std::vector<double>& step) {
  std::vector<int> axes;
  for (std::size_t j = 0; j < alpha.size(); ++j)
    if (alpha[j] > 0) axes.push_back(static_cast<int>(j));
  std::vector<int> idx(axes.size(), 0);
  std::vector<double> offset(alpha.size(), 0.0);
  cplx acc = 0.0;
  while (true) {
    double w = 1.0;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      const int j = axes[a];
      w *= ((idx[a] % 2) ? -1.0 : 1.0) * binomial(alpha[j], idx[a]) / std::pow(2.0 * step[j], alpha[j]);
      offset[j] = (alpha[j] - 2 * idx[a]) * step[j];
    }
    acc += w * f(offset);
    std::size_t a = 0;
    for (; a < axes.size(); ++a) {
      if (++idx[a] <= alpha[axes[a]]) break;
      idx[a] = 0;
    }
    if (a == axes.size()) break;
  }
  return acc;
}

bool uses_grid_data(const KernelRep& k) {
  if (std::holds_alternative<GridKernel>(k.variant())) return true;
  if (const auto* t = std::get_if<TensorKernel>(&k.variant()))
    for (const auto& f : t->factors)
      if (uses_grid_data(f)) return true;
  return false;
}

std::vector<double> random_point(const ProductGroup& g, Rng& rng, double lo, double hi) {
  std::vector<double> t(static_cast<std::size_t>(g.dim()));
  for (int mu = 0; mu < g.nu(); ++mu) {
    const auto& f = g.factor(mu);
    std::vector<double> u(static_cast<std::size_t>(f.dim()));
    double n = 0.0;
    while (n == 0.0) {
      for (auto& v : u) v = rng.normal();
      n = f.hom_norm(u);
    }
    const auto p = f.dilate(std::exp2(rng.uniform(lo, hi)) / n, u);
    std::copy(p.begin(), p.end(), t.begin() + g.offset(mu));
  }
  return t;
}

GrowthReport reduce_samples(GrowthMode mode, const std::vector<MultiIndex>& alphas,
                            const std::vector<std::vector<double>>& values,
                            const std::vector<std::vector<double>>& points) {
  GrowthReport rep;
  rep.mode = mode;
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    GrowthEntry e;
    e.alpha = alphas[a];
    for (std::size_t s = 0; s < values.size(); ++s) {
      if (points[s].empty()) continue;
      ++e.samples;
      if (e.argmax.empty() || values[s][a] > e.constant) {
        e.constant = values[s][a];
        e.argmax = points[s];
      }
    }
    rep.entries.push_back(std::move(e));
  }
  return rep;
}

}  // namespace

std::string to_string(GrowthMode m) { return m == GrowthMode::Product ? "product" : "flag"; }

GrowthMode growth_mode_from_string(const std::string& s) {
  if (s == "product") return GrowthMode::Product;
  if (s == "flag") return GrowthMode::Flag;
  throw ValidationError("unknown growth mode '" + s + "'");
}

double GrowthReport::max_constant() const {
  double m = 0.0;
  for (const auto& e : entries) m = std::max(m, e.constant);
  return m;
}

const GrowthEntry* GrowthReport::find(const MultiIndex& alpha) const {
  for (const auto& e : entries)
    if (e.alpha == alpha) return &e;
  return nullptr;
}

nlohmann::json GrowthReport::to_json() const {
  nlohmann::json es = nlohmann::json::array();
  for (const auto& e : entries)
    es.push_back({{"alpha", e.alpha.parts()}, {"constant", e.constant}, {"argmax", e.argmax}, {"samples", e.samples}});
  return {{"mode", to_string(mode)}, {"valid", valid}, {"note", note}, {"method", method}, {"entries", es}};
}

std::vector<MultiIndex> multi_indices_below(const MultiIndex& alpha_max) {
  const auto top = flatten(alpha_max);
  std::vector<int> dims;
  for (const auto& p : alpha_max.parts()) dims.push_back(static_cast<int>(p.size()));
  std::vector<MultiIndex> out;
  std::vector<int> cur(top.size(), 0);
  while (true) {
    std::vector<std::vector<int>> parts;
    std::size_t o = 0;
    for (int d : dims) {
      parts.emplace_back(cur.begin() + static_cast<std::ptrdiff_t>(o), cur.begin() + static_cast<std::ptrdiff_t>(o + d));
      o += static_cast<std::size_t>(d);
    }
    out.emplace_back(std::move(parts));
    std::size_t j = 0;
    for (; j < cur.size(); ++j) {
      if (++cur[j] <= top[j]) break;
      cur[j] = 0;
    }
    if (j == cur.size()) break;
  }
  std::sort(out.begin(), out.end(), [](const MultiIndex& a, const MultiIndex& b) {
    const auto fa = flatten(a), fb = flatten(b);
    int sa = 0, sb = 0;
    for (int v : fa) sa += v;
    for (int v : fb) sb += v;
    return sa != sb ? sa < sb : fa < fb;
  });
  return out;
}

GrowthReport check_growth_grid(const GridFunction& f, const MultiIndex& alpha_max, const GrowthOptions& opt) {
  const GridSpec& spec = f.spec();
  const ProductGroup& g = spec.group();
  require(alpha_max.factors() == g.nu(), "check_growth: alpha_max has the wrong number of factors");
  const auto top = flatten(alpha_max);
  require(static_cast<int>(top.size()) == g.dim(), "check_growth: alpha_max has the wrong shape");
  const int d = spec.ndim();

  // Axes whose data vanishes at even indices are differenced with step 2.
  std::vector<int> cells(static_cast<std::size_t>(d), 1);
  {
    std::vector<double> even(static_cast<std::size_t>(d), 0.0);
    double total = 0.0;
    std::vector<int> m(static_cast<std::size_t>(d));
    for (std::size_t i = 0; i < spec.size(); ++i) {
      const double e = std::norm(f[i]);
      total += e;
      spec.lattice(i, m);
      for (int a = 0; a < d; ++a)
        if (m[a] % 2 == 0) even[a] += e;
    }
    for (int a = 0; a < d; ++a)
      if (total > 0.0 && even[a] <= 1e-24 * total) cells[a] = 2;
  }
  std::vector<int> reach(static_cast<std::size_t>(d)), lim(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a) {
    reach[a] = 2 * cells[a] * top[a];
    const auto& ax = spec.axes()[a];
    const int sym = std::min(-ax.lo(), ax.hi());
    lim[a] = std::min(static_cast<int>(std::floor(opt.interior * ax.count / 2.0)), sym - reach[a]);
  }
  const auto alphas = multi_indices_below(alpha_max);
  // Small interiors are enumerated; larger ones are sampled.
  std::size_t box = 1;
  for (int a = 0; a < d; ++a) box *= lim[a] < 0 ? 0 : static_cast<std::size_t>(2 * lim[a] + 1);
  const bool exhaustive = box <= opt.exhaustive_limit;
  const std::size_t n = exhaustive ? box : opt.samples;
  std::vector<std::vector<double>> values(n), points(n);
  const Rng base(opt.seed);
  parallel_for(n, [&](std::size_t s) {
    Rng rng = base.fork(s);
    std::vector<int> m(static_cast<std::size_t>(d));
    for (int attempt = 0; attempt < (exhaustive ? 1 : 200); ++attempt) {
      bool ok = true;
      std::size_t rem = s;
      for (int a = d - 1; a >= 0 && ok; --a) {
        if (lim[a] < 0) {
          ok = false;
          break;
        }
        if (exhaustive) {
          const auto w = static_cast<std::size_t>(2 * lim[a] + 1);
          m[a] = static_cast<int>(rem % w) - lim[a];
          rem /= w;
        } else {
          m[a] = rng.uniform_int(-lim[a], lim[a]);
          if (cells[a] == 2 && m[a] % 2 == 0) m[a] += (m[a] < lim[a]) ? 1 : -1;
        }
        if (cells[a] == 2 && m[a] % 2 == 0) ok = false;
      }
      if (!ok) continue;
      const int guarded = opt.mode == GrowthMode::Flag ? 1 : g.nu();
      for (int mu = 0; mu < guarded && ok; ++mu) {
        bool away = false;
        for (int a = g.offset(mu); a < g.offset(mu) + g.dim(mu); ++a)
          away = away || std::abs(m[a]) - reach[a] >= opt.singular_margin;
        ok = away;
      }
      if (!ok) continue;
      std::vector<double> x(static_cast<std::size_t>(d));
      for (int a = 0; a < d; ++a) x[a] = m[a] * spec.axes()[a].spacing;
      const auto w = growth_weights(g, opt.mode, x);
      std::vector<double> vals;
      for (const auto& alpha : alphas) {
        const auto fa = flatten(alpha);
        auto diff = [&](int h) {
          std::vector<double> step(static_cast<std::size_t>(d));
          for (int a = 0; a < d; ++a) step[a] = h * cells[a];
          std::vector<int> mm(static_cast<std::size_t>(d));
          return central_difference(
              [&](const std::vector<double>& off) {
                for (int a = 0; a < d; ++a) mm[a] = m[a] + static_cast<int>(std::lround(off[a]));
                return f.at_lattice(mm);
              },
              fa, step);
        };
        // Differences in cell units; convert by the spacing powers.
        double scale = 1.0;
        for (int a = 0; a < d; ++a) scale *= std::pow(spec.axes()[a].spacing, -fa[a]);
        // The odd-lattice rule doubles values to keep local averages right.
        for (int a = 0; a < d; ++a)
          if (cells[a] == 2) scale *= 0.5;
        const cplx dv = (4.0 * diff(1) - diff(2)) / 3.0 * scale;
        vals.push_back(std::abs(dv) * weight_product(g, w, g.hom_degree(alpha)));
      }
      values[s] = std::move(vals);
      points[s] = std::move(x);
      return;
    }
  });
  auto rep = reduce_samples(opt.mode, alphas, values, points);
  rep.method = "grid";
  return rep;
}

GrowthReport check_growth(const KernelRep& k, const MultiIndex& alpha_max, const GrowthOptions& opt) {
  const ProductGroup& g = k.group();
  require(alpha_max.factors() == g.nu(), "check_growth: alpha_max has the wrong number of factors");
  require(opt.log2_lo <= opt.log2_hi, "check_growth: empty sampling range");
  if (!k.is_function() || uses_grid_data(k)) {
    GridSpec spec = [&] {
      if (const auto* gk = std::get_if<GridKernel>(&k.variant())) return gk->data->spec();
      if (!opt.grid) throw ValidationError("check_growth: this kernel needs a grid for its rendering");
      return *opt.grid;
    }();
    auto rep = check_growth_grid(k.render(spec), alpha_max, opt);
    if (!k.is_function()) {
      rep.valid = false;
      rep.note = "not a function away from the singular set; constants come from the grid rendering and depend on it";
    }
    return rep;
  }
  const auto alphas = multi_indices_below(alpha_max);
  const int q = g.dim();
  const std::size_t n = opt.samples;
  std::vector<std::vector<double>> values(n), points(n);
  bool analytic = true;
  {
    Rng probe = Rng(opt.seed).fork(0);
    const auto t = random_point(g, probe, opt.log2_lo, opt.log2_hi);
    for (const auto& a : alphas) analytic = analytic && k.analytic_derivative(flatten(a), t).has_value();
  }
  const Rng base(opt.seed);
  parallel_for(n, [&](std::size_t s) {
    Rng rng = base.fork(s);
    const auto t = random_point(g, rng, opt.log2_lo, opt.log2_hi);
    const auto w = growth_weights(g, opt.mode, t);
    std::vector<double> vals;
    std::vector<double> p(static_cast<std::size_t>(q));
    for (const auto& alpha : alphas) {
      const auto fa = flatten(alpha);
      cplx dv;
      std::optional<cplx> exact;
      if (analytic) exact = k.analytic_derivative(fa, t);
      if (exact) {
        dv = *exact;
      } else {
        auto diff = [&](double factor) {
          std::vector<double> step(static_cast<std::size_t>(q));
          for (int j = 0; j < q; ++j)
            step[j] = factor * opt.fd_rel * std::pow(w[g.factor_of()[j]], g.weights()[j]);
          return central_difference(
              [&](const std::vector<double>& off) {
                for (int j = 0; j < q; ++j) p[j] = t[j] + off[j];
                return k.eval(p);
              },
              fa, step);
        };
        dv = (4.0 * diff(1.0) - diff(2.0)) / 3.0;
      }
      vals.push_back(std::abs(dv) * weight_product(g, w, g.hom_degree(alpha)));
    }
    values[s] = std::move(vals);
    points[s] = t;
  });
  auto rep = reduce_samples(opt.mode, alphas, values, points);
  rep.method = analytic ? "analytic" : "finite-difference";
  return rep;
}

double bump_profile(double s) {
  s = std::abs(s);
  if (s >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

std::vector<Bump> bump_catalog(const GradedLieAlgebra& g) {
  const auto grp = std::make_shared<const GradedLieAlgebra>(g);
  std::vector<double> c(static_cast<std::size_t>(g.dim()), 0.0);
  c[0] = 0.5;
  const auto cinv = g.invert(c);
  auto shifted = [grp, cinv](std::span<const double> t) {
    return bump_profile(2.0 * grp->hom_norm(grp->multiply(cinv, t)));
  };
  std::vector<Bump> out;
  out.push_back({"even", [grp](std::span<const double> t) { return bump_profile(grp->hom_norm(t)); }});
  out.push_back({"shifted", shifted});
  out.push_back({"odd", [grp, shifted](std::span<const double> t) {
                   const auto m = grp->invert(t);
                   return shifted(t) - shifted(m);
                 }});
  return out;
}

nlohmann::json CancellationReport::to_json() const {
  nlohmann::json es = nlohmann::json::array();
  for (const auto& e : entries) es.push_back({{"R", e.r}, {"bump", e.bump}, {"growth", e.growth.to_json()}});
  nlohmann::json sup = nlohmann::json::object();
  for (const auto& [name, list] : sup_over_r) {
    nlohmann::json l = nlohmann::json::array();
    for (const auto& e : list) l.push_back({{"alpha", e.alpha.parts()}, {"constant", e.constant}});
    sup[name] = l;
  }
  return {{"mu", mu}, {"catalog", catalog}, {"entries", es}, {"sup_over_R", sup}};
}

KernelRep reduce_kernel(const KernelRep& k, int mu, double r, const Bump& bump, const CancellationOptions& opt) {
  const ProductGroup& g = k.group();
  require(g.nu() >= 2, "check_cancellation: needs at least two factors");
  require(mu >= 0 && mu < g.nu(), "check_cancellation: factor index out of range");
  require(r > 0.0, "check_cancellation: R must be positive");
  std::vector<GradedLieAlgebra> rest;
  for (int m = 0; m < g.nu(); ++m)
    if (m != mu) rest.push_back(g.factor(m));
  const ProductGroup reduced(rest);
  const auto& fmu = g.factor(mu);
  const int qmu = fmu.dim();
  std::vector<double> zero(static_cast<std::size_t>(qmu), 0.0);

  // Midpoint nodes covering the support |s| < 1/R, symmetric about 0.
  struct Node {
    std::vector<double> s;
    double w;
  };
  auto midpoint_nodes = [&] {
    const int per_axis = qmu == 1 ? opt.quadrature_points : std::max(16, opt.quadrature_points / 8);
    std::vector<double> half(static_cast<std::size_t>(qmu)), hstep(static_cast<std::size_t>(qmu));
    double vol = 1.0;
    for (int a = 0; a < qmu; ++a) {
      half[a] = std::pow(1.0 / r, fmu.weights()[a]);
      hstep[a] = 2.0 * half[a] / per_axis;
      vol *= hstep[a];
    }
    std::vector<Node> nodes;
    std::vector<int> idx(static_cast<std::size_t>(qmu), 0);
    std::vector<double> s(static_cast<std::size_t>(qmu)), rs;
    while (true) {
      for (int a = 0; a < qmu; ++a) s[a] = -half[a] + (idx[a] + 0.5) * hstep[a];
      const double phi = bump.eval(fmu.dilate(r, s));
      if (phi != 0.0) nodes.push_back({s, phi * vol});
      int a = 0;
      for (; a < qmu; ++a) {
        if (++idx[a] < per_axis) break;
        idx[a] = 0;
      }
      if (a == qmu) break;
    }
    return nodes;
  };

  if (std::holds_alternative<TensorKernel>(k.variant())) {
    auto factors = k.tensor_factors();
    const KernelRep& kmu = factors[static_cast<std::size_t>(mu)];
    cplx c = 0.0;
    if (auto amp = kmu.delta_amplitude()) {
      c = *amp * bump.eval(zero);
    } else {
      for (const auto& nd : midpoint_nodes()) c += kmu.eval(nd.s) * nd.w;
    }
    std::vector<KernelRep> others;
    for (int m = 0; m < g.nu(); ++m)
      if (m != mu) others.push_back(factors[static_cast<std::size_t>(m)]);
    others.front() = others.front().scaled(c);
    return others.size() == 1 ? others.front() : KernelRep::tensor(others);
  }
  if (auto amp = k.delta_amplitude()) return KernelRep::delta(reduced, *amp * bump.eval(zero));

  if (const auto* gk = std::get_if<GridKernel>(&k.variant())) {
    const GridSpec& spec = gk->data->spec();
    for (int a = g.offset(mu); a < g.offset(mu) + qmu; ++a) {
      const auto& ax = spec.axes()[a];
      const double box = std::min(-ax.lo(), ax.hi()) * ax.spacing;
      if (std::pow(1.0 / r, g.weights()[a]) > box)
        throw ValidationError("check_cancellation: quadrature support exceeds the kernel's grid box at R = " +
                              std::to_string(r));
    }
    const GridFunction data = k.render(spec);
    std::vector<Axis> axes;
    for (int a = 0; a < spec.ndim(); ++a)
      if (g.factor_of()[a] != mu) axes.push_back(spec.axes()[a]);
    const GridSpec rspec(reduced, axes, spec.n(), spec.t());
    const GridSpec mspec = spec.factor_spec(mu);
    std::vector<std::pair<std::vector<int>, double>> nodes;
    std::vector<int> mm(static_cast<std::size_t>(qmu));
    std::vector<double> s(static_cast<std::size_t>(qmu));
    for (std::size_t i = 0; i < mspec.size(); ++i) {
      mspec.lattice(i, mm);
      mspec.coords(i, s);
      const double phi = bump.eval(fmu.dilate(r, s));
      if (phi != 0.0) nodes.emplace_back(mm, phi * mspec.cell_volume());
    }
    GridFunction out(rspec);
    parallel_for(rspec.size(), [&](std::size_t i) {
      std::vector<int> rm(static_cast<std::size_t>(rspec.ndim())), full(static_cast<std::size_t>(spec.ndim()));
      rspec.lattice(i, rm);
      cplx acc = 0.0;
      for (const auto& [nm, w] : nodes) {
        int ri = 0;
        for (int a = 0; a < spec.ndim(); ++a) full[a] = g.factor_of()[a] == mu ? nm[a - g.offset(mu)] : rm[ri++];
        acc += data.at_lattice(full) * w;
      }
      out[i] = acc;
    });
    return KernelRep::grid(std::move(out), gk->principal_value);
  }

  const GridSpec rspec = opt.reduced_grid ? *opt.reduced_grid : GridSpec::make(reduced, 64, 4.0);
  require(rspec.group() == reduced, "check_cancellation: reduced grid has the wrong group");
  const auto nodes = midpoint_nodes();
  GridFunction out(rspec);
  parallel_for(rspec.size(), [&](std::size_t i) {
    const auto x = rspec.coords(i);
    std::vector<double> full(static_cast<std::size_t>(g.dim()));
    cplx acc = 0.0;
    for (const auto& nd : nodes) {
      int ri = 0;
      for (int a = 0; a < g.dim(); ++a)
        full[a] = g.factor_of()[a] == mu ? nd.s[a - g.offset(mu)] : x[ri++];
      acc += k.eval(full) * nd.w;
    }
    out[i] = acc;
  });
  return KernelRep::grid(std::move(out), true);
}

CancellationReport check_cancellation(const KernelRep& k, int mu, const std::vector<double>& r_list,
                                      const std::vector<Bump>& bumps, const MultiIndex& alpha_max,
                                      const CancellationOptions& opt) {
  const ProductGroup& g = k.group();
  require(alpha_max.factors() == g.nu(), "check_cancellation: alpha_max has the wrong number of factors");
  require(!r_list.empty() && !bumps.empty(), "check_cancellation: empty R list or bump set");
  std::vector<std::vector<int>> rest_parts;
  for (int m = 0; m < g.nu(); ++m)
    if (m != mu) rest_parts.push_back(alpha_max.part(m));
  const MultiIndex rest_alpha(rest_parts);
  CancellationReport rep;
  rep.mu = mu;
  for (const auto& b : bumps) {
    rep.catalog.push_back(b.name);
    std::vector<GrowthEntry> sup;
    for (double r : r_list) {
      const KernelRep red = reduce_kernel(k, mu, r, b, opt);
      GrowthOptions gopt = opt.growth;
      if (!gopt.grid || !(gopt.grid->group() == red.group()))
        gopt.grid = opt.reduced_grid ? *opt.reduced_grid : GridSpec::make(red.group(), 64, 4.0);
      auto gr = check_growth(red, rest_alpha, gopt);
      if (sup.empty()) {
        sup = gr.entries;
      } else {
        for (std::size_t a = 0; a < sup.size(); ++a)
          if (gr.entries[a].constant > sup[a].constant) sup[a] = gr.entries[a];
      }
      rep.entries.push_back({r, b.name, std::move(gr)});
    }
    rep.sup_over_r.emplace_back(b.name, std::move(sup));
  }
  return rep;
}

}  // namespace nilconv
