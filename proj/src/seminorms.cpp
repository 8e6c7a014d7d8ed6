#include "nilconv/seminorms.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "nilconv/error.hpp"
#include "nilconv/grid_fields.hpp"
#include "nilconv/kernel_checks.hpp"
#include "nilconv/parallel.hpp"

namespace nilconv {

namespace {

// Lattice points of one factor with bump weights.
struct FactorSet {
  std::vector<std::vector<int>> pts;
  std::vector<double> vals;
};

FactorSet all_points(const GridSpec& fs) {
  FactorSet s;
  std::vector<int> m(static_cast<std::size_t>(fs.ndim()));
  for (std::size_t i = 0; i < fs.size(); ++i) {
    fs.lattice(i, m);
    s.pts.push_back(m);
    s.vals.push_back(1.0);
  }
  return s;
}

FactorSet bump_support(const GridSpec& fs, std::span<const double> center, double radius) {
  const auto& g = fs.group().factor(0);
  const auto cinv = g.invert(center);
  FactorSet s;
  std::vector<int> m(static_cast<std::size_t>(fs.ndim()));
  std::vector<double> x(static_cast<std::size_t>(fs.ndim()));
  for (std::size_t i = 0; i < fs.size(); ++i) {
    fs.coords(i, x);
    const double v = bump_profile(g.hom_norm(g.multiply(cinv, x)) / radius);
    if (v == 0.0) continue;
    fs.lattice(i, m);
    s.pts.push_back(m);
    s.vals.push_back(v);
  }
  return s;
}

// Every point keeps `margin` cells from the edge of the factor grid.
bool fits(const GridSpec& fs, const FactorSet& s, int margin) {
  for (const auto& m : s.pts)
    for (int a = 0; a < fs.ndim(); ++a)
      if (m[a] < fs.axes()[a].lo() + margin || m[a] > fs.axes()[a].hi() - margin) return false;
  return true;
}

// No point within `reach` cells (per axis) of the phi support lies in the
// gamma support.
bool stencil_clear(const FactorSet& phi, const FactorSet& gamma, int reach) {
  if (gamma.pts.empty() || phi.pts.empty()) return true;
  const std::size_t q = phi.pts.front().size();
  std::vector<int> lo(q, 1 << 30), hi(q, -(1 << 30));
  for (const auto& m : phi.pts)
    for (std::size_t a = 0; a < q; ++a) {
      lo[a] = std::min(lo[a], m[a] - reach);
      hi[a] = std::max(hi[a], m[a] + reach);
    }
  std::set<std::vector<int>> near;
  for (const auto& g : gamma.pts) {
    bool inside = true;
    for (std::size_t a = 0; a < q && inside; ++a) inside = g[a] >= lo[a] && g[a] <= hi[a];
    if (inside) near.insert(g);
  }
  if (near.empty()) return true;
  for (const auto& p : phi.pts)
    for (const auto& g : near) {
      bool close = true;
      for (std::size_t a = 0; a < q && close; ++a) close = std::abs(g[a] - p[a]) <= reach;
      if (close) return false;
    }
  return true;
}

struct Assembled {
  std::vector<std::vector<int>> pts;  // full lattice points
  std::vector<double> vals;
};

Assembled assemble(const ProductGroup& g, const std::vector<const FactorSet*>& parts) {
  Assembled out;
  std::vector<std::size_t> idx(parts.size(), 0);
  for (const auto* p : parts)
    if (p->pts.empty()) return out;
  std::vector<int> full(static_cast<std::size_t>(g.dim()));
  while (true) {
    double v = 1.0;
    for (int mu = 0; mu < g.nu(); ++mu) {
      const auto& pm = parts[mu]->pts[idx[mu]];
      std::copy(pm.begin(), pm.end(), full.begin() + g.offset(mu));
      v *= parts[mu]->vals[idx[mu]];
    }
    out.pts.push_back(full);
    out.vals.push_back(v);
    int mu = g.nu() - 1;
    for (; mu >= 0; --mu) {
      if (++idx[mu] < parts[mu]->pts.size()) break;
      idx[mu] = 0;
    }
    if (mu < 0) break;
  }
  return out;
}

OpNormEstimate block_core(const BlockKernel& k, const FieldStencils& fields, const MultiIndex& alpha,
                          const Assembled& rows, const Assembled& cols, int max_iter, double tol,
                          std::uint64_t seed) {
  const std::size_t p = rows.pts.size(), n = cols.pts.size();
  if (p == 0 || n == 0) return {};
  const GridSpec& dom = k.domain();
  const double vol = dom.cell_volume();
  std::vector<cplx> a(p * n, 0.0);
  std::vector<int> xp(static_cast<std::size_t>(dom.ndim()));
  for (std::size_t r = 0; r < p; ++r) {
    const auto st = fields.at(alpha, rows.pts[r]);
    for (std::size_t s = 0; s < st.offsets.size(); ++s) {
      for (int ax = 0; ax < dom.ndim(); ++ax) xp[ax] = rows.pts[r][ax] + st.offsets[s][ax];
      if (!dom.in_range(xp)) continue;
      const double w = st.weights[s] * rows.vals[r] * vol;
      for (std::size_t c = 0; c < n; ++c) {
        const cplx kv = k.at(xp, cols.pts[c]);
        if (kv != 0.0) a[r * n + c] += w * kv * cols.vals[c];
      }
    }
  }
  auto normal = [&](const std::vector<cplx>& v) {
    std::vector<cplx> u(p, 0.0), out(n, 0.0);
    for (std::size_t r = 0; r < p; ++r) {
      cplx acc = 0.0;
      const cplx* row = &a[r * n];
      for (std::size_t c = 0; c < n; ++c) acc += row[c] * v[c];
      u[r] = acc;
    }
    for (std::size_t r = 0; r < p; ++r) {
      const cplx* row = &a[r * n];
      const cplx ur = u[r];
      if (ur == 0.0) continue;
      for (std::size_t c = 0; c < n; ++c) out[c] += std::conj(row[c]) * ur;
    }
    return out;
  };
  return power_iteration(normal, n, max_iter, tol, seed);
}

const FactorSet* require_fit(const GridSpec& fs, const FactorSet& s, int margin, const char* what) {
  if (!fits(fs, s, margin)) throw ValidationError(std::string("localized_block: ") + what + " support exceeds the grid");
  return &s;
}

}  // namespace

nlohmann::json BumpSpec::to_json() const { return {{"mu", mu}, {"center", center}, {"radius", radius}}; }

GridFunction bump_values(const GridSpec& domain, const std::vector<BumpSpec>& bumps) {
  const ProductGroup& g = domain.group();
  GridFunction out = GridFunction::sample(domain, [](std::span<const double>) { return cplx(1.0); });
  std::vector<double> x(static_cast<std::size_t>(domain.ndim()));
  for (const auto& b : bumps) {
    require(b.mu >= 0 && b.mu < g.nu(), "bump: factor out of range");
    require(static_cast<int>(b.center.size()) == g.dim(b.mu), "bump: center has the wrong dimension");
    require(b.radius > 0.0, "bump: radius must be positive");
    const auto& f = g.factor(b.mu);
    const auto cinv = f.invert(b.center);
    for (std::size_t i = 0; i < domain.size(); ++i) {
      domain.coords(i, x);
      const std::span<const double> xm(&x[g.offset(b.mu)], static_cast<std::size_t>(g.dim(b.mu)));
      out[i] *= bump_profile(f.hom_norm(f.multiply(cinv, xm)) / b.radius);
    }
  }
  return out;
}

BlockKernel::BlockKernel(const KernelRep& k, const GridSpec& domain)
    : domain_(domain), kernel_(symmetric_support(k.render(domain.kernel_grid()))) {}

BlockKernel::BlockKernel(const GridFunction& kernel_on_kernel_grid, const GridSpec& domain)
    : domain_(domain), kernel_(symmetric_support(kernel_on_kernel_grid)) {
  require(kernel_.spec().same_spacing(domain), "seminorm: kernel grid and domain must share spacing");
}

cplx BlockKernel::at(std::span<const int> x, std::span<const int> y) const {
  const ProductGroup& g = domain_.group();
  int diff[64];
  double xs[16], ys[16], zs[16];
  for (int mu = 0; mu < g.nu(); ++mu) {
    const int o = g.offset(mu), q = g.dim(mu);
    const auto& f = g.factor(mu);
    if (f.is_abelian()) {
      for (int a = o; a < o + q; ++a) diff[a] = x[a] - y[a];
    } else {
      for (int a = 0; a < q; ++a) {
        const double h = domain_.axes()[o + a].spacing;
        xs[a] = x[o + a] * h;
        ys[a] = -y[o + a] * h;
      }
      f.multiply_into(std::span<const double>(xs, q), std::span<const double>(ys, q), std::span<double>(zs, q));
      for (int a = 0; a < q; ++a) diff[o + a] = static_cast<int>(std::lround(zs[a] / domain_.axes()[o + a].spacing));
    }
  }
  return kernel_.at_lattice(std::span<const int>(diff, static_cast<std::size_t>(g.dim())));
}

OpNormEstimate localized_block(const BlockKernel& k, const MultiIndex& alpha, const std::vector<BumpSpec>& phi,
                               const std::vector<BumpSpec>& gamma, const BlockOptions& opt) {
  const GridSpec& dom = k.domain();
  const ProductGroup& g = dom.group();
  require(alpha.factors() == g.nu(), "localized_block: multi-index has the wrong number of factors");
  std::vector<FactorSet> everything, phis(static_cast<std::size_t>(g.nu())), gams(static_cast<std::size_t>(g.nu()));
  std::vector<const FactorSet*> rp(static_cast<std::size_t>(g.nu()), nullptr), cp = rp;
  for (int mu = 0; mu < g.nu(); ++mu) everything.push_back(all_points(dom.factor_spec(mu)));
  for (int mu = 0; mu < g.nu(); ++mu) {
    rp[mu] = &everything[mu];
    cp[mu] = &everything[mu];
  }
  auto find = [](const std::vector<BumpSpec>& v, int mu) -> const BumpSpec* {
    for (const auto& b : v)
      if (b.mu == mu) return &b;
    return nullptr;
  };
  for (int mu = 0; mu < g.nu(); ++mu) {
    const BumpSpec* bp = find(phi, mu);
    const BumpSpec* bg = find(gamma, mu);
    require((bp == nullptr) == (bg == nullptr), "localized_block: phi and gamma must localize the same factors");
    if (!bp) continue;
    require(static_cast<int>(bp->center.size()) == g.dim(mu) && static_cast<int>(bg->center.size()) == g.dim(mu),
            "localized_block: bump center has the wrong dimension");
    const GridSpec fs = dom.factor_spec(mu);
    const int reach = alpha.isotropic(mu);
    phis[mu] = bump_support(fs, bp->center, bp->radius);
    gams[mu] = bump_support(fs, bg->center, bg->radius);
    rp[mu] = require_fit(fs, phis[mu], reach + 1, "phi");
    cp[mu] = require_fit(fs, gams[mu], 1, "gamma");
    if (!stencil_clear(phis[mu], gams[mu], reach))
      throw ValidationError("localized_block: the derivative stencil reaches the gamma support");
    if (static_cast<std::size_t>(mu) < opt.separation.size() && opt.separation[mu] > 0.0) {
      const auto& f = g.factor(mu);
      const double d = f.hom_norm(f.multiply(f.invert(bp->center), bg->center));
      if (d < opt.separation[mu] * std::max(bp->radius, bg->radius))
        throw ValidationError("localized_block: separation violated on factor " + std::to_string(mu + 1));
    }
  }
  const FieldStencils fields(dom);
  return block_core(k, fields, alpha, assemble(g, rp), assemble(g, cp), opt.max_iter, opt.tol, opt.seed);
}

OpNormEstimate localized_block(const KernelRep& k, const GridSpec& domain, const MultiIndex& alpha,
                               const std::vector<BumpSpec>& phi, const std::vector<BumpSpec>& gamma,
                               const BlockOptions& opt) {
  return localized_block(BlockKernel(k, domain), alpha, phi, gamma, opt);
}

void SeminormConfig::validate() const {
  require(j_max - j_min >= 2, "seminorm: the scale window needs j_max - j_min >= 2");
  require(center_stride >= 1, "seminorm: center_stride must be positive");
  require(center_shells >= 0.0, "seminorm: center_shells must be nonnegative");
  require(separation > 0.0 && triangle_safety >= 1.0, "seminorm: bad separation constants");
  require(triangle_samples >= 1000, "seminorm: triangle_samples must be at least 1000");
  require(max_iter >= 8, "seminorm: max_iter must be at least 8");
  require(bump == "exp-bump", "seminorm: unknown bump profile '" + bump + "'");
}

nlohmann::json SeminormConfig::to_json() const {
  return {{"j_min", j_min},
          {"j_max", j_max},
          {"center_stride", center_stride},
          {"center_shells", center_shells},
          {"separation", separation},
          {"triangle_safety", triangle_safety},
          {"triangle_samples", triangle_samples},
          {"max_iter", max_iter},
          {"tol", tol},
          {"seed", seed},
          {"bump", bump},
          {"keep_surface", keep_surface}};
}

SeminormConfig SeminormConfig::from_json(const nlohmann::json& j, const std::string& where) {
  SeminormConfig c;
  if (!j.is_object()) throw ValidationError(where + ": seminorm config must be an object");
  auto get = [&](const char* key, auto& field) {
    if (!j.contains(key)) return;
    try {
      field = j.at(key).get<std::decay_t<decltype(field)>>();
    } catch (const nlohmann::json::exception&) {
      throw ValidationError(where + "/" + key + ": wrong type");
    }
  };
  get("j_min", c.j_min);
  get("j_max", c.j_max);
  get("center_stride", c.center_stride);
  get("center_shells", c.center_shells);
  get("separation", c.separation);
  get("triangle_safety", c.triangle_safety);
  get("triangle_samples", c.triangle_samples);
  get("max_iter", c.max_iter);
  get("tol", c.tol);
  get("seed", c.seed);
  get("bump", c.bump);
  get("keep_surface", c.keep_surface);
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!c.to_json().contains(it.key())) throw ValidationError(where + "/" + it.key() + ": unknown key");
  c.validate();
  return c;
}

nlohmann::json BlockSample::to_json() const {
  return {{"alpha", alpha.parts()}, {"factors", mu},     {"j", j},         {"l", l},
          {"z", z},                 {"block", block},    {"weight", weight}, {"value", value},
          {"residual", residual}};
}

nlohmann::json SeminormTerm::to_json(int nu) const {
  nlohmann::json as = nlohmann::json::array();
  for (const auto& a : alphas) {
    nlohmann::json e = {{"alpha", a.alpha.parts()}, {"sup", a.sup}, {"blocks", a.blocks}};
    e["argmax"] = a.argmax ? a.argmax->to_json() : nlohmann::json(nullptr);
    as.push_back(e);
  }
  nlohmann::json j = {{"label", label}, {"k", k}, {"value", value}, {"alphas", as}};
  if (flag_mu >= 0) j["flag_factor"] = flag_mu + 1;
  else j["subset"] = subset.to_string(nu);
  return j;
}

const SeminormTerm& SeminormReport::subset(SubsetMask s) const {
  for (const auto& t : subsets)
    if (t.subset == s) return t;
  throw ValidationError("seminorm report: subset not present");
}

nlohmann::json SeminormReport::to_json() const {
  const int nu = static_cast<int>(k.size());
  nlohmann::json sub = nlohmann::json::array(), fl = nlohmann::json::array();
  for (const auto& t : subsets) sub.push_back(t.to_json(nu));
  for (const auto& t : flag_terms) fl.push_back(t.to_json(nu));
  nlohmann::json j = {{"kind", flag ? "flag" : "product"},
                      {"estimator", true},
                      {"k", k},
                      {"op_norm", op_norm},
                      {"op_norm_residual", op_norm_residual},
                      {"subsets", sub},
                      {"total", total},
                      {"triangle_constants", triangle},
                      {"grid", grid},
                      {"config", config},
                      {"lattice", lattice}};
  if (flag) {
    j["flag_terms"] = fl;
    j["flag_total"] = flag_total;
  }
  return j;
}

std::string SeminormReport::surface_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "factors,alpha,j,l,z_norm,block,weight,value\n";
  for (const auto& s : surface) {
    std::string f, j, l, z;
    for (std::size_t i = 0; i < s.mu.size(); ++i) {
      const char* sep = i ? ";" : "";
      f += sep + std::to_string(s.mu[i] + 1);
      j += sep + std::to_string(s.j[i]);
      l += sep + std::to_string(s.l[i]);
    }
    os << f << ',' << s.alpha.to_string() << ',' << j << ',' << l << ',';
    for (std::size_t i = 0; i < s.z.size(); ++i) {
      double n2 = 0.0;
      for (double v : s.z[i]) n2 += v * v;
      os << (i ? ";" : "") << std::sqrt(n2);
    }
    os << ',' << s.block << ',' << s.weight << ',' << s.value << '\n';
  }
  return os.str();
}

SeminormEstimator::SeminormEstimator(const KernelRep& k, const GridSpec& domain, SeminormConfig cfg,
                                     ConvolveOptions conv)
    : block_(k, domain), cfg_(std::move(cfg)) {
  op_ = std::make_shared<const DiscreteOperator>(k, domain, conv);
  init(conv);
}

SeminormEstimator::SeminormEstimator(const GridFunction& kernel_on_kernel_grid, const GridSpec& domain,
                                     SeminormConfig cfg, ConvolveOptions conv)
    : block_(kernel_on_kernel_grid, domain), cfg_(std::move(cfg)) {
  op_ = std::make_shared<const DiscreteOperator>(kernel_on_kernel_grid, domain, conv);
  init(conv);
}

void SeminormEstimator::init(ConvolveOptions) {
  cfg_.validate();
  const ProductGroup& g = domain().group();
  for (int mu = 0; mu < g.nu(); ++mu)
    triangle_.push_back(cfg_.triangle_safety * triangle_constant(g.factor(mu), cfg_.triangle_samples, cfg_.seed));
  op_norm_ = nilconv::op_norm(*op_, 500, 1e-10, cfg_.seed);
}

const OpNormEstimate& SeminormEstimator::op_norm() const { return *op_norm_; }

std::vector<SeminormEstimator::Triple> SeminormEstimator::triples(int mu, int reach) const {
  const GridSpec fs = domain().factor_spec(mu);
  const auto& f = domain().group().factor(mu);
  const double c = triangle_[mu];
  std::vector<Triple> out;
  std::vector<int> m(static_cast<std::size_t>(fs.ndim()));
  const std::vector<double> origin(static_cast<std::size_t>(fs.ndim()), 0.0);
  for (int j = cfg_.j_min; j <= cfg_.j_max; ++j) {
    const FactorSet phi = bump_support(fs, origin, std::exp2(j));
    if (!fits(fs, phi, reach + 1)) continue;
    for (int l = cfg_.j_min; l <= cfg_.j_max; ++l) {
      const double sep = cfg_.separation * c * std::exp2(std::max(j, l));
      for (std::size_t i = 0; i < fs.size(); ++i) {
        fs.lattice(i, m);
        bool on = true;
        for (int v : m) on = on && v % cfg_.center_stride == 0;
        if (!on) continue;
        const auto z = fs.coords(i);
        const double zn = f.hom_norm(z);
        if (zn < sep || zn == 0.0) continue;
        if (cfg_.center_shells > 0.0 && zn > cfg_.center_shells * sep) continue;
        const FactorSet gam = bump_support(fs, z, std::exp2(l));
        if (!fits(fs, gam, 1) || !stencil_clear(phi, gam, reach)) continue;
        out.push_back({j, l, z, zn});
      }
    }
  }
  return out;
}

SeminormTerm SeminormEstimator::localized_term(std::span<const int> k, const std::vector<int>& loc,
                                               const std::vector<MultiIndex>& alphas,
                                               const std::vector<int>& weight_factors, std::string label,
                                               std::vector<BlockSample>* surface) const {
  const GridSpec& dom = domain();
  const ProductGroup& g = dom.group();
  SeminormTerm term;
  term.label = std::move(label);
  term.k.assign(k.begin(), k.end());
  // Triples per localized factor, with the largest stencil reach needed.
  std::vector<std::vector<Triple>> trip;
  for (int mu : loc) {
    int reach = 0;
    for (const auto& a : alphas) reach = std::max(reach, a.isotropic(mu));
    trip.push_back(triples(mu, reach));
  }
  std::size_t combos = 1;
  for (const auto& t : trip) combos *= t.size();
  std::vector<FactorSet> everything;
  for (int mu = 0; mu < g.nu(); ++mu) everything.push_back(all_points(dom.factor_spec(mu)));
  const FieldStencils fields(dom);
  const std::size_t jobs = combos * alphas.size();
  std::vector<BlockSample> results(jobs);
  parallel_for(jobs, [&](std::size_t job) {
    const std::size_t a = job / std::max<std::size_t>(combos, 1);
    std::size_t rem = job % std::max<std::size_t>(combos, 1);
    std::vector<const Triple*> chosen(loc.size());
    for (std::size_t i = loc.size(); i-- > 0;) {
      chosen[i] = &trip[i][rem % trip[i].size()];
      rem /= trip[i].size();
    }
    std::vector<FactorSet> phis(loc.size()), gams(loc.size());
    std::vector<const FactorSet*> rp, cp;
    for (int mu = 0; mu < g.nu(); ++mu) {
      rp.push_back(&everything[mu]);
      cp.push_back(&everything[mu]);
    }
    BlockSample s;
    s.alpha = alphas[a];
    s.mu = loc;
    double weight = 1.0;
    for (std::size_t i = 0; i < loc.size(); ++i) {
      const int mu = loc[i];
      const GridSpec fs = dom.factor_spec(mu);
      phis[i] = bump_support(fs, std::vector<double>(static_cast<std::size_t>(g.dim(mu)), 0.0), std::exp2(chosen[i]->j));
      gams[i] = bump_support(fs, chosen[i]->z, std::exp2(chosen[i]->l));
      rp[mu] = &phis[i];
      cp[mu] = &gams[i];
      s.j.push_back(chosen[i]->j);
      s.l.push_back(chosen[i]->l);
      s.z.push_back(chosen[i]->z);
    }
    const auto deg = g.hom_degree(alphas[a]);
    for (std::size_t i = 0; i < loc.size(); ++i) {
      int expo = 0;
      for (int nu : weight_factors)
        if (nu == loc[i] || (loc.size() == 1 && nu > loc[i])) expo += g.homogeneous_dimension(nu) + deg[nu];
      weight *= std::pow(chosen[i]->znorm, expo);
    }
    const auto est = block_core(block_, fields, alphas[a], assemble(g, rp), assemble(g, cp), cfg_.max_iter, cfg_.tol,
                                cfg_.seed);
    s.block = est.value;
    s.residual = est.residual;
    s.weight = weight;
    s.value = est.value * weight;
    results[job] = std::move(s);
  });
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    AlphaTerm at;
    at.alpha = alphas[a];
    for (std::size_t c = 0; c < combos; ++c) {
      const auto& r = results[a * combos + c];
      ++at.blocks;
      if (!at.argmax || r.value > at.sup) {
        at.sup = r.value;
        at.argmax = r;
      }
    }
    term.value += at.sup;
    term.alphas.push_back(std::move(at));
  }
  if (surface)
    for (auto& r : results) surface->push_back(std::move(r));
  return term;
}

SeminormTerm SeminormEstimator::subset_term(std::span<const int> k, SubsetMask s,
                                            std::vector<BlockSample>* surface) const {
  const ProductGroup& g = domain().group();
  require(static_cast<int>(k.size()) == g.nu(), "seminorm: order vector has the wrong length");
  for (int v : k) require(v >= 0, "seminorm: orders must be nonnegative");
  if (s.empty()) {
    SeminormTerm t;
    t.label = "{}";
    t.subset = s;
    t.k = zero_outside(k, s);
    t.value = op_norm().value;
    AlphaTerm at;
    at.alpha = MultiIndex::zero(g.dims());
    at.sup = t.value;
    at.blocks = 1;
    t.alphas.push_back(at);
    return t;
  }
  const auto members = s.members(g.nu());
  const auto ks = zero_outside(k, s);
  auto t = localized_term(ks, members, g.multi_indices_up_to(ks, s), members, s.to_string(g.nu()), surface);
  t.subset = s;
  return t;
}

SeminormTerm SeminormEstimator::flag_term(std::span<const int> k, int mu, std::vector<BlockSample>* surface) const {
  const ProductGroup& g = domain().group();
  require(static_cast<int>(k.size()) == g.nu(), "seminorm: order vector has the wrong length");
  require(mu >= 0 && mu < g.nu(), "seminorm: flag factor out of range");
  std::uint32_t bits = 0;
  std::vector<int> tail;
  for (int nu = mu; nu < g.nu(); ++nu) {
    bits |= 1u << nu;
    tail.push_back(nu);
  }
  const auto kt = zero_outside(k, SubsetMask(bits));
  auto t = localized_term(kt, {mu}, g.multi_indices_up_to(kt, SubsetMask(bits)), tail,
                          "flag{" + std::to_string(mu + 1) + "}", surface);
  t.flag_mu = mu;
  t.subset = SubsetMask::single(mu);
  return t;
}

nlohmann::json SeminormEstimator::lattice_json(std::span<const int> k) const {
  nlohmann::json out = nlohmann::json::array();
  for (int mu = 0; mu < domain().group().nu(); ++mu) {
    nlohmann::json l = nlohmann::json::array();
    for (const auto& t : triples(mu, k[mu])) l.push_back({{"j", t.j}, {"l", t.l}, {"z", t.z}});
    out.push_back({{"factor", mu + 1}, {"triangle_constant", triangle_[mu]}, {"triples", l}});
  }
  return out;
}

SeminormReport SeminormEstimator::pk(std::span<const int> k) const {
  const ProductGroup& g = domain().group();
  SeminormReport rep;
  rep.k.assign(k.begin(), k.end());
  rep.op_norm = op_norm().value;
  rep.op_norm_residual = op_norm().residual;
  rep.triangle = triangle_;
  rep.grid = domain().to_json();
  rep.config = cfg_.to_json();
  rep.lattice = lattice_json(k);
  std::vector<BlockSample>* surf = cfg_.keep_surface ? &rep.surface : nullptr;
  for (const auto s : SubsetMask::enumerate(g.nu())) {
    rep.subsets.push_back(subset_term(k, s, surf));
    rep.total += rep.subsets.back().value;
  }
  return rep;
}

SeminormReport SeminormEstimator::fk(std::span<const int> k) const {
  SeminormReport rep = pk(k);
  rep.flag = true;
  rep.flag_total = rep.total;
  std::vector<BlockSample>* surf = cfg_.keep_surface ? &rep.surface : nullptr;
  for (int mu = 0; mu < domain().group().nu(); ++mu) {
    rep.flag_terms.push_back(flag_term(k, mu, surf));
    rep.flag_total += rep.flag_terms.back().value;
  }
  return rep;
}

SeminormReport pk_seminorm(const KernelRep& k, std::span<const int> order, const GridSpec& domain,
                           const SeminormConfig& cfg) {
  return SeminormEstimator(k, domain, cfg).pk(order);
}

SeminormReport fk_seminorm(const KernelRep& k, std::span<const int> order, const GridSpec& domain,
                           const SeminormConfig& cfg) {
  return SeminormEstimator(k, domain, cfg).fk(order);
}

}  // namespace nilconv
