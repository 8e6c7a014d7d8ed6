#include "nilconv/dyadic.hpp"

#include <algorithm>
#include <cmath>

#include "nilconv/error.hpp"
#include "nilconv/rng.hpp"

namespace nilconv {

namespace {

constexpr double kFamilySigma = 0.7;

double ipow(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

// Orthonormal basis of span{s^beta w} in the 1/w inner product, stored
// through its polynomial parts P_i = e_i / w sampled on the factor grid.
struct MomentBasis {
  std::vector<std::vector<int>> exps;
  std::vector<double> sigma;
  std::vector<double> w;                 // window per point
  std::vector<std::vector<double>> p;    // P_i per point
  std::vector<std::vector<double>> r;    // P_i = sum_k r[i][k] s^{exps[k]}
  double vol = 1.0;
};

MomentBasis build_basis(const GridSpec& fs, int moment_order) {
  MomentBasis b;
  const int q = fs.ndim();
  b.exps = monomial_exponents(q, moment_order);
  for (const auto& a : fs.axes()) {
    const double hw = 0.5 * a.count * a.spacing;
    b.sigma.push_back(std::max(hw / 10.0, 1.5 * a.spacing));
  }
  b.vol = fs.cell_volume();
  const std::size_t npts = fs.size();
  std::vector<std::vector<double>> s(npts, std::vector<double>(static_cast<std::size_t>(q)));
  b.w.resize(npts);
  std::vector<double> x(static_cast<std::size_t>(q));
  for (std::size_t i = 0; i < npts; ++i) {
    fs.coords(i, x);
    double e = 0.0;
    for (int a = 0; a < q; ++a) {
      s[i][a] = x[a] / b.sigma[a];
      e += s[i][a] * s[i][a];
    }
    b.w[i] = std::exp(-0.5 * e);
  }
  const std::size_t nb = b.exps.size();
  auto dot = [&](const std::vector<double>& u, const std::vector<double>& v) {
    double acc = 0.0;
    for (std::size_t i = 0; i < npts; ++i) acc += u[i] * v[i] * b.w[i];
    return acc * b.vol;
  };
  for (std::size_t k = 0; k < nb; ++k) {
    std::vector<double> v(npts);
    for (std::size_t i = 0; i < npts; ++i) {
      double m = 1.0;
      for (int a = 0; a < q; ++a) m *= ipow(s[i][a], b.exps[k][a]);
      v[i] = m;
    }
    std::vector<double> coef(nb, 0.0);
    coef[k] = 1.0;
    const double n0 = std::sqrt(dot(v, v));
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t j = 0; j < b.p.size(); ++j) {
        const double c = dot(v, b.p[j]);
        for (std::size_t i = 0; i < npts; ++i) v[i] -= c * b.p[j][i];
        for (std::size_t m = 0; m < nb; ++m) coef[m] -= c * b.r[j][m];
      }
    }
    const double n1 = std::sqrt(dot(v, v));
    if (!(n1 > 1e-10 * n0))
      throw ValidationError("enforce_moments: degenerate moment basis, grid too coarse for order " +
                            std::to_string(moment_order));
    for (auto& e : v) e /= n1;
    for (auto& e : coef) e /= n1;
    b.p.push_back(std::move(v));
    b.r.push_back(std::move(coef));
  }
  return b;
}

// Flat offsets of the factor-mu part and of the complementary part.
void split_offsets(const GridSpec& spec, int mu, std::vector<std::size_t>& inner, std::vector<std::size_t>& outer) {
  const auto& g = spec.group();
  const int o = g.offset(mu), q = g.dim(mu);
  inner.assign(1, 0);
  outer.assign(1, 0);
  for (int a = 0; a < spec.ndim(); ++a) {
    auto& target = (a >= o && a < o + q) ? inner : outer;
    std::vector<std::size_t> next;
    next.reserve(target.size() * static_cast<std::size_t>(spec.axes()[a].count));
    for (std::size_t base : target)
      for (int c = 0; c < spec.axes()[a].count; ++c) next.push_back(base + static_cast<std::size_t>(c) * spec.stride(a));
    target = std::move(next);
  }
}

GridSpec unit_factor_spec(const GradedLieAlgebra& g, int samples, double hw) {
  std::vector<Axis> axes(static_cast<std::size_t>(g.dim()), Axis{samples, 2.0 * hw / samples});
  return GridSpec(ProductGroup::single(g), axes, samples, hw);
}

int default_samples(int q) { return q >= 3 ? 32 : 64; }

}  // namespace

std::string to_string(ProfileFamily f) {
  switch (f) {
    case ProfileFamily::GaussianDerivative: return "gaussian-derivative";
    case ProfileFamily::MexicanHat: return "mexican-hat";
    case ProfileFamily::RandomSmooth: return "random-smooth";
  }
  return "?";
}

ProfileFamily profile_family_from_string(const std::string& s) {
  if (s == "gaussian-derivative") return ProfileFamily::GaussianDerivative;
  if (s == "mexican-hat") return ProfileFamily::MexicanHat;
  if (s == "random-smooth") return ProfileFamily::RandomSmooth;
  throw ValidationError("unknown profile family '" + s + "'");
}

std::vector<std::vector<int>> monomial_exponents(int q, int moment_order) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(static_cast<std::size_t>(q), 0);
  for (int deg = 0; deg <= moment_order; ++deg) {
    auto rec = [&](auto&& self, int pos, int left) -> void {
      if (pos == q - 1) {
        cur[pos] = left;
        out.push_back(cur);
        return;
      }
      for (int v = left; v >= 0; --v) {
        cur[pos] = v;
        self(self, pos + 1, left - v);
      }
    };
    rec(rec, 0, deg);
  }
  return out;
}

double FactorFunction::raw(std::span<const double> t) const {
  double r2 = 0.0;
  for (double v : t) r2 += v * v;
  switch (family) {
    case ProfileFamily::GaussianDerivative:
      return -t[0] / (kFamilySigma * kFamilySigma) * std::exp(-0.5 * r2 / (kFamilySigma * kFamilySigma));
    case ProfileFamily::MexicanHat: {
      const double u = r2 / (kFamilySigma * kFamilySigma);
      return (q - u) * std::exp(-0.5 * u);
    }
    case ProfileFamily::RandomSmooth: {
      double s = 0.0;
      for (std::size_t b = 0; b < amps.size(); ++b) {
        double d2 = 0.0;
        for (std::size_t a = 0; a < t.size(); ++a) d2 += (t[a] - centers[b][a]) * (t[a] - centers[b][a]);
        s += amps[b] * std::exp(-0.5 * d2 / (widths[b] * widths[b]));
      }
      return s;
    }
  }
  return 0.0;
}

double FactorFunction::eval(std::span<const double> t) const {
  for (double v : t)
    if (v < -half_width || v > half_width) return 0.0;
  double out = raw(t);
  if (exponents.empty()) return out;
  double e = 0.0;
  double corr = 0.0;
  std::vector<double> s(t.size());
  for (std::size_t a = 0; a < t.size(); ++a) {
    s[a] = t[a] / window_sigma[a];
    e += s[a] * s[a];
  }
  for (std::size_t k = 0; k < exponents.size(); ++k) {
    double m = poly[k];
    for (std::size_t a = 0; a < t.size(); ++a) m *= ipow(s[a], exponents[k][a]);
    corr += m;
  }
  return out - std::exp(-0.5 * e) * corr;
}

DyadicWindow DyadicWindow::cube(int nu, int lo, int hi) {
  return {std::vector<int>(static_cast<std::size_t>(nu), lo), std::vector<int>(static_cast<std::size_t>(nu), hi)};
}

DyadicDecomposition::DyadicDecomposition(ProductGroup group, DyadicWindow window, DyadicOptions options,
                                         std::vector<ScaleTerm> scales, std::vector<double> bounds)
    : group_(std::move(group)),
      window_(std::move(window)),
      options_(options),
      scales_(std::move(scales)),
      bounds_(std::move(bounds)) {}

int DyadicDecomposition::index_of(std::span<const int> n) const {
  for (std::size_t s = 0; s < scales_.size(); ++s)
    if (std::equal(n.begin(), n.end(), scales_[s].n.begin(), scales_[s].n.end())) return static_cast<int>(s);
  return -1;
}

double DyadicDecomposition::profile(std::size_t s, std::span<const double> t) const {
  const auto& term = scales_.at(s);
  double v = 1.0;
  for (int mu = 0; mu < group_.nu() && v != 0.0; ++mu)
    v *= term.factors[mu].eval(t.subspan(static_cast<std::size_t>(group_.offset(mu)), static_cast<std::size_t>(group_.dim(mu))));
  return v;
}

double DyadicDecomposition::dilated_eval(std::size_t s, std::span<const double> t) const {
  const auto& term = scales_.at(s);
  std::vector<double> u(t.size());
  double logpre = 0.0;
  for (std::size_t j = 0; j < t.size(); ++j) {
    const int mu = group_.factor_of()[j];
    u[j] = std::ldexp(t[j], term.n[mu] * group_.weights()[j]);
  }
  for (int mu = 0; mu < group_.nu(); ++mu) logpre += term.n[mu] * group_.homogeneous_dimension(mu);
  return std::exp2(logpre) * profile(s, u);
}

double DyadicDecomposition::eval(std::span<const double> t) const {
  double s = 0.0;
  for (std::size_t i = 0; i < scales_.size(); ++i) s += dilated_eval(i, t);
  return s;
}

GridSpec DyadicDecomposition::unit_box_spec() const {
  std::vector<Axis> axes;
  for (int mu = 0; mu < group_.nu(); ++mu) {
    const int n = options_.profile_samples > 0 ? options_.profile_samples : default_samples(group_.dim(mu));
    for (int a = 0; a < group_.dim(mu); ++a) axes.push_back({n, 2.0 * options_.unit_half_width / n});
  }
  return GridSpec(group_, axes, axes.front().count, options_.unit_half_width);
}

GridFunction DyadicDecomposition::profile_grid(std::size_t s) const {
  return GridFunction::sample(unit_box_spec(), [&](std::span<const double> t) { return cplx(profile(s, t)); });
}

nlohmann::json DyadicDecomposition::to_json() const {
  nlohmann::json sc = nlohmann::json::array();
  for (std::size_t s = 0; s < scales_.size(); ++s) {
    std::vector<int> cancel;
    for (int mu : scales_[s].cancel.members(group_.nu())) cancel.push_back(mu + 1);
    sc.push_back({{"n", scales_[s].n}, {"cancel", cancel}, {"profile_bound", bounds_[s]}});
  }
  return {{"kind", "dyadic"},
          {"group", group_.to_json()},
          {"window", {{"lo", window_.lo}, {"hi", window_.hi}}},
          {"family", to_string(options_.family)},
          {"moment_order", options_.moment_order},
          {"flag_mode", options_.flag_mode},
          {"seed", options_.seed},
          {"profile_samples", options_.profile_samples},
          {"unit_half_width", options_.unit_half_width},
          {"scales", sc}};
}

std::shared_ptr<const DyadicDecomposition> synth_dyadic(const ProductGroup& group, const DyadicWindow& window,
                                                        const DyadicOptions& options) {
  const int nu = group.nu();
  require(static_cast<int>(window.lo.size()) == nu && static_cast<int>(window.hi.size()) == nu,
          "synth_dyadic: window needs one range per factor");
  for (int mu = 0; mu < nu; ++mu) require(window.lo[mu] <= window.hi[mu], "synth_dyadic: empty window");
  require(options.moment_order >= 0 && options.moment_order <= 4, "synth_dyadic: moment order must be in [0, 4]");
  require(options.unit_half_width > 0.0, "synth_dyadic: unit box must be nonempty");

  std::vector<std::vector<int>> ns;
  std::vector<int> cur(static_cast<std::size_t>(nu));
  auto rec = [&](auto&& self, int mu) -> void {
    if (mu == nu) {
      bool keep = true;
      if (options.flag_mode)
        for (int m = 0; m + 1 < nu; ++m) keep = keep && cur[m] >= cur[m + 1];
      if (keep) ns.push_back(cur);
      return;
    }
    for (int v = window.lo[mu]; v <= window.hi[mu]; ++v) {
      cur[mu] = v;
      self(self, mu + 1);
    }
  };
  rec(rec, 0);
  require(!ns.empty(), "synth_dyadic: window has no admissible scales");

  std::vector<GridSpec> fspecs;
  double per_scale_points = 1.0;
  for (int mu = 0; mu < nu; ++mu) {
    const int n = options.profile_samples > 0 ? options.profile_samples : default_samples(group.dim(mu));
    fspecs.push_back(unit_factor_spec(group.factor(mu), n, options.unit_half_width));
    per_scale_points *= static_cast<double>(fspecs.back().size());
  }
  const double bytes = per_scale_points * 16.0 * static_cast<double>(ns.size());
  if (bytes > static_cast<double>(options.memory_budget))
    throw BudgetError("synth_dyadic: window needs an estimated " + std::to_string(static_cast<long long>(bytes)) +
                      " bytes, over the budget of " + std::to_string(options.memory_budget));

  std::vector<MomentBasis> bases;
  for (int mu = 0; mu < nu; ++mu) bases.push_back(build_basis(fspecs[mu], options.moment_order));

  Rng root(options.seed);
  std::vector<ScaleTerm> scales;
  std::vector<double> bounds;
  for (std::size_t s = 0; s < ns.size(); ++s) {
    ScaleTerm term;
    term.n = ns[s];
    std::uint32_t bits = 0;
    for (int mu = 0; mu < nu; ++mu) {
      const bool cancel = !options.flag_mode || mu == nu - 1 || term.n[mu] > term.n[mu + 1];
      if (cancel) bits |= 1u << mu;
    }
    term.cancel = SubsetMask(bits);
    double bound = 0.0;
    for (int mu = 0; mu < nu; ++mu) {
      FactorFunction f;
      f.family = options.family;
      f.q = group.dim(mu);
      f.half_width = options.unit_half_width;
      if (options.family == ProfileFamily::RandomSmooth) {
        Rng rng = root.fork(s * 64 + static_cast<std::size_t>(mu));
        for (int b = 0; b < 3; ++b) {
          f.amps.push_back(rng.uniform(-1.0, 1.0));
          std::vector<double> c;
          for (int a = 0; a < f.q; ++a) c.push_back(rng.uniform(-0.5, 0.5));
          f.centers.push_back(std::move(c));
          f.widths.push_back(rng.uniform(0.5, 0.8));
        }
      }
      const GridSpec& fs = fspecs[mu];
      const MomentBasis& basis = bases[mu];
      std::vector<double> samples(fs.size());
      std::vector<double> x(static_cast<std::size_t>(f.q));
      for (std::size_t i = 0; i < fs.size(); ++i) {
        fs.coords(i, x);
        samples[i] = f.raw(x);
      }
      if (term.cancel.contains(mu)) {
        f.exponents = basis.exps;
        f.window_sigma = basis.sigma;
        f.poly.assign(basis.exps.size(), 0.0);
        for (std::size_t b = 0; b < basis.p.size(); ++b) {
          double c = 0.0;
          for (std::size_t i = 0; i < fs.size(); ++i) c += samples[i] * basis.p[b][i];
          c *= basis.vol;
          for (std::size_t k = 0; k < basis.exps.size(); ++k) f.poly[k] += c * basis.r[b][k];
        }
        for (std::size_t i = 0; i < fs.size(); ++i) {
          fs.coords(i, x);
          samples[i] = f.eval(x);
        }
      }
      // Sampled sup norms of pure finite-difference derivatives.
      std::vector<int> m(static_cast<std::size_t>(f.q));
      for (const double v : samples) bound = std::max(bound, std::abs(v));
      for (int a = 0; a < f.q; ++a) {
        std::vector<double> d = samples;
        const double h = fs.axes()[a].spacing;
        for (int order = 1; order <= options.moment_order; ++order) {
          std::vector<double> next(d.size(), 0.0);
          for (std::size_t i = 0; i < fs.size(); ++i) {
            fs.lattice(i, m);
            if (m[a] + 1 > fs.axes()[a].hi()) continue;
            next[i] = (d[i + fs.stride(a)] - d[i]) / h;
          }
          d = std::move(next);
          for (const double v : d) bound = std::max(bound, std::abs(v));
        }
      }
      term.factors.push_back(std::move(f));
    }
    scales.push_back(std::move(term));
    bounds.push_back(bound);
  }
  return std::make_shared<const DyadicDecomposition>(group, window, options, std::move(scales), std::move(bounds));
}

GridFunction enforce_moments(const GridFunction& f, int moment_order, int mu) {
  require(moment_order >= 0 && moment_order <= 4, "enforce_moments: M must be in [0, 4]");
  const GridSpec& spec = f.spec();
  require(mu >= 0 && mu < spec.group().nu(), "enforce_moments: factor out of range");
  const GridSpec fs = spec.factor_spec(mu);
  const MomentBasis basis = build_basis(fs, moment_order);
  std::vector<std::size_t> inner, outer;
  split_offsets(spec, mu, inner, outer);
  GridFunction out = f;
  auto& v = out.values();
  for (std::size_t base : outer) {
    for (std::size_t b = 0; b < basis.p.size(); ++b) {
      cplx c = 0.0;
      for (std::size_t i = 0; i < inner.size(); ++i) c += v[base + inner[i]] * basis.p[b][i];
      c *= basis.vol;
      for (std::size_t i = 0; i < inner.size(); ++i) v[base + inner[i]] -= c * basis.p[b][i] * basis.w[i];
    }
  }
  return out;
}

double max_moment(const GridFunction& f, int moment_order, int mu) {
  const GridSpec& spec = f.spec();
  const GridSpec fs = spec.factor_spec(mu);
  const auto exps = monomial_exponents(fs.ndim(), moment_order);
  std::vector<std::size_t> inner, outer;
  split_offsets(spec, mu, inner, outer);
  std::vector<std::vector<double>> mono(exps.size(), std::vector<double>(inner.size()));
  std::vector<double> x(static_cast<std::size_t>(fs.ndim()));
  for (std::size_t i = 0; i < inner.size(); ++i) {
    fs.coords(i, x);
    for (std::size_t k = 0; k < exps.size(); ++k) {
      double m = 1.0;
      for (int a = 0; a < fs.ndim(); ++a) m *= ipow(x[a], exps[k][a]);
      mono[k][i] = m;
    }
  }
  double worst = 0.0;
  for (std::size_t base : outer)
    for (const auto& mk : mono) {
      cplx s = 0.0;
      for (std::size_t i = 0; i < inner.size(); ++i) s += f[base + inner[i]] * mk[i];
      worst = std::max(worst, std::abs(s) * fs.cell_volume());
    }
  return worst;
}

}  // namespace nilconv
