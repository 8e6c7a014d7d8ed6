#include "nilconv/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "nilconv/dyadic.hpp"
#include "nilconv/error.hpp"
#include "nilconv/rng.hpp"

namespace nilconv {

namespace {

GridFunction random_unit(const GridSpec& s, std::uint64_t seed) {
  Rng rng(seed);
  GridFunction v(s);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = cplx(rng.normal(), rng.normal());
  v *= 1.0 / v.l2_norm();
  return v;
}

// Solves (A*A + shift) x = b by conjugate gradients.
GridFunction cg_solve(const DiscreteOperator& a, double shift, const GridFunction& b, int max_iter, double tol) {
  auto apply = [&](const GridFunction& x) {
    GridFunction y = a.apply_normal(x);
    y.axpy(shift, x);
    return y;
  };
  GridFunction x(b.spec());
  GridFunction r = b, p = b;
  double rs = std::real(r.inner(r));
  const double bn = std::sqrt(rs);
  if (bn == 0.0) return x;
  for (int it = 0; it < max_iter && std::sqrt(rs) > tol * bn; ++it) {
    const GridFunction ap = apply(p);
    const double pap = std::real(p.inner(ap));
    if (pap <= 0.0) break;
    const double alpha = rs / pap;
    x.axpy(alpha, p);
    r.axpy(-alpha, ap);
    const double rs_new = std::real(r.inner(r));
    GridFunction next = r;
    next.axpy(rs_new / rs, p);
    p = std::move(next);
    rs = rs_new;
  }
  return x;
}

double axis_width(const GridSpec& g, int axis, double width) { return std::pow(width, g.group().weights()[axis]); }

GridFunction compose_grid(const GridFunction& a, const GridFunction& b, const ConvolveOptions& conv, double* trunc) {
  double t = 0.0;
  GridFunction out = symmetric_support(convolve(a, b, a.spec(), conv, &t));
  if (trunc) *trunc += t;
  return out;
}

}  // namespace

nlohmann::json EpsilonOptions::to_json() const {
  nlohmann::json j = {{"max_iter", max_iter}, {"tol", tol},           {"inverse_iter", inverse_iter},
                      {"cg_max", cg_max},     {"cg_tol", cg_tol},     {"shift_rel", shift_rel},
                      {"paper_eps", paper_eps}, {"seed", seed}};
  j["epsilon"] = epsilon ? nlohmann::json(*epsilon) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json EpsilonChoice::to_json() const {
  return {{"sigma_max", sigma_max}, {"sigma_min", sigma_min}, {"epsilon", epsilon}, {"s_norm", s_norm},
          {"invertible", invertible}, {"note", note},         {"rule", rule}};
}

DiscreteOperator inversion_operator(const KernelRep& k, const GridSpec& grid, const ConvolveOptions& conv) {
  const GridSpec kg = grid.kernel_grid();
  return DiscreteOperator(symmetric_support(k.render(kg)), kg, conv);
}

EpsilonChoice choose_epsilon(const DiscreteOperator& a, const EpsilonOptions& opt) {
  EpsilonChoice c;
  c.sigma_max = op_norm(a, opt.max_iter, opt.tol, opt.seed).value;
  if (c.sigma_max > 0.0) {
    const double shift = opt.shift_rel * c.sigma_max * c.sigma_max;
    GridFunction v = random_unit(a.domain(), opt.seed + 1);
    double lambda = std::numeric_limits<double>::infinity();
    for (int it = 0; it < opt.inverse_iter; ++it) {
      GridFunction w = cg_solve(a, shift, v, opt.cg_max, opt.cg_tol);
      const double wn = w.l2_norm();
      if (wn == 0.0) break;
      w *= 1.0 / wn;
      v = std::move(w);
      const double next = std::pow(a.apply(v).l2_norm(), 2);
      const bool done = std::abs(next - lambda) <= 1e-6 * next;
      lambda = next;
      if (done) break;
    }
    c.sigma_min = std::sqrt(std::max(lambda, 0.0));
  }
  c.invertible = c.sigma_max > 0.0 && c.sigma_min >= 1e-8 * c.sigma_max;
  if (!c.invertible) c.note = "not invertible at this resolution";
  const double mx2 = c.sigma_max * c.sigma_max, mn2 = c.sigma_min * c.sigma_min;
  if (opt.epsilon) {
    require(*opt.epsilon > 0.0, "epsilon must be positive");
    c.epsilon = *opt.epsilon;
    c.rule = "fixed";
  } else if (c.sigma_max > 0.0) {
    c.epsilon = opt.paper_eps ? 1.0 / mx2 : 2.0 / (mx2 + mn2);
    c.rule = opt.paper_eps ? "1/sigma_max^2" : "2/(sigma_max^2+sigma_min^2)";
  }
  c.s_norm = std::max(std::abs(1.0 - c.epsilon * mx2), std::abs(1.0 - c.epsilon * mn2));
  return c;
}

EpsilonChoice choose_epsilon(const KernelRep& k, const GridSpec& grid, const EpsilonOptions& opt,
                             const ConvolveOptions& conv) {
  return choose_epsilon(inversion_operator(k, grid, conv), opt);
}

std::vector<std::pair<std::string, GridFunction>> inversion_probes(const GridSpec& grid, double width_rel,
                                                                   std::uint64_t seed) {
  require(width_rel > 0.0, "probe width must be positive");
  const double w = width_rel * grid.t();
  std::vector<std::pair<std::string, GridFunction>> out;
  out.emplace_back("gaussian-derivative", GridFunction::sample(grid, [&](std::span<const double> x) {
                     double v = 1.0;
                     for (std::size_t a = 0; a < x.size(); ++a) {
                       const double s = x[a] / axis_width(grid, static_cast<int>(a), w);
                       v *= s * std::exp(-s * s);
                     }
                     return cplx(v);
                   }));
  out.emplace_back("mexican-hat", GridFunction::sample(grid, [&](std::span<const double> x) {
                     double v = 1.0;
                     for (std::size_t a = 0; a < x.size(); ++a) {
                       const double s = x[a] / axis_width(grid, static_cast<int>(a), w);
                       v *= (1.0 - 2.0 * s * s) * std::exp(-s * s);
                     }
                     return cplx(v);
                   }));
  Rng rng(seed);
  std::vector<std::vector<double>> centers(4, std::vector<double>(static_cast<std::size_t>(grid.ndim())));
  std::vector<double> amps(4);
  for (std::size_t b = 0; b < 4; ++b) {
    amps[b] = rng.normal();
    for (int a = 0; a < grid.ndim(); ++a) centers[b][a] = rng.uniform(-1.0, 1.0) * axis_width(grid, a, w);
  }
  GridFunction r = GridFunction::sample(grid, [&](std::span<const double> x) {
    double v = 0.0;
    for (std::size_t b = 0; b < 4; ++b) {
      double e = 0.0;
      for (std::size_t a = 0; a < x.size(); ++a) {
        const double s = (x[a] - centers[b][a]) / axis_width(grid, static_cast<int>(a), w);
        e += s * s;
      }
      v += amps[b] * std::exp(-e);
    }
    return cplx(v);
  });
  for (int mu = 0; mu < grid.group().nu(); ++mu) r = enforce_moments(r, 1, mu);
  out.emplace_back("random-smooth", std::move(r));
  return out;
}

std::vector<ProbeResidual> probe_residuals(const KernelRep& k, const KernelRep& l, const GridSpec& grid,
                                           const std::vector<std::pair<std::string, GridFunction>>& probes,
                                           const ConvolveOptions& conv) {
  const DiscreteOperator ok(k, grid, conv), ol(l, grid, conv);
  std::vector<ProbeResidual> out;
  for (const auto& [name, f] : probes) {
    const double fn = f.l2_norm();
    require(fn > 0.0, "probe '" + name + "' vanishes on this grid");
    GridFunction a = ok.apply(ol.apply(f));
    a -= f;
    GridFunction b = ol.apply(ok.apply(f));
    b -= f;
    out.push_back({name, a.l2_norm() / fn, b.l2_norm() / fn});
  }
  return out;
}

GridFunction neumann_kernel(const KernelRep& k, const GridSpec& grid, double epsilon, const ConvolveOptions& conv,
                            double* truncated) {
  const GridSpec kg = grid.kernel_grid();
  const GridFunction kk = symmetric_support(k.render(kg));
  const GridFunction ka = symmetric_support(k.adjoint().render(kg));
  double t = 0.0;
  GridFunction s = compose_grid(ka, kk, conv, &t);
  s *= -epsilon;
  s += GridFunction::delta(kg);
  if (truncated) *truncated = epsilon * t;
  return s;
}

nlohmann::json DecayReport::to_json() const {
  nlohmann::json e = nlohmann::json::array();
  for (const auto& d : entries)
    e.push_back({{"n", d.n}, {"seminorm", d.seminorm}, {"root", d.root}, {"op_norm", d.op_norm}, {"truncated", d.truncated}});
  return {{"epsilon", epsilon.to_json()}, {"s_op_norm", s_op_norm}, {"k", k},
          {"entries", e},                 {"grid", grid},           {"config", config}};
}

std::string DecayReport::csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "n,seminorm,root,op_norm,truncated\n";
  for (const auto& d : entries) os << d.n << ',' << d.seminorm << ',' << d.root << ',' << d.op_norm << ',' << d.truncated << '\n';
  return os.str();
}

DecayReport seminorm_decay(const KernelRep& k, const GridSpec& grid, std::span<const int> order,
                           const std::vector<int>& n_list, const DecayOptions& opt) {
  require(static_cast<int>(order.size()) == grid.group().nu(), "decay: order vector has the wrong length");
  for (int n : n_list) require(n >= 1, "decay: powers must be positive");
  DecayReport rep;
  rep.k.assign(order.begin(), order.end());
  rep.grid = grid.to_json();
  rep.config = {{"epsilon", opt.eps.to_json()}, {"seminorm", opt.seminorm.to_json()}, {"n", n_list}};
  rep.epsilon = choose_epsilon(k, grid, opt.eps, opt.conv);
  double t1 = 0.0;
  const GridFunction s = neumann_kernel(k, grid, rep.epsilon.epsilon, opt.conv, &t1);
  rep.s_op_norm = op_norm(DiscreteOperator(s, grid, opt.conv), opt.eps.max_iter, opt.eps.tol, opt.eps.seed).value;

  // Binary powers S^{2^i}, each with its accumulated truncation.
  std::vector<std::pair<GridFunction, double>> squares = {{s, t1}};
  std::map<int, std::pair<GridFunction, double>> cache;
  for (int n : n_list) {
    if (!cache.count(n)) {
      std::optional<std::pair<GridFunction, double>> acc;
      for (int bit = 0; (1 << bit) <= n; ++bit) {
        while (static_cast<int>(squares.size()) <= bit) {
          double t = 2.0 * squares.back().second;
          GridFunction sq = compose_grid(squares.back().first, squares.back().first, opt.conv, &t);
          squares.emplace_back(std::move(sq), t);
        }
        if (!(n & (1 << bit))) continue;
        if (!acc) {
          acc = squares[bit];
        } else {
          double t = acc->second + squares[bit].second;
          GridFunction p = compose_grid(acc->first, squares[bit].first, opt.conv, &t);
          acc = std::make_pair(std::move(p), t);
        }
      }
      cache.emplace(n, std::move(*acc));
    }
    const auto& [sn, trunc] = cache.at(n);
    DecayEntry e;
    e.n = n;
    e.truncated = trunc;
    if (sn.sup_norm() > 0.0) {
      const SeminormEstimator est(sn, grid, opt.seminorm, opt.conv);
      e.seminorm = est.pk(rep.k).total;
      e.op_norm = est.op_norm().value;
    }
    e.root = std::pow(e.seminorm, 1.0 / n);
    rep.entries.push_back(e);
  }
  return rep;
}

nlohmann::json InversionOptions::to_json() const {
  nlohmann::json j = {{"epsilon", eps.to_json()}, {"max_n", max_n},           {"tol", tol},
                      {"probe_width", probe_width}, {"probe_seed", probe_seed}, {"track_n", track_n},
                      {"seminorm", seminorm.to_json()}};
  j["track_k"] = track_k ? nlohmann::json(*track_k) : nlohmann::json(nullptr);
  j["growth_alpha"] = growth_alpha ? nlohmann::json(growth_alpha->parts()) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json InversionResult::to_json() const {
  nlohmann::json pr = nlohmann::json::array();
  for (const auto& p : probes) pr.push_back({{"probe", p.name}, {"kl", p.kl}, {"lk", p.lk}});
  nlohmann::json j = {{"epsilon", epsilon.to_json()}, {"iterations", iterations}, {"converged", converged},
                      {"step_norms", step_norms},     {"probes", pr},             {"max_residual", max_residual},
                      {"grid", grid},                 {"config", config}};
  j["decay"] = decay ? decay->to_json() : nlohmann::json(nullptr);
  j["growth"] = growth ? growth->to_json() : nlohmann::json(nullptr);
  return j;
}

InversionResult neumann_invert(const KernelRep& k, const GridSpec& grid, const InversionOptions& opt) {
  require(opt.max_n >= 1 && opt.tol > 0.0, "invert: max_n must be positive and tol positive");
  const DiscreteOperator a = inversion_operator(k, grid, opt.conv);
  const EpsilonChoice eps = choose_epsilon(a, opt.eps);
  if (!eps.invertible && !opt.eps.epsilon)
    throw ConvergenceError("invert: Op(K) is not invertible at this resolution (sigma_min = " +
                           std::to_string(eps.sigma_min) + ", sigma_max = " + std::to_string(eps.sigma_max) + ")");
  GridFunction term = a.apply_adjoint(GridFunction::delta(a.domain()));
  term *= eps.epsilon;
  InversionResult res(term);
  res.epsilon = eps;
  res.grid = grid.to_json();
  res.config = opt.to_json();
  const double u0 = term.l2_norm();
  for (int n = 1; n <= opt.max_n && u0 > 0.0; ++n) {
    GridFunction next = a.apply_normal(term);
    next *= -eps.epsilon;
    next += term;
    term = std::move(next);
    res.inverse += term;
    res.iterations = n;
    const double tn = term.l2_norm();
    res.step_norms.push_back(tn / u0);
    if (tn <= opt.tol * res.inverse.l2_norm()) {
      res.converged = true;
      break;
    }
  }
  if (u0 == 0.0) res.converged = true;
  const KernelRep l = res.inverse_kernel();
  res.probes = probe_residuals(k, l, grid, inversion_probes(grid, opt.probe_width, opt.probe_seed), opt.conv);
  for (const auto& p : res.probes) res.max_residual = std::max({res.max_residual, p.kl, p.lk});
  if (opt.growth_alpha) res.growth = check_growth_grid(res.inverse, *opt.growth_alpha, opt.growth);
  if (opt.track_k) {
    DecayOptions d;
    d.eps = opt.eps;
    d.eps.epsilon = eps.epsilon;
    d.seminorm = opt.seminorm;
    d.conv = opt.conv;
    res.decay = seminorm_decay(k, grid, *opt.track_k, opt.track_n, d);
  }
  return res;
}

double kernel_cosine(const GridFunction& a, const GridFunction& b, double frac) {
  require(a.spec() == b.spec(), "cosine: kernels must share a grid");
  const GridSpec& s = a.spec();
  std::vector<int> m(static_cast<std::size_t>(s.ndim()));
  cplx dot = 0.0;
  double na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    s.lattice(i, m);
    bool inside = true;
    for (int ax = 0; ax < s.ndim() && inside; ++ax) inside = std::abs(m[ax]) < frac * s.axes()[ax].count / 2.0;
    if (!inside) continue;
    dot += a[i] * std::conj(b[i]);
    na += std::norm(a[i]);
    nb += std::norm(b[i]);
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::real(dot) / std::sqrt(na * nb);
}

}  // namespace nilconv
