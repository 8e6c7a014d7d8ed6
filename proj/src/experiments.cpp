#include "nilconv/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nilconv/convolution.hpp"
#include "nilconv/dyadic.hpp"
#include "nilconv/error.hpp"
#include "nilconv/inversion.hpp"
#include "nilconv/kernel_checks.hpp"
#include "nilconv/kernel_io.hpp"
#include "nilconv/parallel.hpp"
#include "nilconv/presets.hpp"
#include "nilconv/rng.hpp"
#include "nilconv/seminorms.hpp"
#include "nilconv/tame.hpp"

namespace nilconv {

using nlohmann::json;

nlohmann::json GroupCheck::to_json() const {
  return {{"name", name},
          {"homogeneous_dimension", homogeneous_dimension},
          {"layer_dims", layer_dims},
          {"lattice_denominator", lattice_denominator},
          {"jacobi_residual", jacobi_residual},
          {"grading", "ok"},
          {"associativity_error", associativity},
          {"identity_error", identity},
          {"inverse_error", inverse},
          {"homogeneity_error", homogeneity},
          {"triangle_constant", triangle},
          {"samples", samples}};
}

std::vector<GroupCheck> check_group(const ProductGroup& g, std::size_t samples, std::uint64_t seed) {
  std::vector<GroupCheck> out;
  for (int mu = 0; mu < g.nu(); ++mu) {
    const auto& f = g.factor(mu);
    GroupCheck c;
    c.name = f.name();
    c.homogeneous_dimension = f.homogeneous_dimension();
    c.layer_dims = f.layer_dims();
    c.lattice_denominator = f.lattice_denominator();
    c.jacobi_residual = f.jacobi_residual();
    c.samples = samples;
    Rng rng(seed + static_cast<std::uint64_t>(mu));
    const auto q = static_cast<std::size_t>(f.dim());
    std::vector<double> x(q), y(q), z(q), zero(q, 0.0);
    auto dist = [](std::span<const double> a, std::span<const double> b) {
      double m = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
      return m;
    };
    for (std::size_t s = 0; s < samples; ++s) {
      for (auto* v : {&x, &y, &z})
        for (auto& e : *v) e = rng.uniform(-1.0, 1.0);
      c.associativity =
          std::max(c.associativity, dist(f.multiply(f.multiply(x, y), z), f.multiply(x, f.multiply(y, z))));
      c.identity = std::max({c.identity, dist(f.multiply(x, zero), x), dist(f.multiply(zero, x), x)});
      const auto xi = f.invert(x);
      c.inverse = std::max({c.inverse, dist(f.multiply(x, xi), zero), dist(f.multiply(xi, x), zero)});
      const double r = std::exp2(rng.uniform(-4.0, 4.0));
      const double n = f.hom_norm(x);
      if (n > 0.0) c.homogeneity = std::max(c.homogeneity, std::abs(f.hom_norm(f.dilate(r, x)) - r * n) / (r * n));
    }
    c.triangle = triangle_constant(f, 20000, seed);
    out.push_back(c);
  }
  return out;
}

std::vector<std::string> command_names() {
  return {"group-check", "kernel-synth", "kernel-check-growth", "kernel-check-cancel", "convolve",
          "opnorm",      "seminorm",     "tame",                "invert",              "decay"};
}

namespace {

json command_options(const std::string& c) {
  if (c == "group-check") return {{"samples", 1000}};
  if (c == "kernel-synth") return json::object();
  if (c == "kernel-check-growth") return {{"mode", "product"}, {"alpha", nullptr}, {"samples", 2000}};
  if (c == "kernel-check-cancel")
    return {{"mu", 1},          {"radii", {0.25, 0.5, 1.0, 2.0, 4.0}}, {"alpha", nullptr}, {"samples", 2000},
            {"quadrature_points", 256}, {"reduced_N", 64},            {"reduced_T", 4.0}};
  if (c == "convolve") return json::object();
  if (c == "opnorm") return {{"max_iter", 1000}, {"tol", 1e-3}};
  if (c == "seminorm") return {{"flag", false}};
  if (c == "tame") return {{"variant", "product"}, {"pairs", 20}};
  if (c == "invert")
    return {{"max_n", 4000},       {"tol", 1e-7},     {"paper_eps", false},    {"epsilon", nullptr},
            {"track_k", nullptr},  {"track_n", {1, 2, 4, 8}}, {"growth_alpha", nullptr}, {"probe_width", 0.125}};
  if (c == "decay") return {{"n", {1, 2, 4, 8}}, {"paper_eps", false}, {"epsilon", nullptr}};
  throw ValidationError("/command: unknown command '" + c + "'");
}

[[noreturn]] void bad(const std::string& ptr, const std::string& msg) { throw ValidationError(ptr + ": " + msg); }

template <class T>
T get(const json& cfg, const std::string& ptr) {
  const json::json_pointer p(ptr);
  if (!cfg.contains(p)) bad(ptr, "missing");
  try {
    return cfg.at(p).get<T>();
  } catch (const json::exception&) {
    bad(ptr, "wrong type (" + std::string(cfg.at(p).type_name()) + ")");
  }
}

bool is_null(const json& cfg, const std::string& ptr) {
  const json::json_pointer p(ptr);
  return !cfg.contains(p) || cfg.at(p).is_null();
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string o = "\"";
  for (char c : s) o += c == '"' ? std::string("\"\"") : std::string(1, c);
  return o + "\"";
}

MultiIndex ones_like(const ProductGroup& g, const std::vector<int>& k) {
  std::vector<std::vector<int>> parts;
  for (int mu = 0; mu < g.nu(); ++mu) parts.push_back(std::vector<int>(static_cast<std::size_t>(g.dim(mu)), k[mu]));
  return MultiIndex(std::move(parts));
}

MultiIndex alpha_from(const json& cfg, const std::string& ptr, const ProductGroup& g, const std::vector<int>& k) {
  if (is_null(cfg, ptr)) return ones_like(g, k);
  const auto parts = get<std::vector<std::vector<int>>>(cfg, ptr);
  if (static_cast<int>(parts.size()) != g.nu()) bad(ptr, "needs one entry per factor");
  for (int mu = 0; mu < g.nu(); ++mu) {
    if (static_cast<int>(parts[mu].size()) != g.dim(mu)) bad(ptr + "/" + std::to_string(mu), "wrong factor dimension");
    for (int v : parts[mu])
      if (v < 0) bad(ptr + "/" + std::to_string(mu), "orders must be nonnegative");
  }
  return MultiIndex(parts);
}

std::string growth_csv(const GrowthReport& r, const std::string& prefix_cols = "", const std::string& prefix = "") {
  std::ostringstream os;
  os.precision(17);
  if (prefix.empty()) os << prefix_cols << "alpha,constant,samples,argmax\n";
  for (const auto& e : r.entries) {
    std::string am;
    for (std::size_t i = 0; i < e.argmax.size(); ++i) {
      std::ostringstream v;
      v.precision(17);
      v << e.argmax[i];
      am += (i ? ";" : "") + v.str();
    }
    os << prefix << csv_escape(e.alpha.to_string()) << ',' << e.constant << ',' << e.samples << ',' << am << '\n';
  }
  return os.str();
}

struct Context {
  json cfg;
  ProductGroup group;
  GridSpec grid;
  std::uint64_t seed;
  std::vector<int> k;
  SeminormConfig seminorm;
};

Context context(const json& in) {
  json cfg = in;
  const ProductGroup g = load_group(cfg.at("group"), "/group");
  const int n = get<int>(cfg, "/grid/N");
  const double t = get<double>(cfg, "/grid/T");
  if (n < 2 || n % 2) bad("/grid/N", "must be an even integer >= 2");
  if (!(t > 0.0)) bad("/grid/T", "must be positive");
  const GridSpec grid = GridSpec::make(g, n, t);
  if (cfg.at("k").is_null()) cfg["k"] = std::vector<int>(static_cast<std::size_t>(g.nu()), 1);
  const auto k = get<std::vector<int>>(cfg, "/k");
  if (static_cast<int>(k.size()) != g.nu()) bad("/k", "needs one order per factor (" + std::to_string(g.nu()) + ")");
  for (std::size_t i = 0; i < k.size(); ++i)
    if (k[i] < 0) bad("/k/" + std::to_string(i), "must be nonnegative");
  SeminormConfig sc = SeminormConfig::from_json(cfg.at("seminorm"), "/seminorm");
  const auto seed = get<std::uint64_t>(cfg, "/seed");
  sc.seed = seed;
  cfg["seminorm"] = sc.to_json();
  return {cfg, g, grid, seed, k, sc};
}

KernelRep kernel_of(const Context& c, const char* key) {
  return load_kernel(c.cfg.at(key), c.group, c.grid, c.seed, std::string("/") + key);
}

RunOutput run_group_check(const Context& c) {
  RunOutput out;
  const auto n = get<std::size_t>(c.cfg, "/options/samples");
  json factors = json::array();
  double worst = 0.0;
  for (const auto& f : check_group(c.group, n, c.seed)) {
    factors.push_back(f.to_json());
    worst = std::max({worst, f.associativity, f.identity, f.inverse});
  }
  out.report["result"] = {{"group", c.group.to_json()}, {"factors", factors}, {"max_law_error", worst}};
  std::ostringstream s;
  s << "group checks on " << c.group.nu() << " factor(s): max law error " << worst;
  out.summary = s.str();
  return out;
}

RunOutput run_kernel_synth(const Context& c) {
  RunOutput out;
  const KernelRep k = kernel_of(c, "kernel");
  const GridFunction v = symmetric_support(k.render(c.grid.kernel_grid()));
  json r = {{"kernel", k.describe()}, {"kernel_grid", c.grid.kernel_grid().to_json()}, {"sup", v.sup_norm()},
            {"l2", v.l2_norm()}};
  if (const auto* d = std::get_if<DyadicKernel>(&k.variant())) {
    r["profile_bounds"] = d->data->profile_bounds();
    json mom = json::array();
    for (int mu = 0; mu < c.group.nu(); ++mu) mom.push_back(max_moment(v, d->data->options().moment_order, mu));
    r["max_moments"] = mom;
  }
  out.report["result"] = r;
  out.kernels.emplace_back("kernel.nckr", v);
  out.summary = "kernel " + k.kind() + " written on the kernel grid";
  return out;
}

RunOutput run_check_growth(const Context& c) {
  RunOutput out;
  const KernelRep k = kernel_of(c, "kernel");
  GrowthOptions o;
  o.mode = growth_mode_from_string(get<std::string>(c.cfg, "/options/mode"));
  o.samples = get<std::size_t>(c.cfg, "/options/samples");
  o.seed = c.seed;
  o.grid = c.grid.kernel_grid();
  const auto rep = check_growth(k, alpha_from(c.cfg, "/options/alpha", c.group, c.k), o);
  out.report["result"] = rep.to_json();
  out.files.emplace_back("growth.csv", growth_csv(rep));
  out.summary = "growth (" + rep.method + "): max constant " + std::to_string(rep.max_constant());
  return out;
}

RunOutput run_check_cancel(const Context& c) {
  RunOutput out;
  const KernelRep k = kernel_of(c, "kernel");
  const int mu = get<int>(c.cfg, "/options/mu") - 1;
  if (mu < 0 || mu >= c.group.nu()) bad("/options/mu", "factor out of range");
  const auto radii = get<std::vector<double>>(c.cfg, "/options/radii");
  CancellationOptions o;
  o.growth.samples = get<std::size_t>(c.cfg, "/options/samples");
  o.growth.seed = c.seed;
  o.quadrature_points = get<int>(c.cfg, "/options/quadrature_points");
  std::vector<GradedLieAlgebra> rest;
  for (int m = 0; m < c.group.nu(); ++m)
    if (m != mu) rest.push_back(c.group.factor(m));
  if (!rest.empty())
    o.reduced_grid = GridSpec::make(ProductGroup(rest), get<int>(c.cfg, "/options/reduced_N"),
                                    get<double>(c.cfg, "/options/reduced_T"));
  const auto rep =
      check_cancellation(k, mu, radii, bump_catalog(c.group.factor(mu)), alpha_from(c.cfg, "/options/alpha", c.group, c.k), o);
  out.report["result"] = rep.to_json();
  std::ostringstream os;
  os.precision(17);
  os << "bump,R,alpha,constant,samples,argmax\n";
  for (const auto& e : rep.entries) {
    std::ostringstream pre;
    pre.precision(17);
    pre << csv_escape(e.bump) << ',' << e.r << ',';
    os << growth_csv(e.growth, "", pre.str());
  }
  out.files.emplace_back("cancellation.csv", os.str());
  out.summary = "cancellation over factor " + std::to_string(mu + 1) + ": " + std::to_string(rep.entries.size()) + " reductions";
  return out;
}

RunOutput run_convolve(const Context& c) {
  RunOutput out;
  const KernelRep k = kernel_of(c, "kernel"), l = kernel_of(c, "kernel2");
  double trunc = 0.0;
  const KernelRep m = compose_kernels(k, l, c.grid.kernel_grid(), {}, &trunc);
  const auto* gk = std::get_if<GridKernel>(&m.variant());
  out.report["result"] = {{"truncated", trunc},
                          {"op_norm_k", op_norm(k, c.grid, 1000, 1e-3, c.seed).to_json()},
                          {"op_norm_l", op_norm(l, c.grid, 1000, 1e-3, c.seed).to_json()},
                          {"op_norm_kl", op_norm(m, c.grid, 1000, 1e-3, c.seed).to_json()},
                          {"l2", gk->data->l2_norm()}};
  out.kernels.emplace_back("composite.nckr", *gk->data);
  out.summary = "composed kernel written, truncated mass " + std::to_string(trunc);
  return out;
}

RunOutput run_opnorm(const Context& c) {
  RunOutput out;
  const KernelRep k = kernel_of(c, "kernel");
  const auto est = op_norm(k, c.grid, get<int>(c.cfg, "/options/max_iter"), get<double>(c.cfg, "/options/tol"), c.seed);
  out.report["result"] = est.to_json();
  out.exit_code = est.converged ? 0 : 3;
  out.summary = "||Op(K)|| ~ " + std::to_string(est.value) + (est.converged ? "" : " (not converged)");
  return out;
}

RunOutput run_seminorm(const Context& c) {
  RunOutput out;
  const KernelRep k = kernel_of(c, "kernel");
  const bool flag = get<bool>(c.cfg, "/options/flag");
  const SeminormEstimator est(k, c.grid, c.seminorm);
  const auto rep = flag ? est.fk(c.k) : est.pk(c.k);
  out.report["result"] = rep.to_json();
  std::ostringstream os;
  os.precision(17);
  os << "term,value\n";
  for (const auto& t : rep.subsets) os << csv_escape(t.label) << ',' << t.value << '\n';
  for (const auto& t : rep.flag_terms) os << csv_escape(t.label) << ',' << t.value << '\n';
  out.files.emplace_back("terms.csv", os.str());
  if (c.seminorm.keep_surface) out.files.emplace_back("surface.csv", rep.surface_csv());
  out.summary = std::string(flag ? "flag" : "product") + " seminorm estimate " +
                std::to_string(flag ? rep.flag_total : rep.total);
  return out;
}

RunOutput run_tame(const Context& c) {
  RunOutput out;
  const TameKind kind = tame_kind_from_string(get<std::string>(c.cfg, "/options/variant"));
  const int pairs = get<int>(c.cfg, "/options/pairs");
  if (pairs < 0) bad("/options/pairs", "must be nonnegative");
  TameOptions base;
  base.seminorm = c.seminorm;
  std::vector<TameReport> reps(static_cast<std::size_t>(std::max(pairs, 1)), TameReport{});
  if (pairs == 0) {
    base.k_id = kernel_id(c.cfg.at("kernel"));
    base.l_id = kernel_id(c.cfg.at("kernel2"));
    reps[0] = tame_report(kind, kernel_of(c, "kernel"), kernel_of(c, "kernel2"), c.k, c.grid, base);
  } else {
    const std::string preset = kind == TameKind::Flag ? "random-dyadic-flag" : "random-dyadic";
    parallel_for(static_cast<std::size_t>(pairs), [&](std::size_t i) {
      const json ks = {{"name", preset}, {"seed", c.seed + 2 * i}};
      const json ls = {{"name", preset}, {"seed", c.seed + 2 * i + 1}};
      TameOptions o = base;
      o.k_id = kernel_id(ks);
      o.l_id = kernel_id(ls);
      reps[i] = tame_report(kind, load_kernel(ks, c.group, c.grid, c.seed, "/kernel"),
                            load_kernel(ls, c.group, c.grid, c.seed, "/kernel2"), c.k, c.grid, o);
    });
  }
  json rows = json::array();
  std::string csv = tame_csv_header(reps.front());
  double max_ratio = 0.0;
  bool structure = true;
  for (const auto& r : reps) {
    rows.push_back(r.to_json());
    csv += tame_csv_row(r);
    max_ratio = std::max(max_ratio, r.ratio);
    structure = structure && tameness_structure_ok(r);
  }
  out.report["result"] = {{"reports", rows}, {"max_ratio", max_ratio}, {"structure_ok", structure}};
  out.files.emplace_back("ratios.csv", csv);
  out.summary = std::to_string(reps.size()) + " " + to_string(kind) + " reports, max ratio " + std::to_string(max_ratio);
  return out;
}

EpsilonOptions eps_options(const Context& c) {
  EpsilonOptions e;
  e.paper_eps = get<bool>(c.cfg, "/options/paper_eps");
  if (!is_null(c.cfg, "/options/epsilon")) e.epsilon = get<double>(c.cfg, "/options/epsilon");
  e.seed = c.seed;
  return e;
}

std::string decay_csv(const DecayReport& d) { return d.csv(); }

RunOutput run_invert(const Context& c) {
  RunOutput out;
  const KernelRep k = kernel_of(c, "kernel");
  InversionOptions o;
  o.eps = eps_options(c);
  o.max_n = get<int>(c.cfg, "/options/max_n");
  o.tol = get<double>(c.cfg, "/options/tol");
  o.probe_width = get<double>(c.cfg, "/options/probe_width");
  o.probe_seed = c.seed;
  o.seminorm = c.seminorm;
  o.track_n = get<std::vector<int>>(c.cfg, "/options/track_n");
  if (!is_null(c.cfg, "/options/track_k")) {
    o.track_k = get<std::vector<int>>(c.cfg, "/options/track_k");
    if (static_cast<int>(o.track_k->size()) != c.group.nu()) bad("/options/track_k", "needs one order per factor");
  }
  if (!is_null(c.cfg, "/options/growth_alpha")) {
    o.growth_alpha = alpha_from(c.cfg, "/options/growth_alpha", c.group, c.k);
    o.growth.seed = c.seed;
  }
  const auto res = neumann_invert(k, c.grid, o);
  out.report["result"] = res.to_json();
  out.kernels.emplace_back("inverse.nckr", res.inverse);
  std::ostringstream steps, probes;
  steps.precision(17);
  probes.precision(17);
  steps << "n,step_norm\n";
  for (std::size_t i = 0; i < res.step_norms.size(); ++i) steps << i + 1 << ',' << res.step_norms[i] << '\n';
  probes << "probe,kl,lk\n";
  for (const auto& p : res.probes) probes << p.name << ',' << p.kl << ',' << p.lk << '\n';
  out.files.emplace_back("steps.csv", steps.str());
  out.files.emplace_back("probes.csv", probes.str());
  if (res.decay) out.files.emplace_back("decay.csv", decay_csv(*res.decay));
  if (res.growth) out.files.emplace_back("growth.csv", growth_csv(*res.growth));
  out.exit_code = res.converged ? 0 : 3;
  out.summary = "inverse after " + std::to_string(res.iterations) + " steps" + (res.converged ? "" : " (not converged)") +
                ", max probe residual " + std::to_string(res.max_residual);
  return out;
}

RunOutput run_decay(const Context& c) {
  RunOutput out;
  const KernelRep k = kernel_of(c, "kernel");
  DecayOptions o;
  o.eps = eps_options(c);
  o.seminorm = c.seminorm;
  const auto rep = seminorm_decay(k, c.grid, c.k, get<std::vector<int>>(c.cfg, "/options/n"), o);
  out.report["result"] = rep.to_json();
  out.files.emplace_back("decay.csv", rep.csv());
  out.summary = "decay of ||S^n||: " + std::to_string(rep.entries.size()) + " powers, ||S|| ~ " + std::to_string(rep.s_op_norm);
  return out;
}

}  // namespace

json default_config(const std::string& command) {
  return {{"command", command},
          {"group", "abelian2"},
          {"grid", {{"N", 32}, {"T", 4.0}}},
          {"kernel", "delta"},
          {"kernel2", "delta"},
          {"k", nullptr},
          {"seed", 1},
          {"seminorm", SeminormConfig{}.to_json()},
          {"options", command_options(command)}};
}

void merge_config(json& base, const json& patch) {
  if (!patch.is_object() || !base.is_object()) {
    base = patch;
    return;
  }
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    if (base.contains(it.key()) && base[it.key()].is_object() && it.value().is_object() &&
        it.key() != "group" && it.key() != "kernel" && it.key() != "kernel2")
      merge_config(base[it.key()], it.value());
    else
      base[it.key()] = it.value();
  }
}

void apply_override(json& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ValidationError("--set: expected key=value, got '" + assignment + "'");
  std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  if (key.front() != '/') {
    std::replace(key.begin(), key.end(), '.', '/');
    key = "/" + key;
  }
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;
  }
  try {
    cfg[json::json_pointer(key)] = value;
  } catch (const json::exception& e) {
    throw ValidationError(key + ": cannot set (" + e.what() + ")");
  }
}

void validate_config(const json& cfg) {
  if (!cfg.is_object()) throw ValidationError(": config must be a JSON object");
  const auto command = get<std::string>(cfg, "/command");
  const json d = default_config(command);
  for (auto it = cfg.begin(); it != cfg.end(); ++it)
    if (!d.contains(it.key())) bad("/" + it.key(), "unknown key");
  for (const char* obj : {"grid", "options"}) {
    const auto& o = cfg.at(obj);
    if (!o.is_object()) bad(std::string("/") + obj, "must be an object");
    for (auto it = o.begin(); it != o.end(); ++it) {
      const std::string p = std::string("/") + obj + "/" + it.key();
      if (!d.at(obj).contains(it.key())) bad(p, "unknown key");
      const auto& want = d.at(obj).at(it.key());
      const auto& have = it.value();
      const bool ok = want.is_null() || have.is_null() || (want.is_number() && have.is_number()) ||
                      (want.is_number_integer() && have.is_number_integer()) || want.type() == have.type();
      if (!ok) bad(p, std::string("expected ") + want.type_name() + ", got " + have.type_name());
      if (want.is_number_integer() && !have.is_number_integer()) bad(p, "expected an integer");
    }
  }
  SeminormConfig::from_json(cfg.at("seminorm"), "/seminorm");
  get<std::uint64_t>(cfg, "/seed");
  if (!cfg.at("k").is_null()) get<std::vector<int>>(cfg, "/k");
}

RunOutput run_experiment(const json& in) {
  json cfg = default_config(get<std::string>(in, "/command"));
  merge_config(cfg, in);
  validate_config(cfg);
  const Context c = context(cfg);
  const std::string command = c.cfg.at("command");
  RunOutput out;
  if (command == "group-check") out = run_group_check(c);
  else if (command == "kernel-synth") out = run_kernel_synth(c);
  else if (command == "kernel-check-growth") out = run_check_growth(c);
  else if (command == "kernel-check-cancel") out = run_check_cancel(c);
  else if (command == "convolve") out = run_convolve(c);
  else if (command == "opnorm") out = run_opnorm(c);
  else if (command == "seminorm") out = run_seminorm(c);
  else if (command == "tame") out = run_tame(c);
  else if (command == "invert") out = run_invert(c);
  else if (command == "decay") out = run_decay(c);
  out.report["config"] = c.cfg;
  out.report["grid"] = c.grid.to_json();
  out.report["exit_code"] = out.exit_code;
  return out;
}

void write_outputs(const RunOutput& out, const std::string& dir, const json& run_meta) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ValidationError("output directory '" + dir + "': " + ec.message());
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream f(std::filesystem::path(dir) / name, std::ios::binary);
    if (!f) throw ValidationError("cannot write '" + name + "' in '" + dir + "'");
    f << text;
  };
  write("report.json", out.report.dump(2) + "\n");
  write("run_meta.json", run_meta.dump(2) + "\n");
  for (const auto& [name, text] : out.files) write(name, text);
  for (const auto& [name, f] : out.kernels)
    write_kernel_file((std::filesystem::path(dir) / name).string(), f, {{"config", out.report.at("config")}});
}

std::string csv_columns(const std::string& command) {
  if (command == "kernel-check-growth") return "growth.csv: alpha,constant,samples,argmax (argmax coordinates joined by ';')";
  if (command == "kernel-check-cancel") return "cancellation.csv: bump,R,alpha,constant,samples,argmax";
  if (command == "seminorm")
    return "terms.csv: term,value (one row per subset S and flag term)\n"
           "surface.csv (seminorm.keep_surface): factors,alpha,j,l,z_norm,block,weight,value";
  if (command == "tame") return "ratios.csv: kind,k_id,l_id,k,lhs,rhs,ratio,summand1..summandN (k joined by ';')";
  if (command == "invert")
    return "steps.csv: n,step_norm\nprobes.csv: probe,kl,lk\ndecay.csv (track_k): n,seminorm,root,op_norm,truncated\n"
           "growth.csv (growth_alpha): alpha,constant,samples,argmax";
  if (command == "decay") return "decay.csv: n,seminorm,root,op_norm,truncated";
  return "no CSV output";
}

}  // namespace nilconv
