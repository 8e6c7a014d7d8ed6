#include "nilconv/graded_group.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>

#include "nilconv/error.hpp"
#include "nilconv/rng.hpp"

namespace nilconv {

namespace {

// B_{2p} / (2p)! for p = 1..5.
constexpr double kBernoulliOverFactorial[] = {
    0.0,
    (1.0 / 6.0) / 2.0,
    (-1.0 / 30.0) / 24.0,
    (1.0 / 42.0) / 720.0,
    (-1.0 / 30.0) / 40320.0,
    (5.0 / 66.0) / 3628800.0,
};

constexpr int kMaxLayers = 10;

bool is_zero(double v) { return v == 0.0; }
bool is_zero(const Polynomial& p) { return p.is_zero(); }

void compositions(int total, int parts, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (parts == 0) {
    if (total == 0) out.push_back(cur);
    return;
  }
  for (int first = 1; first <= total - (parts - 1); ++first) {
    cur.push_back(first);
    compositions(total - first, parts - 1, cur, out);
    cur.pop_back();
  }
}

// Varadarajan's recursion for the BCH series, generic over the
// coefficient type (double for numerics, Polynomial for the symbolic law).
template <class E, class Bracket>
std::vector<E> bch_series(const std::vector<E>& x, const std::vector<E>& y, int depth, const E& zero,
                          const Bracket& br) {
  const std::size_t q = x.size();
  auto add_into = [&](std::vector<E>& a, const std::vector<E>& b, double c) {
    for (std::size_t i = 0; i < q; ++i)
      if (!is_zero(b[i])) a[i] += b[i] * c;
  };
  std::vector<E> sum(q, zero), diff(q, zero);
  for (std::size_t i = 0; i < q; ++i) {
    sum[i] = x[i] + y[i];
    diff[i] = x[i] - y[i];
  }
  std::vector<std::vector<E>> z(static_cast<std::size_t>(depth) + 1);
  z[1] = sum;
  for (int m = 1; m < depth; ++m) {
    std::vector<E> acc(q, zero);
    add_into(acc, br(diff, z[m]), 0.5);
    for (int p = 1; 2 * p <= m; ++p) {
      std::vector<std::vector<int>> comps;
      std::vector<int> cur;
      compositions(m, 2 * p, cur, comps);
      for (const auto& c : comps) {
        std::vector<E> v = sum;
        for (int idx = 2 * p - 1; idx >= 0; --idx) v = br(z[c[idx]], v);
        add_into(acc, v, kBernoulliOverFactorial[p]);
      }
    }
    for (auto& e : acc) e *= 1.0 / (m + 1);
    z[m + 1] = std::move(acc);
  }
  std::vector<E> out = z[1];
  for (int m = 2; m <= depth; ++m) add_into(out, z[m], 1.0);
  return out;
}

std::int64_t small_denominator(double c) {
  // Continued-fraction convergents; returns 0 if none below the cap.
  constexpr std::int64_t kCap = 1000;
  double x = std::abs(c);
  std::int64_t h0 = 1, h1 = 0, k0 = 0, k1 = 1;
  for (int it = 0; it < 40; ++it) {
    const double a = std::floor(x);
    const auto ai = static_cast<std::int64_t>(a);
    const std::int64_t h2 = ai * h0 + h1, k2 = ai * k0 + k1;
    if (k2 > kCap) return 0;
    if (std::abs(std::abs(c) - static_cast<double>(h2) / static_cast<double>(k2)) <= 1e-14 * std::max(1.0, std::abs(c)))
      return k2;
    h1 = h0;
    h0 = h2;
    k1 = k0;
    k0 = k2;
    const double frac = x - a;
    if (frac < 1e-15) return 0;
    x = 1.0 / frac;
  }
  return 0;
}

}  // namespace

GradedLieAlgebra::GradedLieAlgebra(std::vector<int> layer_dims, const std::vector<StructureConstant>& constants,
                                   std::string name)
    : name_(std::move(name)), layer_dims_(std::move(layer_dims)) {
  require(!layer_dims_.empty(), "algebra: layer_dims must be nonempty");
  require(static_cast<int>(layer_dims_.size()) <= kMaxLayers, "algebra: at most 10 layers supported");
  for (std::size_t l = 0; l < layer_dims_.size(); ++l) {
    require(layer_dims_[l] > 0, "algebra: layer_dims entries must be positive");
    for (int k = 0; k < layer_dims_[l]; ++k) weights_.push_back(static_cast<int>(l) + 1);
    hom_dim_ += static_cast<int>(l + 1) * layer_dims_[l];
  }
  const int q = dim();
  table_.assign(static_cast<std::size_t>(q * q), {});

  std::map<std::tuple<int, int, int>, double> given;
  for (const auto& sc : constants) {
    require(sc.i >= 0 && sc.i < q && sc.j >= 0 && sc.j < q && sc.k >= 0 && sc.k < q,
            "algebra: structure constant index out of range");
    require(std::isfinite(sc.c), "algebra: structure constant must be finite");
    if (sc.c == 0.0) continue;
    require(sc.i != sc.j, "algebra: [X_i, X_i] must vanish (antisymmetry)");
    given[{sc.i, sc.j, sc.k}] += sc.c;
  }
  std::map<std::tuple<int, int, int>, double> full;
  for (const auto& [key, c] : given) {
    const auto [i, j, k] = key;
    auto rev = given.find({j, i, k});
    if (rev != given.end())
      require(std::abs(rev->second + c) <= 1e-12 * std::max(1.0, std::abs(c)),
              "algebra: antisymmetry violated for [X_" + std::to_string(i) + ", X_" + std::to_string(j) + "]");
    require(weights_[k] == weights_[i] + weights_[j],
            "algebra: grading violated, [X_" + std::to_string(i) + ", X_" + std::to_string(j) + "] has a component on X_" +
                std::to_string(k) + " of the wrong weight");
    full[{i, j, k}] = c;
    full[{j, i, k}] = -c;
  }
  for (const auto& [key, c] : full) {
    const auto [i, j, k] = key;
    table_[static_cast<std::size_t>(i * q + j)].push_back({k, c});
    if (i < j) constants_.push_back({i, j, k, c});
  }
  require(jacobi_residual() <= 1e-12, "algebra: Jacobi identity violated");
  build_law();
}

GradedLieAlgebra GradedLieAlgebra::abelian(int q) {
  require(q >= 1, "abelian: dimension must be positive");
  return GradedLieAlgebra({q}, {}, "abelian(" + std::to_string(q) + ")");
}

GradedLieAlgebra GradedLieAlgebra::heisenberg(int n) {
  require(n >= 1, "heisenberg: n must be positive");
  std::vector<StructureConstant> c;
  for (int i = 0; i < n; ++i) c.push_back({i, n + i, 2 * n, 1.0});
  return GradedLieAlgebra({2 * n, 1}, c, "heisenberg" + std::to_string(n));
}

void GradedLieAlgebra::bracket(std::span<const double> x, std::span<const double> y, std::span<double> out) const {
  const int q = dim();
  std::fill(out.begin(), out.end(), 0.0);
  for (int i = 0; i < q; ++i) {
    if (x[i] == 0.0) continue;
    for (int j = 0; j < q; ++j) {
      if (y[j] == 0.0) continue;
      for (const auto& [k, c] : table_[static_cast<std::size_t>(i * q + j)]) out[k] += c * x[i] * y[j];
    }
  }
}

void GradedLieAlgebra::multiply_into(std::span<const double> x, std::span<const double> y,
                                     std::span<double> out) const {
  const int q = dim();
  if (static_cast<int>(x.size()) != q || static_cast<int>(y.size()) != q || static_cast<int>(out.size()) != q)
    throw ValidationError("multiply: dimension mismatch");
  if (is_abelian()) {
    for (int k = 0; k < q; ++k) out[k] = x[k] + y[k];
    return;
  }
  if (n_layers() == 2) {
    for (int k = 0; k < q; ++k) out[k] = x[k] + y[k];
    for (int i = 0; i < q; ++i) {
      if (x[i] == 0.0) continue;
      for (int j = 0; j < q; ++j) {
        if (y[j] == 0.0) continue;
        for (const auto& [k, c] : table_[static_cast<std::size_t>(i * q + j)]) out[k] += 0.5 * c * x[i] * y[j];
      }
    }
    return;
  }
  std::vector<double> xv(x.begin(), x.end()), yv(y.begin(), y.end());
  auto br = [this](const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> r(a.size());
    bracket(a, b, r);
    return r;
  };
  const auto r = bch_series<double>(xv, yv, n_layers(), 0.0, br);
  std::copy(r.begin(), r.end(), out.begin());
}

GroupElement GradedLieAlgebra::multiply(std::span<const double> x, std::span<const double> y) const {
  GroupElement out(static_cast<std::size_t>(dim()));
  multiply_into(x, y, out);
  return out;
}

GroupElement GradedLieAlgebra::invert(std::span<const double> x) const {
  require(static_cast<int>(x.size()) == dim(), "invert: dimension mismatch");
  GroupElement out(x.begin(), x.end());
  for (auto& v : out) v = -v;
  return out;
}

GroupElement GradedLieAlgebra::dilate(double r, std::span<const double> t) const {
  require(r > 0.0, "dilate: r must be positive");
  require(static_cast<int>(t.size()) == dim(), "dilate: dimension mismatch");
  GroupElement out(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) out[k] = std::pow(r, weights_[k]) * t[k];
  return out;
}

double GradedLieAlgebra::hom_norm(std::span<const double> t) const {
  require(static_cast<int>(t.size()) == dim(), "hom_norm: dimension mismatch");
  double fact = 1.0;
  for (int i = 2; i <= n_layers(); ++i) fact *= i;
  const double e = 2.0 * fact;
  std::vector<double> u(t.size());
  double m = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    u[k] = weights_[k] == 1 ? std::abs(t[k]) : std::pow(std::abs(t[k]), 1.0 / weights_[k]);
    m = std::max(m, u[k]);
  }
  if (m == 0.0) return 0.0;
  double s = 0.0;
  for (double v : u) s += std::pow(v / m, e);
  return m * std::pow(s, 1.0 / e);
}

void GradedLieAlgebra::build_law() {
  const auto q = static_cast<std::size_t>(dim());
  std::vector<Polynomial> x, y;
  for (std::size_t i = 0; i < q; ++i) {
    x.push_back(Polynomial::variable(2 * q, i));
    y.push_back(Polynomial::variable(2 * q, q + i));
  }
  auto br = [this, q](const std::vector<Polynomial>& a, const std::vector<Polynomial>& b) {
    std::vector<Polynomial> out(q, Polynomial(2 * q));
    for (std::size_t i = 0; i < q; ++i) {
      if (a[i].is_zero()) continue;
      for (std::size_t j = 0; j < q; ++j) {
        if (b[j].is_zero()) continue;
        const auto& entries = table_[i * q + j];
        if (entries.empty()) continue;
        const Polynomial prod = a[i] * b[j];
        for (const auto& [k, c] : entries) out[static_cast<std::size_t>(k)] += prod * c;
      }
    }
    return out;
  };
  law_ = bch_series<Polynomial>(x, y, n_layers(), Polynomial(2 * q), br);

  std::int64_t den = 1;
  for (const auto& p : law_) {
    for (const auto& [m, c] : p.terms()) {
      int total = 0;
      for (auto e : m) total += e;
      if (total < 2) continue;
      const std::int64_t d = small_denominator(c);
      if (d == 0) {
        lattice_den_ = 0;
        return;
      }
      den = std::lcm(den, d);
      if (den > 1000) {
        lattice_den_ = 0;
        return;
      }
    }
  }
  lattice_den_ = den;
}

std::vector<VectorField> GradedLieAlgebra::left_invariant_fields() const {
  const auto q = static_cast<std::size_t>(dim());
  std::vector<VectorField> out;
  for (std::size_t j = 0; j < q; ++j) {
    VectorField f{static_cast<int>(j), weights_[j], {}};
    for (std::size_t k = 0; k < q; ++k) f.coeffs.push_back(law_[k].derivative(q + j).restrict_to(0, q));
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<VectorField> GradedLieAlgebra::right_invariant_fields() const {
  const auto q = static_cast<std::size_t>(dim());
  std::vector<VectorField> out;
  for (std::size_t j = 0; j < q; ++j) {
    VectorField f{static_cast<int>(j), weights_[j], {}};
    for (std::size_t k = 0; k < q; ++k) f.coeffs.push_back(law_[k].derivative(j).restrict_to(q, q));
    out.push_back(std::move(f));
  }
  return out;
}

double GradedLieAlgebra::jacobi_residual() const {
  const int q = dim();
  double worst = 0.0;
  std::vector<double> ei(q), ej(q), el(q), a(q), b(q), total(q);
  auto unit = [q](std::vector<double>& v, int i) {
    std::fill(v.begin(), v.end(), 0.0);
    v[i] = 1.0;
  };
  for (int i = 0; i < q; ++i)
    for (int j = i + 1; j < q; ++j)
      for (int l = j + 1; l < q; ++l) {
        std::fill(total.begin(), total.end(), 0.0);
        const int trip[3][3] = {{i, j, l}, {j, l, i}, {l, i, j}};
        for (const auto& t : trip) {
          unit(ei, t[0]);
          unit(ej, t[1]);
          unit(el, t[2]);
          bracket(ej, el, a);
          bracket(ei, a, b);
          for (int k = 0; k < q; ++k) total[k] += b[k];
        }
        for (double v : total) worst = std::max(worst, std::abs(v));
      }
  return worst;
}

bool GradedLieAlgebra::operator==(const GradedLieAlgebra& o) const {
  if (layer_dims_ != o.layer_dims_ || constants_.size() != o.constants_.size()) return false;
  for (std::size_t n = 0; n < constants_.size(); ++n) {
    const auto& a = constants_[n];
    const auto& b = o.constants_[n];
    if (a.i != b.i || a.j != b.j || a.k != b.k || a.c != b.c) return false;
  }
  return true;
}

nlohmann::json GradedLieAlgebra::to_json() const {
  nlohmann::json sc = nlohmann::json::array();
  for (const auto& c : constants_) sc.push_back({c.i, c.j, c.k, c.c});
  return {{"name", name_}, {"n_layers", n_layers()}, {"layer_dims", layer_dims_}, {"structure_constants", sc}};
}

GradedLieAlgebra GradedLieAlgebra::from_json(const nlohmann::json& j, const std::string& where) {
  auto fail = [&](const std::string& path, const std::string& msg) {
    throw ValidationError(where + path + ": " + msg);
  };
  if (!j.is_object()) fail("", "group definition must be an object");
  if (!j.contains("layer_dims")) fail("/layer_dims", "missing");
  const auto& ld = j.at("layer_dims");
  if (!ld.is_array() || ld.empty()) fail("/layer_dims", "must be a nonempty array");
  std::vector<int> dims;
  for (std::size_t l = 0; l < ld.size(); ++l) {
    if (!ld[l].is_number_integer() || ld[l].get<int>() <= 0)
      fail("/layer_dims/" + std::to_string(l), "must be a positive integer");
    dims.push_back(ld[l].get<int>());
  }
  if (j.contains("n_layers")) {
    const auto& nl = j.at("n_layers");
    if (!nl.is_number_integer()) fail("/n_layers", "must be an integer");
    if (nl.get<int>() != static_cast<int>(dims.size())) fail("/n_layers", "must equal the length of layer_dims");
  }
  std::vector<StructureConstant> constants;
  if (j.contains("structure_constants")) {
    const auto& sc = j.at("structure_constants");
    if (!sc.is_array()) fail("/structure_constants", "must be an array");
    for (std::size_t n = 0; n < sc.size(); ++n) {
      const std::string p = "/structure_constants/" + std::to_string(n);
      const auto& e = sc[n];
      if (!e.is_array() || e.size() != 4) fail(p, "must be [i, j, k, c]");
      for (int m = 0; m < 3; ++m)
        if (!e[m].is_number_integer()) fail(p + "/" + std::to_string(m), "must be an integer index");
      if (!e[3].is_number()) fail(p + "/3", "must be a number");
      constants.push_back({e[0].get<int>(), e[1].get<int>(), e[2].get<int>(), e[3].get<double>()});
    }
  }
  std::string name = "custom";
  if (j.contains("name") && j.at("name").is_string()) name = j.at("name").get<std::string>();
  try {
    return GradedLieAlgebra(dims, constants, name);
  } catch (const ValidationError& e) {
    throw ValidationError(where + ": " + e.what());
  }
}

double triangle_constant(const GradedLieAlgebra& g, std::size_t sample_count, std::uint64_t seed) {
  const auto q = static_cast<std::size_t>(g.dim());
  Rng rng(seed);
  double best = 1.0;
  std::vector<double> x(q), u(q);
  for (std::size_t s = 0; s < sample_count; ++s) {
    for (auto& v : x) v = rng.uniform(-1.0, 1.0);
    for (auto& v : u) v = rng.uniform(-1.0, 1.0);
    const double r = std::exp2(rng.uniform(-4.0, 4.0));
    const GroupElement y = g.dilate(r, u);
    const GroupElement d = g.multiply(x, g.invert(y));
    const double denom = g.hom_norm(x) + g.hom_norm(y);
    if (denom > 0.0) best = std::max(best, g.hom_norm(d) / denom);
  }
  return best;
}

}  // namespace nilconv
