#include "nilconv/kernel.hpp"

#include <cmath>

#include "nilconv/dyadic.hpp"
#include "nilconv/error.hpp"

namespace nilconv {

namespace {

double inv_t_derivative(int k, double t) {
  // d^k/dt^k 1/t = (-1)^k k! / t^{k+1}
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return ((k % 2) ? -f : f) / std::pow(t, k + 1);
}

bool is_odd(int m) { return (m % 2) != 0; }

void check_closed_form_group(const ProductGroup& g, ClosedFormId id, int component) {
  auto abelian_line = [&](int mu) { return g.factor(mu).is_abelian() && g.dim(mu) == 1; };
  switch (id) {
    case ClosedFormId::Hilbert:
      require(g.nu() == 1 && abelian_line(0), "hilbert kernel lives on R");
      break;
    case ClosedFormId::InverseCross:
    case ClosedFormId::FlagModel:
      require(g.nu() == 2 && abelian_line(0) && abelian_line(1), to_string(id) + " kernel lives on R x R");
      break;
    case ClosedFormId::Riesz:
      require(g.nu() == 1 && g.factor(0).is_abelian(), "riesz kernel lives on R^q");
      require(component >= 0 && component < g.dim(), "riesz component out of range");
      break;
  }
}

}  // namespace

std::string to_string(ClosedFormId id) {
  switch (id) {
    case ClosedFormId::Hilbert: return "hilbert";
    case ClosedFormId::InverseCross: return "inverse-cross";
    case ClosedFormId::FlagModel: return "flag-model";
    case ClosedFormId::Riesz: return "riesz";
  }
  return "?";
}

ClosedFormId closed_form_from_string(const std::string& s) {
  if (s == "hilbert") return ClosedFormId::Hilbert;
  if (s == "inverse-cross") return ClosedFormId::InverseCross;
  if (s == "flag-model") return ClosedFormId::FlagModel;
  if (s == "riesz") return ClosedFormId::Riesz;
  throw ValidationError("unknown closed-form kernel '" + s + "'");
}

KernelRep::KernelRep(std::shared_ptr<const ProductGroup> group, Variant v) : group_(std::move(group)), rep_(std::move(v)) {
  require(group_ != nullptr, "kernel: group required");
}

KernelRep KernelRep::delta(const ProductGroup& g, cplx amplitude) {
  return KernelRep(std::make_shared<const ProductGroup>(g), DeltaKernel{amplitude});
}

KernelRep KernelRep::closed_form(const ProductGroup& g, ClosedFormId id, int component) {
  check_closed_form_group(g, id, component);
  return KernelRep(std::make_shared<const ProductGroup>(g), ClosedFormKernel{id, component});
}

KernelRep KernelRep::grid(GridFunction f, bool principal_value) {
  auto group = f.spec().group_ptr();
  return KernelRep(group, GridKernel{std::make_shared<const GridFunction>(std::move(f)), principal_value});
}

KernelRep KernelRep::dyadic(std::shared_ptr<const DyadicDecomposition> d) {
  require(d != nullptr, "kernel: dyadic data required");
  auto group = std::make_shared<const ProductGroup>(d->group());
  return KernelRep(group, DyadicKernel{std::move(d)});
}

KernelRep KernelRep::tensor(std::vector<KernelRep> factors) {
  require(!factors.empty(), "tensor kernel needs factors");
  std::vector<GradedLieAlgebra> gs;
  for (const auto& f : factors) {
    require(f.group().nu() == 1, "tensor kernel factors must live on single groups");
    gs.push_back(f.group().factor(0));
  }
  return KernelRep(std::make_shared<const ProductGroup>(std::move(gs)), TensorKernel{std::move(factors)});
}

KernelRep KernelRep::scaled(cplx c) const {
  KernelRep out = *this;
  out.scale_ *= c;
  return out;
}

std::vector<KernelRep> KernelRep::tensor_factors() const {
  const auto* t = std::get_if<TensorKernel>(&rep_);
  require(t != nullptr, "tensor_factors: not a tensor kernel");
  // adjoint() toggles reflection and conjugation together, so they agree.
  std::vector<KernelRep> out;
  for (const auto& f : t->factors) out.push_back(reflected_ ? f.adjoint() : f);
  out.front() = out.front().scaled(scale_);
  return out;
}

KernelRep KernelRep::adjoint() const {
  KernelRep out = *this;
  out.scale_ = std::conj(scale_);
  out.reflected_ = !reflected_;
  out.conjugated_ = !conjugated_;
  return out;
}

std::string KernelRep::kind() const {
  return std::visit(
      [](const auto& r) -> std::string {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, DeltaKernel>) return "delta";
        else if constexpr (std::is_same_v<T, ClosedFormKernel>) return "closed-form";
        else if constexpr (std::is_same_v<T, GridKernel>) return "grid";
        else if constexpr (std::is_same_v<T, DyadicKernel>) return "dyadic";
        else return "tensor";
      },
      rep_);
}

nlohmann::json KernelRep::describe() const {
  nlohmann::json j = {{"kind", kind()},
                      {"scale", {scale_.real(), scale_.imag()}},
                      {"reflected", reflected_},
                      {"conjugated", conjugated_}};
  std::visit(
      [&](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, DeltaKernel>) {
          j["amplitude"] = {r.amplitude.real(), r.amplitude.imag()};
        } else if constexpr (std::is_same_v<T, ClosedFormKernel>) {
          j["id"] = to_string(r.id);
          if (r.id == ClosedFormId::Riesz) j["component"] = r.component;
        } else if constexpr (std::is_same_v<T, GridKernel>) {
          j["grid"] = r.data->spec().to_json();
          j["principal_value"] = r.principal_value;
        } else if constexpr (std::is_same_v<T, DyadicKernel>) {
          j["dyadic"] = r.data->to_json();
        } else {
          nlohmann::json f = nlohmann::json::array();
          for (const auto& k : r.factors) f.push_back(k.describe());
          j["factors"] = f;
        }
      },
      rep_);
  return j;
}

std::optional<cplx> KernelRep::delta_amplitude() const {
  std::optional<cplx> base;
  if (const auto* d = std::get_if<DeltaKernel>(&rep_)) {
    base = d->amplitude;
  } else if (const auto* t = std::get_if<TensorKernel>(&rep_)) {
    cplx a = 1.0;
    for (const auto& f : t->factors) {
      auto fa = f.delta_amplitude();
      if (!fa) return std::nullopt;
      a *= *fa;
    }
    base = a;
  }
  if (!base) return std::nullopt;
  cplx v = conjugated_ ? std::conj(*base) : *base;
  return scale_ * v;
}

bool KernelRep::is_function() const {
  if (std::holds_alternative<DeltaKernel>(rep_)) return false;
  if (const auto* t = std::get_if<TensorKernel>(&rep_))
    for (const auto& f : t->factors)
      if (!f.is_function()) return false;
  return true;
}

cplx KernelRep::base_eval(std::span<const double> t) const {
  return std::visit(
      [&](const auto& r) -> cplx {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, DeltaKernel>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, ClosedFormKernel>) {
          switch (r.id) {
            case ClosedFormId::Hilbert:
              return t[0] == 0.0 ? 0.0 : 1.0 / (M_PI * t[0]);
            case ClosedFormId::InverseCross:
              return (t[0] == 0.0 || t[1] == 0.0) ? 0.0 : 1.0 / (t[0] * t[1]);
            case ClosedFormId::FlagModel:
              return t[0] == 0.0 ? 0.0 : 1.0 / (t[0] * (std::abs(t[0]) + std::abs(t[1])));
            case ClosedFormId::Riesz: {
              const auto q = static_cast<double>(t.size());
              double r2 = 0.0;
              for (double v : t) r2 += v * v;
              if (r2 == 0.0) return 0.0;
              const double c = std::tgamma(0.5 * (q + 1.0)) / std::pow(M_PI, 0.5 * (q + 1.0));
              return c * t[r.component] / std::pow(r2, 0.5 * (q + 1.0));
            }
          }
          return 0.0;
        } else if constexpr (std::is_same_v<T, GridKernel>) {
          return interpolate(*r.data, t);
        } else if constexpr (std::is_same_v<T, DyadicKernel>) {
          return r.data->eval(t);
        } else {
          cplx v = 1.0;
          for (int mu = 0; mu < group_->nu(); ++mu) {
            v *= r.factors[mu].eval(
                t.subspan(static_cast<std::size_t>(group_->offset(mu)), static_cast<std::size_t>(group_->dim(mu))));
            if (v == 0.0) break;
          }
          return v;
        }
      },
      rep_);
}

cplx KernelRep::eval(std::span<const double> t) const {
  require(static_cast<int>(t.size()) == group_->dim(), "kernel eval: dimension mismatch");
  cplx v;
  if (reflected_) {
    const GroupElement inv = group_->invert(t);
    v = base_eval(inv);
  } else {
    v = base_eval(t);
  }
  if (conjugated_) v = std::conj(v);
  return scale_ * v;
}

std::optional<cplx> KernelRep::analytic_derivative(std::span<const int> alpha, std::span<const double> t) const {
  require(static_cast<int>(t.size()) == group_->dim() && alpha.size() == t.size(),
          "kernel derivative: dimension mismatch");
  GroupElement p(t.begin(), t.end());
  int total = 0;
  for (int a : alpha) total += a;
  if (reflected_) p = group_->invert(t);
  std::optional<cplx> base = std::visit(
      [&](const auto& r) -> std::optional<cplx> {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, DeltaKernel>) {
          for (double v : p)
            if (v != 0.0) return cplx(0.0);
          return std::nullopt;
        } else if constexpr (std::is_same_v<T, ClosedFormKernel>) {
          if (r.id == ClosedFormId::Hilbert) {
            if (p[0] == 0.0) return std::nullopt;
            return cplx(inv_t_derivative(alpha[0], p[0]) / M_PI);
          }
          if (r.id == ClosedFormId::InverseCross) {
            if (p[0] == 0.0 || p[1] == 0.0) return std::nullopt;
            return cplx(inv_t_derivative(alpha[0], p[0]) * inv_t_derivative(alpha[1], p[1]));
          }
          return std::nullopt;
        } else if constexpr (std::is_same_v<T, TensorKernel>) {
          cplx v = 1.0;
          for (int mu = 0; mu < group_->nu(); ++mu) {
            const auto o = static_cast<std::size_t>(group_->offset(mu));
            const auto n = static_cast<std::size_t>(group_->dim(mu));
            auto d = r.factors[mu].analytic_derivative(alpha.subspan(o, n), std::span<const double>(p).subspan(o, n));
            if (!d) return std::nullopt;
            v *= *d;
          }
          return v;
        } else {
          return std::nullopt;
        }
      },
      rep_);
  if (!base) return std::nullopt;
  cplx v = *base;
  if (reflected_ && (total % 2)) v = -v;
  if (conjugated_) v = std::conj(v);
  return scale_ * v;
}

GridFunction KernelRep::base_render(const GridSpec& spec) const {
  require(spec.group().dim() == group_->dim() && spec.group().nu() == group_->nu(),
          "kernel render: grid group does not match kernel group");
  return std::visit(
      [&](const auto& r) -> GridFunction {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, DeltaKernel>) {
          return GridFunction::delta(spec, r.amplitude);
        } else if constexpr (std::is_same_v<T, ClosedFormKernel>) {
          GridFunction out(spec);
          std::vector<int> m(static_cast<std::size_t>(spec.ndim()));
          std::vector<double> x(static_cast<std::size_t>(spec.ndim()));
          for (std::size_t i = 0; i < spec.size(); ++i) {
            spec.lattice(i, m);
            spec.coords(i, x);
            switch (r.id) {
              case ClosedFormId::Hilbert:
                if (is_odd(m[0])) out[i] = 2.0 / (M_PI * x[0]);
                break;
              case ClosedFormId::InverseCross:
                if (is_odd(m[0]) && is_odd(m[1])) out[i] = 4.0 / (x[0] * x[1]);
                break;
              case ClosedFormId::FlagModel:
                if (is_odd(m[0])) out[i] = 2.0 / (x[0] * (std::abs(x[0]) + std::abs(x[1])));
                break;
              case ClosedFormId::Riesz:
                out[i] = base_eval(x);
                break;
            }
          }
          return out;
        } else if constexpr (std::is_same_v<T, GridKernel>) {
          if (r.data->spec().same_spacing(spec)) return r.data->resampled(spec);
          return GridFunction::sample(spec, [&](std::span<const double> x) { return interpolate(*r.data, x); });
        } else if constexpr (std::is_same_v<T, DyadicKernel>) {
          return GridFunction::sample(spec, [&](std::span<const double> x) { return cplx(r.data->eval(x)); });
        } else {
          std::vector<GridFunction> parts;
          for (int mu = 0; mu < spec.group().nu(); ++mu) parts.push_back(r.factors[mu].render(spec.factor_spec(mu)));
          GridFunction out(spec);
          std::vector<int> m(static_cast<std::size_t>(spec.ndim()));
          for (std::size_t i = 0; i < spec.size(); ++i) {
            spec.lattice(i, m);
            cplx v = 1.0;
            for (int mu = 0; mu < spec.group().nu() && v != 0.0; ++mu) {
              const auto o = static_cast<std::size_t>(spec.group().offset(mu));
              const auto n = static_cast<std::size_t>(spec.group().dim(mu));
              v *= parts[mu].at_lattice(std::span<const int>(m).subspan(o, n));
            }
            out[i] = v;
          }
          return out;
        }
      },
      rep_);
}

GridFunction KernelRep::render(const GridSpec& spec) const {
  GridFunction base = base_render(spec);
  if (!reflected_ && !conjugated_ && scale_ == 1.0) return base;
  GridFunction out(spec);
  std::vector<int> m(static_cast<std::size_t>(spec.ndim()));
  for (std::size_t i = 0; i < spec.size(); ++i) {
    cplx v;
    if (reflected_) {
      spec.lattice(i, m);
      for (auto& e : m) e = -e;
      v = base.at_lattice(m);
    } else {
      v = base[i];
    }
    if (conjugated_) v = std::conj(v);
    out[i] = scale_ * v;
  }
  return out;
}

cplx interpolate(const GridFunction& f, std::span<const double> t) {
  const GridSpec& spec = f.spec();
  const int d = spec.ndim();
  require(static_cast<int>(t.size()) == d, "interpolate: dimension mismatch");
  std::vector<int> base(static_cast<std::size_t>(d)), m(static_cast<std::size_t>(d));
  std::vector<double> frac(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a) {
    const double u = t[a] / spec.axes()[a].spacing;
    const double fl = std::floor(u);
    base[a] = static_cast<int>(fl);
    frac[a] = u - fl;
    if (frac[a] < 1e-9) frac[a] = 0.0;
    if (frac[a] > 1.0 - 1e-9) {
      frac[a] = 0.0;
      base[a] += 1;
    }
  }
  cplx acc = 0.0;
  for (unsigned corner = 0; corner < (1u << d); ++corner) {
    double w = 1.0;
    for (int a = 0; a < d && w != 0.0; ++a) {
      const bool up = (corner >> a) & 1u;
      w *= up ? frac[a] : 1.0 - frac[a];
      m[a] = base[a] + (up ? 1 : 0);
    }
    if (w != 0.0) acc += w * f.at_lattice(m);
  }
  return acc;
}

}  // namespace nilconv
