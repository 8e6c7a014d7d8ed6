#include "nilconv/grid.hpp"

#include <algorithm>
#include <cmath>

#include "nilconv/error.hpp"

namespace nilconv {

GridSpec::GridSpec(ProductGroup group, std::vector<Axis> axes, int n, double t)
    : group_(std::make_shared<const ProductGroup>(std::move(group))), axes_(std::move(axes)), n_(n), t_(t) {
  require(static_cast<int>(axes_.size()) == group_->dim(), "grid: one axis per coordinate required");
  strides_.assign(axes_.size(), 1);
  size_ = 1;
  cell_volume_ = 1.0;
  for (int a = ndim() - 1; a >= 0; --a) {
    require(axes_[a].count >= 1, "grid: axis counts must be positive");
    require(axes_[a].spacing > 0.0, "grid: spacings must be positive");
    strides_[a] = size_;
    size_ *= static_cast<std::size_t>(axes_[a].count);
    cell_volume_ *= axes_[a].spacing;
  }
  for (const auto& g : group_->factors())
    if (!g.is_abelian() && g.lattice_denominator() == 0) lattice_exact_ = false;
}

GridSpec GridSpec::make(const ProductGroup& group, int n, double t) {
  require(n >= 4, "grid: N must be at least 4");
  require(t > 0.0, "grid: T must be positive");
  const double h = 2.0 * t / n;
  std::vector<Axis> axes;
  for (int mu = 0; mu < group.nu(); ++mu) {
    const auto& g = group.factor(mu);
    const double d = g.lattice_denominator() > 0 ? static_cast<double>(g.lattice_denominator()) : 1.0;
    for (int w : g.weights()) axes.push_back({n, std::pow(h, w) / std::pow(d, w - 1)});
  }
  return GridSpec(group, std::move(axes), n, t);
}

GridSpec GridSpec::scaled_counts(int factor) const {
  require(factor >= 1, "grid: count factor must be positive");
  auto axes = axes_;
  for (auto& a : axes) a.count *= factor;
  GridSpec out(*group_, std::move(axes), n_ * factor, t_ * factor);
  out.group_ = group_;
  return out;
}

GridSpec GridSpec::factor_spec(int mu) const {
  const int o = group_->offset(mu);
  std::vector<Axis> axes(axes_.begin() + o, axes_.begin() + o + group_->dim(mu));
  return GridSpec(ProductGroup::single(group_->factor(mu)), std::move(axes), n_, t_);
}

double GridSpec::factor_cell_volume(int mu) const {
  double v = 1.0;
  for (int a = group_->offset(mu); a < group_->offset(mu) + group_->dim(mu); ++a) v *= axes_[a].spacing;
  return v;
}

void GridSpec::lattice(std::size_t flat, std::span<int> m) const {
  for (int a = 0; a < ndim(); ++a) {
    const auto c = static_cast<std::size_t>(axes_[a].count);
    m[a] = static_cast<int>((flat / strides_[a]) % c) + axes_[a].lo();
  }
}

std::size_t GridSpec::flat(std::span<const int> m) const {
  std::size_t f = 0;
  for (int a = 0; a < ndim(); ++a) f += static_cast<std::size_t>(m[a] - axes_[a].lo()) * strides_[a];
  return f;
}

bool GridSpec::in_range(std::span<const int> m) const {
  for (int a = 0; a < ndim(); ++a)
    if (m[a] < axes_[a].lo() || m[a] > axes_[a].hi()) return false;
  return true;
}

bool GridSpec::in_symmetric_range(std::span<const int> m) const {
  for (int a = 0; a < ndim(); ++a) {
    const int r = std::min(-axes_[a].lo(), axes_[a].hi());
    if (m[a] < -r || m[a] > r) return false;
  }
  return true;
}

void GridSpec::coords(std::size_t flat, std::span<double> x) const {
  for (int a = 0; a < ndim(); ++a) {
    const auto c = static_cast<std::size_t>(axes_[a].count);
    const int m = static_cast<int>((flat / strides_[a]) % c) + axes_[a].lo();
    x[a] = m * axes_[a].spacing;
  }
}

std::vector<double> GridSpec::coords(std::size_t flat) const {
  std::vector<double> x(axes_.size());
  coords(flat, x);
  return x;
}

void GridSpec::nearest(std::span<const double> x, std::span<int> m) const {
  for (int a = 0; a < ndim(); ++a) m[a] = static_cast<int>(std::lround(x[a] / axes_[a].spacing));
}

bool GridSpec::same_spacing(const GridSpec& o) const {
  if (o.ndim() != ndim()) return false;
  for (int a = 0; a < ndim(); ++a)
    if (std::abs(axes_[a].spacing - o.axes_[a].spacing) > 1e-12 * axes_[a].spacing) return false;
  return true;
}

bool GridSpec::operator==(const GridSpec& o) const {
  if (!(*group_ == *o.group_) || o.ndim() != ndim()) return false;
  for (int a = 0; a < ndim(); ++a)
    if (axes_[a].count != o.axes_[a].count) return false;
  return same_spacing(o);
}

nlohmann::json GridSpec::to_json() const {
  nlohmann::json ax = nlohmann::json::array();
  for (const auto& a : axes_) ax.push_back({{"count", a.count}, {"spacing", a.spacing}});
  return {{"N", n_}, {"T", t_}, {"axes", ax}, {"cell_volume", cell_volume_}, {"lattice_exact", lattice_exact_}};
}

GridFunction::GridFunction(GridSpec spec) : spec_(std::move(spec)), values_(spec_.size(), cplx(0.0)) {}

GridFunction::GridFunction(GridSpec spec, std::vector<cplx> values) : spec_(std::move(spec)), values_(std::move(values)) {
  require(values_.size() == spec_.size(), "grid function: value count does not match grid");
}

GridFunction GridFunction::sample(const GridSpec& spec, const std::function<cplx(std::span<const double>)>& f) {
  GridFunction out(spec);
  std::vector<double> x(static_cast<std::size_t>(spec.ndim()));
  for (std::size_t i = 0; i < spec.size(); ++i) {
    spec.coords(i, x);
    out.values_[i] = f(x);
  }
  return out;
}

GridFunction GridFunction::delta(const GridSpec& spec, cplx amplitude) {
  GridFunction out(spec);
  std::vector<int> zero(static_cast<std::size_t>(spec.ndim()), 0);
  out.values_[spec.flat(zero)] = amplitude / spec.cell_volume();
  return out;
}

cplx GridFunction::at_lattice(std::span<const int> m) const {
  if (!spec_.in_range(m)) return 0.0;
  return values_[spec_.flat(m)];
}

double GridFunction::l2_norm() const {
  double s = 0.0;
  for (const auto& v : values_) s += std::norm(v);
  return std::sqrt(s * spec_.cell_volume());
}

cplx GridFunction::inner(const GridFunction& g) const {
  require(g.size() == size(), "inner: grid mismatch");
  cplx s = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) s += values_[i] * std::conj(g.values_[i]);
  return s * spec_.cell_volume();
}

double GridFunction::sup_norm() const {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, std::abs(v));
  return m;
}

GridFunction GridFunction::resampled(const GridSpec& target) const {
  require(spec_.same_spacing(target), "resample: grids must share spacing");
  GridFunction out(target);
  std::vector<int> m(static_cast<std::size_t>(target.ndim()));
  for (std::size_t i = 0; i < target.size(); ++i) {
    target.lattice(i, m);
    out.values_[i] = at_lattice(m);
  }
  return out;
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
  require(o.size() == size(), "grid function: size mismatch");
  for (std::size_t i = 0; i < size(); ++i) values_[i] += o.values_[i];
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& o) {
  require(o.size() == size(), "grid function: size mismatch");
  for (std::size_t i = 0; i < size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

GridFunction& GridFunction::operator*=(cplx c) {
  for (auto& v : values_) v *= c;
  return *this;
}

void GridFunction::axpy(cplx a, const GridFunction& x) {
  require(x.size() == size(), "grid function: size mismatch");
  for (std::size_t i = 0; i < size(); ++i) values_[i] += a * x.values_[i];
}

}  // namespace nilconv
