#include "nilconv/product_group.hpp"

#include <bit>
#include <cmath>
#include <sstream>

#include "nilconv/error.hpp"

namespace nilconv {

int SubsetMask::count() const { return std::popcount(bits_); }

std::vector<int> SubsetMask::members(int nu) const {
  std::vector<int> out;
  for (int mu = 0; mu < nu; ++mu)
    if (contains(mu)) out.push_back(mu);
  return out;
}

std::vector<SubsetMask> SubsetMask::enumerate(int nu) {
  std::vector<SubsetMask> out;
  for (std::uint32_t b = 0; b < (1u << nu); ++b) out.emplace_back(b);
  return out;
}

std::string SubsetMask::to_string(int nu) const {
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (int mu : members(nu)) {
    os << (first ? "" : ",") << mu + 1;
    first = false;
  }
  os << "}";
  return os.str();
}

MultiIndex::MultiIndex(std::vector<std::vector<int>> parts) : parts_(std::move(parts)) {
  for (const auto& p : parts_)
    for (int v : p) require(v >= 0, "multi-index entries must be nonnegative");
}

MultiIndex MultiIndex::zero(std::span<const int> dims) {
  std::vector<std::vector<int>> parts;
  for (int q : dims) parts.emplace_back(static_cast<std::size_t>(q), 0);
  return MultiIndex(std::move(parts));
}

int MultiIndex::isotropic(int mu) const {
  int s = 0;
  for (int v : part(mu)) s += v;
  return s;
}

MultiIndex MultiIndex::operator+(const MultiIndex& o) const {
  require(parts_.size() == o.parts_.size(), "multi-index shape mismatch");
  auto out = parts_;
  for (std::size_t mu = 0; mu < out.size(); ++mu) {
    require(out[mu].size() == o.parts_[mu].size(), "multi-index shape mismatch");
    for (std::size_t j = 0; j < out[mu].size(); ++j) out[mu][j] += o.parts_[mu][j];
  }
  return MultiIndex(std::move(out));
}

std::string MultiIndex::to_string() const {
  std::ostringstream os;
  for (std::size_t mu = 0; mu < parts_.size(); ++mu) {
    os << (mu ? ";" : "") << "(";
    for (std::size_t j = 0; j < parts_[mu].size(); ++j) os << (j ? "," : "") << parts_[mu][j];
    os << ")";
  }
  return os.str();
}

ProductGroup::ProductGroup(std::vector<GradedLieAlgebra> factors) : factors_(std::move(factors)) {
  require(!factors_.empty(), "product group needs at least one factor");
  require(factors_.size() <= 16, "product group: at most 16 factors");
  for (std::size_t mu = 0; mu < factors_.size(); ++mu) {
    const auto& g = factors_[mu];
    offsets_.push_back(q_);
    qs_.push_back(g.dim());
    q_ += g.dim();
    for (int w : g.weights()) {
      weights_.push_back(w);
      factor_of_.push_back(static_cast<int>(mu));
    }
  }
}

bool ProductGroup::all_abelian() const {
  for (const auto& g : factors_)
    if (!g.is_abelian()) return false;
  return true;
}

void ProductGroup::multiply_into(std::span<const double> x, std::span<const double> y,
                                 std::span<double> out) const {
  if (static_cast<int>(x.size()) != q_ || static_cast<int>(y.size()) != q_ || static_cast<int>(out.size()) != q_)
    throw ValidationError("product multiply: dimension mismatch");
  for (int mu = 0; mu < nu(); ++mu) {
    const auto o = static_cast<std::size_t>(offsets_[mu]);
    const auto n = static_cast<std::size_t>(qs_[mu]);
    factors_[mu].multiply_into(x.subspan(o, n), y.subspan(o, n), out.subspan(o, n));
  }
}

GroupElement ProductGroup::multiply(std::span<const double> x, std::span<const double> y) const {
  GroupElement out(static_cast<std::size_t>(q_));
  multiply_into(x, y, out);
  return out;
}

GroupElement ProductGroup::invert(std::span<const double> x) const {
  require(static_cast<int>(x.size()) == q_, "product invert: dimension mismatch");
  GroupElement out(x.begin(), x.end());
  for (auto& v : out) v = -v;
  return out;
}

GroupElement ProductGroup::multi_dilate(std::span<const double> r, std::span<const double> t) const {
  require(static_cast<int>(r.size()) == nu(), "multi_dilate: need one scale per factor");
  require(static_cast<int>(t.size()) == q_, "multi_dilate: dimension mismatch");
  GroupElement out(t.size());
  for (std::size_t j = 0; j < t.size(); ++j) {
    const double rm = r[static_cast<std::size_t>(factor_of_[j])];
    require(rm > 0.0, "multi_dilate: scales must be positive");
    out[j] = std::pow(rm, weights_[j]) * t[j];
  }
  return out;
}

std::vector<double> ProductGroup::factor_norms(std::span<const double> t) const {
  require(static_cast<int>(t.size()) == q_, "factor_norms: dimension mismatch");
  std::vector<double> out;
  for (int mu = 0; mu < nu(); ++mu)
    out.push_back(factors_[mu].hom_norm(t.subspan(static_cast<std::size_t>(offsets_[mu]), static_cast<std::size_t>(qs_[mu]))));
  return out;
}

std::vector<int> ProductGroup::hom_degree(const MultiIndex& alpha) const {
  require(alpha.factors() == nu(), "hom_degree: multi-index has the wrong number of factors");
  std::vector<int> out;
  for (int mu = 0; mu < nu(); ++mu) {
    const auto& p = alpha.part(mu);
    require(static_cast<int>(p.size()) == qs_[mu], "hom_degree: factor dimension mismatch");
    int d = 0;
    for (std::size_t j = 0; j < p.size(); ++j) d += factors_[mu].weights()[j] * p[j];
    out.push_back(d);
  }
  return out;
}

std::vector<MultiIndex> ProductGroup::multi_indices_up_to(std::span<const int> k, SubsetMask s) const {
  require(static_cast<int>(k.size()) == nu(), "multi_indices_up_to: need one order per factor");
  // Per factor: all tuples with entries summing to at most k_mu.
  std::vector<std::vector<std::vector<int>>> per;
  for (int mu = 0; mu < nu(); ++mu) {
    const int q = qs_[mu];
    const int kmax = s.contains(mu) ? k[mu] : 0;
    std::vector<std::vector<int>> tuples;
    std::vector<int> cur(static_cast<std::size_t>(q), 0);
    auto rec = [&](auto&& self, int pos, int left) -> void {
      if (pos == q) {
        tuples.push_back(cur);
        return;
      }
      for (int v = 0; v <= left; ++v) {
        cur[pos] = v;
        self(self, pos + 1, left - v);
      }
      cur[pos] = 0;
    };
    rec(rec, 0, kmax);
    per.push_back(std::move(tuples));
  }
  std::vector<MultiIndex> out;
  std::vector<std::vector<int>> parts(static_cast<std::size_t>(nu()));
  auto rec = [&](auto&& self, int mu) -> void {
    if (mu == nu()) {
      out.emplace_back(parts);
      return;
    }
    for (const auto& t : per[mu]) {
      parts[mu] = t;
      self(self, mu + 1);
    }
  };
  rec(rec, 0);
  return out;
}

nlohmann::json ProductGroup::to_json() const {
  nlohmann::json f = nlohmann::json::array();
  for (const auto& g : factors_) f.push_back(g.to_json());
  return f;
}

MultiIndex project(const MultiIndex& alpha, SubsetMask s) {
  auto parts = alpha.parts();
  for (std::size_t mu = 0; mu < parts.size(); ++mu)
    if (!s.contains(static_cast<int>(mu)))
      for (auto& v : parts[mu]) v = 0;
  return MultiIndex(std::move(parts));
}

std::vector<int> zero_outside(std::span<const int> k, SubsetMask s) {
  std::vector<int> out(k.begin(), k.end());
  for (std::size_t mu = 0; mu < out.size(); ++mu)
    if (!s.contains(static_cast<int>(mu))) out[mu] = 0;
  return out;
}

}  // namespace nilconv
