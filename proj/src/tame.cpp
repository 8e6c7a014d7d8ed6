#include "nilconv/tame.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "nilconv/error.hpp"

namespace nilconv {

std::string to_string(TameKind k) {
  switch (k) {
    case TameKind::Product: return "product";
    case TameKind::Single: return "single";
    case TameKind::Flag: return "flag";
  }
  return "product";
}

TameKind tame_kind_from_string(const std::string& s) {
  if (s == "product" || s == "pk") return TameKind::Product;
  if (s == "single") return TameKind::Single;
  if (s == "flag" || s == "fk") return TameKind::Flag;
  throw ValidationError("unknown tame variant '" + s + "' (product, single, flag)");
}

namespace {

nlohmann::json factor_json(const SummandFactor& f) {
  return {{"kernel", f.kernel}, {"seminorm", f.seminorm}, {"orders", f.orders}, {"value", f.value}};
}

// Seminorm values of one kernel needed by the summands.
struct Side {
  double op = 0.0;
  double pk = 0.0;
  double fk = 0.0;
  std::vector<double> single;  // ||.||^{mu}_{k e_mu}

  static Side of(const SeminormEstimator& e, std::span<const int> k, bool flag) {
    Side s;
    s.op = e.op_norm().value;
    const auto rep = flag ? e.fk(k) : e.pk(k);
    s.pk = rep.total;
    s.fk = rep.flag_total;
    const int nu = static_cast<int>(k.size());
    for (int mu = 0; mu < nu; ++mu) s.single.push_back(rep.subset(SubsetMask::single(mu)).value);
    return s;
  }
};

std::vector<int> only(std::span<const int> k, int mu) {
  std::vector<int> out(k.size(), 0);
  out[static_cast<std::size_t>(mu)] = k[static_cast<std::size_t>(mu)];
  return out;
}

TameSummand summand(std::string label, std::vector<SummandFactor> f) {
  TameSummand s{std::move(label), std::move(f), 1.0};
  for (const auto& x : s.factors) s.value *= x.value;
  return s;
}

std::string single_name(int mu) { return "pk^{" + std::to_string(mu + 1) + "}"; }

}  // namespace

nlohmann::json TameReport::to_json() const {
  nlohmann::json sm = nlohmann::json::array();
  for (const auto& s : summands) {
    nlohmann::json fs = nlohmann::json::array();
    for (const auto& f : s.factors) fs.push_back(factor_json(f));
    sm.push_back({{"label", s.label}, {"factors", fs}, {"value", s.value}});
  }
  return {{"kind", to_string(kind)},
          {"kernels", {k_id, l_id}},
          {"k", k},
          {"lhs_seminorm", lhs_seminorm},
          {"lhs", lhs},
          {"summands", sm},
          {"rhs", rhs},
          {"ratio", ratio},
          {"composition_truncated", truncated},
          {"grid", grid},
          {"config", config}};
}

TameReport tame_report(TameKind kind, const KernelRep& k, const KernelRep& l, std::span<const int> order,
                       const GridSpec& domain, const TameOptions& opt) {
  const ProductGroup& g = domain.group();
  const int nu = g.nu();
  require(k.group() == g && l.group() == g, "tame: kernels and grid must share the group");
  std::vector<int> ord(order.begin(), order.end());
  if (kind == TameKind::Single) {
    require(ord.size() == 1 || static_cast<int>(ord.size()) == nu, "tame single: give k1 or a full order vector");
    const int k1 = ord.front();
    ord.assign(static_cast<std::size_t>(nu), 0);
    ord[0] = k1;
  } else {
    require(nu == 2, "tame: the two-parameter estimates need nu = 2");
    require(static_cast<int>(ord.size()) == nu, "tame: order vector has the wrong length");
  }
  for (int v : ord) require(v >= 0, "tame: orders must be nonnegative");

  TameReport r;
  r.kind = kind;
  r.k_id = opt.k_id;
  r.l_id = opt.l_id;
  r.k = ord;
  r.grid = domain.to_json();
  r.config = {{"seminorm", opt.seminorm.to_json()},
              {"allow_fast", opt.conv.allow_fast},
              {"pair_budget", opt.conv.pair_budget}};

  const KernelRep m = compose_kernels(k, l, domain.kernel_grid(), opt.conv, &r.truncated);
  const bool flag = kind == TameKind::Flag;
  const SeminormEstimator ek(k, domain, opt.seminorm, opt.conv);
  const SeminormEstimator el(l, domain, opt.seminorm, opt.conv);
  const SeminormEstimator em(m, domain, opt.seminorm, opt.conv);
  const std::vector<int> zero(static_cast<std::size_t>(nu), 0);

  if (kind == TameKind::Single) {
    const auto k1 = only(ord, 0);
    const SubsetMask s1 = SubsetMask::single(0);
    r.lhs_seminorm = single_name(0);
    r.lhs = em.subset_term(k1, s1).value;
    const double ks = ek.subset_term(k1, s1).value, ls = el.subset_term(k1, s1).value;
    r.summands.push_back(summand("K^{1} Op(L)", {{"K", single_name(0), k1, ks}, {"L", "op", zero, el.op_norm().value}}));
    r.summands.push_back(summand("Op(K) L^{1}", {{"K", "op", zero, ek.op_norm().value}, {"L", single_name(0), k1, ls}}));
  } else {
    const Side sk = Side::of(ek, ord, flag), sl = Side::of(el, ord, flag);
    const auto mr = flag ? em.fk(ord) : em.pk(ord);
    const std::string outer = flag ? "fk" : "pk";
    r.lhs_seminorm = outer;
    r.lhs = flag ? mr.flag_total : mr.total;
    const double kf = flag ? sk.fk : sk.pk, lf = flag ? sl.fk : sl.pk;
    const auto o1 = only(ord, 0), o2 = only(ord, 1);
    r.summands.push_back(summand("Op(K) L", {{"K", "op", zero, sk.op}, {"L", outer, ord, lf}}));
    r.summands.push_back(summand("K^{1} L^{2}", {{"K", single_name(0), o1, sk.single[0]}, {"L", single_name(1), o2, sl.single[1]}}));
    r.summands.push_back(summand("K^{2} L^{1}", {{"K", single_name(1), o2, sk.single[1]}, {"L", single_name(0), o1, sl.single[0]}}));
    r.summands.push_back(summand("K Op(L)", {{"K", outer, ord, kf}, {"L", "op", zero, sl.op}}));
  }
  for (const auto& s : r.summands) r.rhs += s.value;
  r.ratio = r.rhs > 0.0 ? r.lhs / r.rhs : (r.lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  return r;
}

TameReport tame_report_pk(const KernelRep& k, const KernelRep& l, std::span<const int> order, const GridSpec& domain,
                          const TameOptions& opt) {
  return tame_report(TameKind::Product, k, l, order, domain, opt);
}

TameReport tame_report_single(const KernelRep& k, const KernelRep& l, int k1, const GridSpec& domain,
                              const TameOptions& opt) {
  const int o[1] = {k1};
  return tame_report(TameKind::Single, k, l, o, domain, opt);
}

TameReport tame_report_fk(const KernelRep& k, const KernelRep& l, std::span<const int> order, const GridSpec& domain,
                          const TameOptions& opt) {
  return tame_report(TameKind::Flag, k, l, order, domain, opt);
}

bool tameness_structure_ok(const TameReport& r, std::string* why) {
  for (const auto& s : r.summands)
    for (std::size_t mu = 0; mu < r.k.size(); ++mu) {
      int carriers = 0;
      for (const auto& f : s.factors) {
        if (f.orders.size() != r.k.size()) {
          if (why) *why = s.label + ": order vector has the wrong length";
          return false;
        }
        if (f.orders[mu] > 0) ++carriers;
      }
      if (carriers > 1) {
        if (why) *why = s.label + ": parameter " + std::to_string(mu + 1) + " carries orders on both factors";
        return false;
      }
    }
  return true;
}

TameReport relabeled(const TameReport& r) {
  TameReport out = r;
  std::swap(out.k_id, out.l_id);
  for (auto& s : out.summands)
    for (auto& f : s.factors) f.kernel = f.kernel == "K" ? "L" : "K";
  return out;
}

bool relabeling_identity(const TameReport& r, const TameReport& swapped) {
  if (r.summands.size() != swapped.summands.size() || r.k != swapped.k || r.kind != swapped.kind) return false;
  auto key = [](const TameSummand& s) {
    auto f = s.factors;
    std::sort(f.begin(), f.end(), [](const SummandFactor& a, const SummandFactor& b) { return a.kernel < b.kernel; });
    return f;
  };
  const TameReport rel = relabeled(r);
  std::vector<bool> used(swapped.summands.size(), false);
  for (const auto& s : rel.summands) {
    const auto ks = key(s);
    bool found = false;
    for (std::size_t i = 0; i < swapped.summands.size() && !found; ++i)
      if (!used[i] && key(swapped.summands[i]) == ks && swapped.summands[i].value == s.value) {
        used[i] = true;
        found = true;
      }
    if (!found) return false;
  }
  return true;
}

std::string tame_csv_header(const TameReport& r) {
  std::string h = "kind,k_id,l_id,k,lhs,rhs,ratio";
  for (std::size_t i = 0; i < r.summands.size(); ++i) h += ",summand" + std::to_string(i + 1);
  return h + "\n";
}

std::string tame_csv_row(const TameReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << to_string(r.kind) << ',' << r.k_id << ',' << r.l_id << ',';
  for (std::size_t i = 0; i < r.k.size(); ++i) os << (i ? ";" : "") << r.k[i];
  os << ',' << r.lhs << ',' << r.rhs << ',' << r.ratio;
  for (const auto& s : r.summands) os << ',' << s.value;
  os << '\n';
  return os.str();
}

}  // namespace nilconv
