#include <doctest.h>

#include <cmath>

#include "nilconv/dyadic.hpp"
#include "nilconv/error.hpp"
#include "nilconv/tame.hpp"

using namespace nilconv;

namespace {

ProductGroup abelian2() { return ProductGroup({GradedLieAlgebra::abelian(1), GradedLieAlgebra::abelian(1)}); }

KernelRep random_dyadic(const ProductGroup& g, std::uint64_t seed, bool flag = false) {
  DyadicOptions o;
  o.family = ProfileFamily::RandomSmooth;
  o.seed = seed;
  o.flag_mode = flag;
  return KernelRep::dyadic(synth_dyadic(g, DyadicWindow::cube(2, -2, 2), o));
}

TameOptions options() {
  TameOptions o;
  o.seminorm.triangle_samples = 20000;
  return o;
}

double op_summand(const TameReport& r, const std::string& kernel) {
  for (const auto& s : r.summands)
    for (const auto& f : s.factors)
      if (f.kernel == kernel && f.seminorm == "op") return s.value;
  return -1.0;
}

}  // namespace

TEST_CASE("delta is a convolution identity for every variant") {
  const auto g = abelian2();
  const auto dom = GridSpec::make(g, 16, 4.0);
  const auto d = KernelRep::delta(g);
  const std::vector<int> k = {1, 1};
  for (const bool flag : {false, true}) {
    const auto l = random_dyadic(g, 5, flag);
    for (const auto kind : {TameKind::Product, TameKind::Single, TameKind::Flag}) {
      if ((kind == TameKind::Flag) != flag) continue;
      const auto left = tame_report(kind, d, l, k, dom, options());
      const auto right = tame_report(kind, l, d, k, dom, options());
      CHECK(left.lhs > 0.0);
      CHECK(left.ratio <= 1.0 + 1e-9);
      CHECK(right.ratio <= 1.0 + 1e-9);
      // The summand carrying Op(delta) reproduces the left side.
      CHECK(op_summand(left, "K") == doctest::Approx(left.lhs).epsilon(1e-9));
      CHECK(op_summand(right, "L") == doctest::Approx(right.lhs).epsilon(1e-9));
    }
  }
}

TEST_CASE("report structure, bilinearity and relabeling symmetry") {
  const auto g = abelian2();
  const auto dom = GridSpec::make(g, 16, 4.0);
  const std::vector<int> k = {1, 1};
  for (const auto kind : {TameKind::Product, TameKind::Single, TameKind::Flag}) {
    const bool flag = kind == TameKind::Flag;
    const auto a = random_dyadic(g, 21, flag), b = random_dyadic(g, 22, flag);
    const auto r = tame_report(kind, a, b, k, dom, options());
    CHECK(r.summands.size() == (kind == TameKind::Single ? 2u : 4u));
    double sum = 0.0;
    for (const auto& s : r.summands) {
      CHECK(s.value >= 0.0);
      sum += s.value;
    }
    CHECK(r.rhs == doctest::Approx(sum).epsilon(1e-15));
    CHECK(r.lhs >= 0.0);
    CHECK(std::isfinite(r.ratio));
    std::string why;
    CHECK(tameness_structure_ok(r, &why));

    const cplx c(-2.0, 1.0);
    const auto scaled = tame_report(kind, a.scaled(c), b, k, dom, options());
    CHECK(std::abs(scaled.ratio - r.ratio) <= 1e-8 * r.ratio);
    CHECK(scaled.lhs == doctest::Approx(std::abs(c) * r.lhs).epsilon(1e-8));
    for (std::size_t i = 0; i < r.summands.size(); ++i)
      CHECK(scaled.summands[i].value == doctest::Approx(std::abs(c) * r.summands[i].value).epsilon(1e-8));

    const auto swapped = tame_report(kind, b, a, k, dom, options());
    CHECK(relabeling_identity(r, swapped));
    CHECK(!relabeling_identity(r, scaled));
  }
}

TEST_CASE("structure check rejects a non-tame summand") {
  TameReport r;
  r.k = {1, 1};
  r.summands.push_back({"bad", {{"K", "pk", {1, 0}, 1.0}, {"L", "pk", {1, 1}, 1.0}}, 1.0});
  std::string why;
  CHECK(!tameness_structure_ok(r, &why));
  CHECK(why.find("parameter 1") != std::string::npos);
}

TEST_CASE("tame reports serialize and reject bad input") {
  const auto g = abelian2();
  const auto dom = GridSpec::make(g, 16, 4.0);
  const auto d = KernelRep::delta(g);
  const std::vector<int> k = {0, 0};
  const auto r = tame_report_pk(d, d, k, dom, options());
  CHECK(r.ratio == doctest::Approx(0.5).epsilon(1e-9));
  const auto j = r.to_json();
  CHECK(j.at("summands").size() == 4);
  CHECK(j.at("config").contains("seminorm"));
  CHECK(tame_csv_header(r) == "kind,k_id,l_id,k,lhs,rhs,ratio,summand1,summand2,summand3,summand4\n");
  CHECK(tame_csv_row(r).rfind("product,K,L,0;0,", 0) == 0);
  const std::vector<int> bad = {1};
  CHECK_THROWS_AS(tame_report_pk(d, d, bad, dom, options()), ValidationError);
  CHECK_THROWS_AS(tame_kind_from_string("triple"), ValidationError);
  const auto h = ProductGroup::single(GradedLieAlgebra::heisenberg(1));
  CHECK_THROWS_AS(tame_report_pk(KernelRep::delta(h), d, k, dom, options()), ValidationError);
}
