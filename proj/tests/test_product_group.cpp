#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "nilconv/error.hpp"
#include "nilconv/product_group.hpp"
#include "nilconv/rng.hpp"

using namespace nilconv;

namespace {

std::vector<double> random_point(Rng& rng, int q) {
  std::vector<double> x(static_cast<std::size_t>(q));
  for (auto& v : x) v = rng.uniform(-1.5, 1.5);
  return x;
}

ProductGroup r_times_h() {
  return ProductGroup({GradedLieAlgebra::abelian(1), GradedLieAlgebra::heisenberg(1)});
}

}  // namespace

TEST_CASE("one factor reduces to the factor group bit for bit") {
  const auto h = GradedLieAlgebra::heisenberg(1);
  const auto p = ProductGroup::single(h);
  Rng rng(1);
  for (int i = 0; i < 50; ++i) {
    const auto x = random_point(rng, 3), y = random_point(rng, 3);
    CHECK(p.multiply(x, y) == h.multiply(x, y));
    CHECK(p.invert(x) == h.invert(x));
    const std::vector<double> r = {1.7};
    CHECK(p.multi_dilate(r, x) == h.dilate(1.7, x));
    CHECK(p.factor_norms(x)[0] == h.hom_norm(x));
  }
}

TEST_CASE("product law is factorwise") {
  const auto p = r_times_h();
  CHECK(p.nu() == 2);
  CHECK(p.dim() == 4);
  CHECK(p.dim(1) == 3);
  CHECK(p.offset(1) == 1);
  CHECK(p.homogeneous_dimension(0) == 1);
  CHECK(p.homogeneous_dimension(1) == 4);
  CHECK(p.weights() == std::vector<int>{1, 1, 1, 2});
  CHECK(p.factor_of() == std::vector<int>{0, 1, 1, 1});
  CHECK(!p.all_abelian());
  Rng rng(2);
  const auto h = GradedLieAlgebra::heisenberg(1);
  for (int i = 0; i < 50; ++i) {
    const auto x = random_point(rng, 4), y = random_point(rng, 4);
    const auto z = p.multiply(x, y);
    CHECK(z[0] == x[0] + y[0]);
    const auto zh = h.multiply(std::span(x).subspan(1), std::span(y).subspan(1));
    for (int k = 0; k < 3; ++k) CHECK(z[1 + k] == zh[k]);
  }
}

TEST_CASE("multi-parameter dilation") {
  const auto p = r_times_h();
  const std::vector<double> t = {0.5, 1.0, -1.0, 2.0};
  const std::vector<double> ones = {1.0, 1.0};
  CHECK(p.multi_dilate(ones, t) == t);
  const std::vector<double> r = {3.0, 2.0};
  CHECK(p.multi_dilate(r, t) == std::vector<double>{1.5, 2.0, -2.0, 8.0});
  const std::vector<double> bad = {1.0, 0.0};
  CHECK_THROWS_AS(p.multi_dilate(bad, t), ValidationError);
  const std::vector<double> short_r = {1.0};
  CHECK_THROWS_AS(p.multi_dilate(short_r, t), ValidationError);
  CHECK_THROWS_AS(p.multiply(std::vector<double>{1, 2}, t), ValidationError);
}

TEST_CASE("degrees and projections") {
  const auto p = r_times_h();
  const MultiIndex zero = MultiIndex::zero(p.dims());
  CHECK(p.hom_degree(zero) == std::vector<int>{0, 0});
  const MultiIndex e3({{0}, {0, 0, 1}});
  CHECK(p.hom_degree(e3) == std::vector<int>{0, 2});
  CHECK(e3.isotropic(1) == 1);
  const MultiIndex a({{2}, {1, 0, 1}}), b({{1}, {0, 3, 2}});
  const auto da = p.hom_degree(a), db = p.hom_degree(b), dab = p.hom_degree(a + b);
  for (int mu = 0; mu < 2; ++mu) CHECK(dab[mu] == da[mu] + db[mu]);
  CHECK(project(a, SubsetMask::single(0)) == MultiIndex({{2}, {0, 0, 0}}));
  CHECK(project(a, SubsetMask::all(2)) == a);

  const std::vector<int> k = {3, 5};
  CHECK(zero_outside(k, SubsetMask::single(0)) == std::vector<int>{3, 0});
  CHECK(zero_outside(k, SubsetMask::single(1)) == std::vector<int>{0, 5});
  CHECK(zero_outside(k, SubsetMask(0)) == std::vector<int>{0, 0});
  for (const auto s : SubsetMask::enumerate(2)) {
    const auto z = zero_outside(k, s);
    CHECK(zero_outside(z, s) == z);
  }
}

TEST_CASE("subset enumeration covers every subset once") {
  for (int nu = 1; nu <= 4; ++nu) {
    const auto all = SubsetMask::enumerate(nu);
    CHECK(all.size() == (1u << nu));
    std::set<std::uint32_t> seen;
    for (const auto s : all) seen.insert(s.bits());
    CHECK(seen.size() == all.size());
  }
  const SubsetMask s(0b101);
  CHECK(s.count() == 2);
  CHECK(s.members(3) == std::vector<int>{0, 2});
  CHECK(s.complement(3) == SubsetMask(0b010));
  CHECK(s.to_string(3) == "{1,3}");
  CHECK(SubsetMask(0).to_string(2) == "{}");
}

TEST_CASE("multi-index enumeration") {
  const auto p = r_times_h();
  const std::vector<int> k = {1, 1};
  const auto all = p.multi_indices_up_to(k, SubsetMask::all(2));
  // Factor 0: |a| <= 1 in 1 variable -> 2; factor 1: |a| <= 1 in 3 variables -> 4.
  CHECK(all.size() == 8);
  const auto first = p.multi_indices_up_to(k, SubsetMask::single(0));
  CHECK(first.size() == 2);
  for (const auto& a : first) CHECK(a.isotropic(1) == 0);
  CHECK(p.multi_indices_up_to(k, SubsetMask(0)).size() == 1);
  // Nested in k.
  const std::vector<int> k2 = {2, 1};
  const auto bigger = p.multi_indices_up_to(k2, SubsetMask::all(2));
  for (const auto& a : all) CHECK(std::find(bigger.begin(), bigger.end(), a) != bigger.end());
}

TEST_CASE("product json") {
  const auto p = r_times_h();
  const auto j = p.to_json();
  CHECK(j.is_array());
  CHECK(j.size() == 2);
  CHECK(p == r_times_h());
}
