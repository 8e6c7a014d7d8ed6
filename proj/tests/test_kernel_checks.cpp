#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "nilconv/dyadic.hpp"
#include "nilconv/error.hpp"
#include "nilconv/kernel_checks.hpp"
#include "nilconv/rng.hpp"

using namespace nilconv;

namespace {

ProductGroup line() { return ProductGroup::single(GradedLieAlgebra::abelian(1)); }
ProductGroup abelian2() { return ProductGroup({GradedLieAlgebra::abelian(1), GradedLieAlgebra::abelian(1)}); }

MultiIndex alpha2(int a, int b) { return MultiIndex({{a}, {b}}); }

KernelRep cross() { return KernelRep::closed_form(abelian2(), ClosedFormId::InverseCross); }

const Bump& bump_named(const std::vector<Bump>& cat, const std::string& name) {
  return *std::find_if(cat.begin(), cat.end(), [&](const Bump& b) { return b.name == name; });
}

}  // namespace

TEST_CASE("multi-indices below a bound") {
  const auto all = multi_indices_below(alpha2(1, 2));
  CHECK(all.size() == 6);
  CHECK(all.front() == alpha2(0, 0));
  CHECK(std::find(all.begin(), all.end(), alpha2(1, 2)) != all.end());
}

TEST_CASE("growth of the inverse cross kernel") {
  const auto rep = check_growth(cross(), alpha2(1, 1));
  CHECK(rep.method == "analytic");
  CHECK(rep.valid);
  REQUIRE(rep.entries.size() == 4);
  // |t1 t2| |K| = 1 and every derivative weight is exact.
  for (const auto& e : rep.entries) CHECK(e.constant == doctest::Approx(1.0).epsilon(0.02));
  CHECK(rep.find(alpha2(0, 0))->samples == 2000);
  CHECK(rep.find(alpha2(0, 0))->argmax.size() == 2);
}

TEST_CASE("flag growth of the flag model kernel") {
  const auto flag = KernelRep::closed_form(abelian2(), ClosedFormId::FlagModel);
  GrowthOptions opt;
  opt.mode = GrowthMode::Flag;
  const auto rep = check_growth(flag, alpha2(1, 0), opt);
  CHECK(rep.method == "finite-difference");
  CHECK(rep.find(alpha2(0, 0))->constant == doctest::Approx(1.0).epsilon(0.05));
  // |d_1 K| |t1|^2 (|t1| + |t2|) = (2|t1| + |t2|) / (|t1| + |t2|) < 2.
  const double c10 = rep.find(alpha2(1, 0))->constant;
  CHECK(c10 <= 2.0 + 1e-3);
  CHECK(c10 >= 1.9);
  // With product weights |K| |t1| |t2| = |t2| / (|t1| + |t2|) < 1.
  opt.mode = GrowthMode::Product;
  CHECK(check_growth(flag, alpha2(0, 0), opt).max_constant() <= 1.0);
}

TEST_CASE("finite differences match analytic derivatives") {
  const auto flag = KernelRep::closed_form(abelian2(), ClosedFormId::FlagModel);
  GrowthOptions opt;
  opt.mode = GrowthMode::Flag;
  opt.samples = 300;
  const auto rep = check_growth(flag, alpha2(2, 0), opt);
  // Recompute the weighted second derivative at the maximizing point.
  const auto* e = rep.find(alpha2(2, 0));
  REQUIRE(e != nullptr);
  const double a = std::abs(e->argmax[0]), b = std::abs(e->argmax[1]);
  // g(a) = a^2 + a b, K = 1/g, K'' = (2 g'^2 - g g'') / g^3 with g' = 2a + b, g'' = 2.
  const double g = a * a + a * b, gp = 2 * a + b;
  const double k2 = (2 * gp * gp - 2 * g) / (g * g * g);
  const double weighted = k2 * std::pow(a, 3) * (a + b);
  CHECK(e->constant == doctest::Approx(weighted).epsilon(1e-4));
}

TEST_CASE("growth constants are monotone under sample refinement") {
  const auto flag = KernelRep::closed_form(abelian2(), ClosedFormId::FlagModel);
  GrowthOptions small, large;
  small.samples = 200;
  large.samples = 2000;
  const auto a = check_growth(flag, alpha2(1, 1), small);
  const auto b = check_growth(flag, alpha2(1, 1), large);
  for (std::size_t i = 0; i < a.entries.size(); ++i) CHECK(a.entries[i].constant <= b.entries[i].constant + 1e-9);
  // Determinism.
  const auto c = check_growth(flag, alpha2(1, 1), large);
  for (std::size_t i = 0; i < b.entries.size(); ++i) CHECK(b.entries[i].constant == c.entries[i].constant);
}

TEST_CASE("delta kernels carry a validity flag") {
  const auto d = KernelRep::delta(abelian2(), 1.0);
  CHECK_THROWS_AS(check_growth(d, alpha2(0, 0)), ValidationError);
  GrowthOptions opt;
  opt.grid = GridSpec::make(abelian2(), 32, 4.0);
  const auto rep = check_growth(d, alpha2(1, 1), opt);
  CHECK(!rep.valid);
  CHECK(!rep.note.empty());
  CHECK(rep.method == "grid");
  for (const auto& e : rep.entries) CHECK(e.constant >= 0.0);
}

TEST_CASE("grid growth of the rendered inverse cross kernel") {
  const auto spec = GridSpec::make(abelian2(), 128, 8.0);
  const auto k = KernelRep::grid(cross().render(spec));
  GrowthOptions opt;
  opt.samples = 500;
  const auto rep = check_growth(k, alpha2(1, 1), opt);
  CHECK(rep.method == "grid");
  // Odd-lattice axes are differenced with step 2 and halved.
  CHECK(rep.find(alpha2(0, 0))->constant == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.find(alpha2(1, 0))->constant == doctest::Approx(1.0).epsilon(0.1));
  CHECK(rep.find(alpha2(1, 1))->constant == doctest::Approx(1.0).epsilon(0.15));
  for (const auto& e : rep.entries) {
    // Samples stay clear of the singular cross.
    CHECK(std::abs(e.argmax[0]) > 0.0);
    CHECK(std::abs(e.argmax[1]) > 0.0);
  }
}

TEST_CASE("dyadic growth constants are stable under grid refinement") {
  DyadicOptions dopt;
  dopt.seed = 3;
  const auto dy = synth_dyadic(abelian2(), DyadicWindow::cube(2, -2, 2), dopt);
  const auto k = KernelRep::dyadic(dy);
  GrowthOptions opt;
  opt.samples = 4000;
  const auto coarse = check_growth_grid(k.render(GridSpec::make(abelian2(), 64, 1.0)), alpha2(1, 1), opt);
  const auto fine = check_growth_grid(k.render(GridSpec::make(abelian2(), 128, 1.0)), alpha2(1, 1), opt);
  for (std::size_t i = 0; i < coarse.entries.size(); ++i) {
    const double a = coarse.entries[i].constant, b = fine.entries[i].constant;
    CHECK(std::isfinite(a));
    CHECK(a > 0.0);
    CHECK(std::abs(a - b) <= 0.25 * std::max(a, b));
  }
  // The pointwise path agrees with the grid path on the finer grid.
  const auto pointwise = check_growth(k, alpha2(1, 1), opt);
  CHECK(pointwise.method == "finite-difference");
  for (std::size_t i = 0; i < fine.entries.size(); ++i)
    CHECK(pointwise.entries[i].constant == doctest::Approx(fine.entries[i].constant).epsilon(0.05));
}

TEST_CASE("bump catalog") {
  const auto cat = bump_catalog(GradedLieAlgebra::heisenberg(1));
  REQUIRE(cat.size() == 3);
  const std::vector<double> o = {0.0, 0.0, 0.0}, x = {0.3, -0.2, 0.1};
  const auto& even = bump_named(cat, "even");
  const auto& odd = bump_named(cat, "odd");
  const auto& shifted = bump_named(cat, "shifted");
  CHECK(even.eval(o) == doctest::Approx(1.0));
  CHECK(bump_profile(0.0) == 1.0);
  CHECK(bump_profile(1.0) == 0.0);
  CHECK(shifted.eval(std::vector<double>{0.5, 0.0, 0.0}) == doctest::Approx(1.0));
  const std::vector<double> mx = {-0.3, 0.2, -0.1};
  CHECK(odd.eval(x) == doctest::Approx(-odd.eval(mx)));
  // Range [0, 1] and support in the unit ball.
  Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> t = {rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-4, 4)};
    const double v = even.eval(t);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    if (GradedLieAlgebra::heisenberg(1).hom_norm(t) >= 1.0) CHECK(v == 0.0);
    if (std::abs(t[0]) > 1.0 || std::abs(t[1]) > 1.0 || std::abs(t[2]) > 1.0) CHECK(shifted.eval(t) == 0.0);
  }
}

TEST_CASE("cancellation of a tensor with a delta factor") {
  const auto l = KernelRep::closed_form(line(), ClosedFormId::Hilbert);
  const auto k = KernelRep::tensor({KernelRep::delta(line(), 1.0), l});
  const auto cat = bump_catalog(GradedLieAlgebra::abelian(1));
  for (const auto& b : cat) {
    const double phi0 = b.eval(std::vector<double>{0.0});
    const auto red = reduce_kernel(k, 0, 2.0, b);
    for (double t : {-1.5, 0.25, 3.0}) {
      const std::vector<double> p = {t};
      CHECK(std::abs(red.eval(p) - phi0 * l.eval(p)) <= 1e-15);
    }
  }
  const auto rep = check_cancellation(k, 0, {0.5, 1.0, 2.0}, {bump_named(cat, "even")}, alpha2(0, 1));
  const auto lrep = check_growth(l, MultiIndex(std::vector<std::vector<int>>{{1}}));
  REQUIRE(rep.sup_over_r.size() == 1);
  for (std::size_t a = 0; a < lrep.entries.size(); ++a)
    CHECK(rep.sup_over_r[0].second[a].constant == doctest::Approx(lrep.entries[a].constant));
}

TEST_CASE("cancellation of the inverse cross kernel") {
  const auto cat = bump_catalog(GradedLieAlgebra::abelian(1));
  std::vector<double> rs;
  for (int e = -4; e <= 4; ++e) rs.push_back(std::exp2(e));
  CancellationOptions opt;
  opt.growth.samples = 300;
  // Even bump: the 1/t1 integral vanishes by symmetry.
  const auto even = check_cancellation(cross(), 0, rs, {bump_named(cat, "even")}, alpha2(0, 1), opt);
  for (const auto& e : even.entries) CHECK(e.growth.max_constant() <= 1e-12);
  // Odd bump: c / t2 with c = int phi(s)/s ds, independent of R.
  const auto odd = check_cancellation(cross(), 0, rs, {bump_named(cat, "odd")}, alpha2(0, 1), opt);
  double lo = 1e300, hi = 0.0;
  for (const auto& e : odd.entries) {
    const double c = e.growth.find(MultiIndex(std::vector<std::vector<int>>{{0}}))->constant;
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  CHECK(lo > 0.1);
  CHECK(hi <= 1.1 * lo);
  // Independent quadrature of int phi_odd(s)/s ds.
  const auto& ob = bump_named(cat, "odd");
  double c = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double s = -1.0 + (i + 0.5) * 2.0 / n;
    c += ob.eval(std::vector<double>{s}) / s * 2.0 / n;
  }
  CHECK(odd.entries[4].growth.find(MultiIndex(std::vector<std::vector<int>>{{0}}))->constant == doctest::Approx(std::abs(c)).epsilon(0.02));
  CHECK(odd.to_json()["catalog"].size() == 1);
}

TEST_CASE("cancellation on grid data") {
  const auto spec = GridSpec::make(abelian2(), 64, 4.0);
  const auto k = KernelRep::grid(cross().render(spec));
  const auto cat = bump_catalog(GradedLieAlgebra::abelian(1));
  CancellationOptions opt;
  opt.growth.samples = 200;
  const auto rep = check_cancellation(k, 0, {1.0, 2.0}, {bump_named(cat, "even")}, alpha2(0, 0), opt);
  for (const auto& e : rep.entries) CHECK(e.growth.max_constant() <= 1e-12);
  CHECK_THROWS_AS(reduce_kernel(k, 0, 0.125, bump_named(cat, "even"), opt), ValidationError);
  CHECK_THROWS_AS(reduce_kernel(KernelRep::closed_form(line(), ClosedFormId::Hilbert), 0, 1.0, cat[0]),
                  ValidationError);
}
