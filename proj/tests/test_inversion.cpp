#include <doctest.h>

#include <cmath>

#include "nilconv/error.hpp"
#include "nilconv/inversion.hpp"

using namespace nilconv;

namespace {

ProductGroup line() { return ProductGroup::single(GradedLieAlgebra::abelian(1)); }
ProductGroup plane() { return ProductGroup({GradedLieAlgebra::abelian(1), GradedLieAlgebra::abelian(1)}); }

double dist_to_delta(const GridFunction& f, cplx c) {
  double worst = 0.0;
  const auto d = GridFunction::delta(f.spec(), c);
  for (std::size_t i = 0; i < f.size(); ++i) worst = std::max(worst, std::abs(f[i] - d[i]));
  return worst;
}

}  // namespace

TEST_CASE("delta(c) inverts to delta(1/c)") {
  const auto g = plane();
  const auto dom = GridSpec::make(g, 8, 2.0);
  for (const cplx c : {cplx(1.0), cplx(2.0), cplx(-0.5), cplx(1.0, 2.0)}) {
    const auto res = neumann_invert(KernelRep::delta(g, c), dom);
    CHECK(res.converged);
    const double scale = 1.0 / (std::abs(c) * dom.kernel_grid().cell_volume());
    CHECK(dist_to_delta(res.inverse, 1.0 / c) <= 1e-10 * scale);
    CHECK(res.max_residual <= 1e-10);
  }
}

TEST_CASE("epsilon rules on deltas") {
  const auto g = line();
  const auto dom = GridSpec::make(g, 16, 2.0);
  const auto one = choose_epsilon(KernelRep::delta(g), dom);
  CHECK(one.epsilon == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(one.s_norm <= 1e-9);
  const auto two = choose_epsilon(KernelRep::delta(g, 2.0), dom);
  CHECK(two.epsilon == doctest::Approx(0.25).epsilon(1e-9));
  EpsilonOptions paper;
  paper.paper_eps = true;
  const auto p = choose_epsilon(KernelRep::delta(g, 2.0), dom, paper);
  CHECK(p.epsilon == doctest::Approx(0.25).epsilon(1e-9));
  EpsilonOptions forced;
  forced.epsilon = 0.125;
  const auto f = choose_epsilon(KernelRep::delta(g, 2.0), dom, forced);
  CHECK(f.epsilon == 0.125);
  CHECK(f.s_norm == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("decay of S = delta/2 has constant roots 1/2") {
  const auto g = plane();
  const auto dom = GridSpec::make(g, 8, 2.0);
  DecayOptions o;
  o.eps.epsilon = 0.125;
  o.seminorm.triangle_samples = 2000;
  const std::vector<int> k = {1, 1};
  const auto rep = seminorm_decay(KernelRep::delta(g, 2.0), dom, k, {1, 2, 4, 8}, o);
  REQUIRE(rep.entries.size() == 4);
  for (const auto& e : rep.entries) {
    CHECK(e.root == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(e.op_norm == doctest::Approx(std::pow(0.5, e.n)).epsilon(1e-6));
  }
  CHECK(rep.s_op_norm == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("probes are moment free") {
  const auto dom = GridSpec::make(plane(), 32, 4.0);
  const auto probes = inversion_probes(dom);
  CHECK(probes.size() >= 3);
  for (const auto& [name, f] : probes) {
    std::vector<double> x;
    cplx m0 = 0.0, m1 = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      x = dom.coords(i);
      m0 += f[i];
      m1 += f[i] * x[0];
    }
    double mass = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) mass += std::abs(f[i]);
    CAPTURE(name);
    CHECK(std::abs(m0) <= 1e-6 * mass);
    CHECK(std::abs(m1) <= 1e-6 * mass * dom.t());
  }
}

TEST_CASE("the Hilbert kernel inverts to its negative and back") {
  const auto g = line();
  const auto dom = GridSpec::make(g, 128, 8.0);
  const auto h = KernelRep::closed_form(g, ClosedFormId::Hilbert);
  const auto res = neumann_invert(h, dom);
  CHECK(res.converged);
  CHECK(res.max_residual <= 0.05);
  const auto hk = symmetric_support(h.render(dom.kernel_grid()));
  CHECK(kernel_cosine(res.inverse, hk) <= -0.95);
  const auto back = neumann_invert(res.inverse_kernel(), dom);
  CHECK(kernel_cosine(back.inverse, hk) >= 0.95);
}

TEST_CASE("self-adjoint kernels give self-adjoint inverses") {
  const auto g = line();
  const auto dom = GridSpec::make(g, 64, 4.0);
  const auto kg = dom.kernel_grid();
  auto bump = GridFunction::sample(kg, [](std::span<const double> x) { return cplx(std::exp(-4.0 * x[0] * x[0])); });
  bump *= 0.3;
  bump += GridFunction::delta(kg);
  const auto res = neumann_invert(KernelRep::grid(symmetric_support(bump)), dom);
  CHECK(res.converged);
  CHECK(res.max_residual <= 1e-6);
  double asym = 0.0, scale = 0.0;
  std::vector<int> m(1), r(1);
  for (std::size_t i = 0; i < kg.size(); ++i) {
    kg.lattice(i, m);
    r[0] = -m[0];
    if (!kg.in_range(r)) continue;
    asym = std::max(asym, std::abs(res.inverse[i] - std::conj(res.inverse.at_lattice(r))));
    scale = std::max(scale, std::abs(res.inverse[i]));
  }
  CHECK(asym <= 1e-8 * scale);
}

TEST_CASE("singular and ill-conditioned kernels") {
  const auto g = line();
  const auto dom = GridSpec::make(g, 32, 4.0);
  const auto zero = KernelRep::delta(g, 0.0);
  CHECK_FALSE(choose_epsilon(zero, dom).invertible);
  CHECK_THROWS_AS(neumann_invert(zero, dom), ConvergenceError);
  const auto kg = dom.kernel_grid();
  GridFunction d(kg);
  const std::vector<int> plus = {1}, minus = {-1};
  d[kg.flat(plus)] = 1.0 / kg.cell_volume();
  d[kg.flat(minus)] = -1.0 / kg.cell_volume();
  const auto e = choose_epsilon(KernelRep::grid(d), dom);
  CHECK(e.sigma_min < 0.1 * e.sigma_max);
  InversionOptions o;
  o.max_n = 20;
  const auto res = neumann_invert(KernelRep::grid(d), dom, o);
  CHECK_FALSE(res.converged);
  CHECK(res.iterations == 20);
}
