#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "nilconv/error.hpp"
#include "nilconv/graded_group.hpp"
#include "nilconv/rng.hpp"
#include "oracles.hpp"

using namespace nilconv;

namespace {

std::vector<double> random_point(Rng& rng, int q, double scale = 1.0) {
  std::vector<double> x(static_cast<std::size_t>(q));
  for (auto& v : x) v = rng.uniform(-scale, scale);
  return x;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Grading-consistent 3-step brackets violating Jacobi on (X0, X1, X2).
GradedLieAlgebra bad_jacobi() {
  // V1 = {X0, X1, X2}, V2 = {Y01, Y12, Y20} = {3, 4, 5}, V3 = {W} = {6}.
  std::vector<StructureConstant> c = {{0, 1, 3, 1.0}, {1, 2, 4, 1.0}, {2, 0, 5, 1.0},
                                      {0, 4, 6, 1.0}, {1, 5, 6, 1.0}, {2, 3, 6, 1.0}};
  return GradedLieAlgebra({3, 3, 1}, c);
}

}  // namespace

TEST_CASE("abelian group law is addition") {
  const auto g = GradedLieAlgebra::abelian(3);
  Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    const auto x = random_point(rng, 3), y = random_point(rng, 3);
    const auto z = g.multiply(x, y);
    for (int k = 0; k < 3; ++k) CHECK(z[k] == x[k] + y[k]);
    CHECK(max_diff(g.invert(x), {-x[0], -x[1], -x[2]}) == 0.0);
  }
}

TEST_CASE("identity element") {
  for (const auto& g : {GradedLieAlgebra::heisenberg(1), GradedLieAlgebra::heisenberg(2),
                        oracle::UpperTriangular(4).algebra()}) {
    Rng rng(5);
    const auto x = random_point(rng, g.dim());
    const std::vector<double> zero(static_cast<std::size_t>(g.dim()), 0.0);
    CHECK(max_diff(g.multiply(x, zero), x) == 0.0);
    CHECK(max_diff(g.multiply(zero, x), x) == 0.0);
    CHECK(max_diff(g.invert(zero), zero) == 0.0);
  }
}

TEST_CASE("heisenberg product matches matrix oracle") {
  const oracle::UpperTriangular m(3);
  const auto g = m.algebra();
  CHECK(g == GradedLieAlgebra::heisenberg(1));
  const auto p = g.multiply(std::vector<double>{1, 0, 0}, std::vector<double>{0, 1, 0});
  CHECK(max_diff(p, {1, 1, 0.5}) <= 1e-15);
  CHECK(max_diff(m.multiply({1, 0, 0}, {0, 1, 0}), {1, 1, 0.5}) <= 1e-15);
  const auto inv = g.invert(std::vector<double>{1, 1, 0.5});
  CHECK(max_diff(inv, {-1, -1, -0.5}) == 0.0);
  CHECK(max_diff(g.multiply(std::vector<double>{1, 1, 0.5}, inv), {0, 0, 0}) <= 1e-15);
}

TEST_CASE("group law matches matrix exp/log for steps 2 to 4") {
  for (int n : {3, 4, 5}) {
    const oracle::UpperTriangular m(n);
    const auto g = m.algebra();
    CHECK(g.n_layers() == n - 1);
    Rng rng(static_cast<std::uint64_t>(n));
    double err = 0.0;
    for (int i = 0; i < 100; ++i) {
      const auto x = random_point(rng, g.dim()), y = random_point(rng, g.dim());
      err = std::max(err, max_diff(g.multiply(x, y), m.multiply(x, y)));
    }
    CHECK(err <= 1e-12);
  }
}

TEST_CASE("group axioms on random triples") {
  for (const auto& g : {GradedLieAlgebra::heisenberg(1), GradedLieAlgebra::heisenberg(2),
                        oracle::UpperTriangular(5).algebra()}) {
    Rng rng(11);
    double assoc = 0.0, inv = 0.0;
    for (int i = 0; i < 100; ++i) {
      const auto x = random_point(rng, g.dim(), 2.0), y = random_point(rng, g.dim(), 2.0),
                 z = random_point(rng, g.dim(), 2.0);
      assoc = std::max(assoc, max_diff(g.multiply(g.multiply(x, y), z), g.multiply(x, g.multiply(y, z))));
      const std::vector<double> zero(x.size(), 0.0);
      inv = std::max(inv, max_diff(g.multiply(x, g.invert(x)), zero));
      inv = std::max(inv, max_diff(g.multiply(g.invert(x), x), zero));
    }
    CHECK(assoc <= 1e-10);
    CHECK(inv <= 1e-12);
  }
}

TEST_CASE("dilation") {
  const auto h = GradedLieAlgebra::heisenberg(1);
  CHECK(max_diff(h.dilate(2.0, std::vector<double>{1, 1, 1}), {2, 2, 4}) == 0.0);
  CHECK(max_diff(h.dilate(1.0, std::vector<double>{0.3, -0.2, 0.7}), {0.3, -0.2, 0.7}) == 0.0);
  CHECK_THROWS_AS(h.dilate(0.0, std::vector<double>{1, 1, 1}), ValidationError);
  CHECK_THROWS_AS(h.dilate(-1.0, std::vector<double>{1, 1, 1}), ValidationError);

  for (const auto& g : {h, oracle::UpperTriangular(4).algebra()}) {
    Rng rng(13);
    double err = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double r = std::exp(rng.uniform(-2.0, 2.0));
      const auto x = random_point(rng, g.dim()), y = random_point(rng, g.dim());
      err = std::max(err, max_diff(g.dilate(r, g.multiply(x, y)), g.multiply(g.dilate(r, x), g.dilate(r, y))) /
                              std::max(1.0, std::pow(r, g.n_layers())));
    }
    CHECK(err <= 1e-12);
  }
}

TEST_CASE("homogeneous norm") {
  const auto h = GradedLieAlgebra::heisenberg(1);
  CHECK(h.hom_norm(std::vector<double>{0, 0, 0}) == 0.0);
  CHECK(h.hom_norm(std::vector<double>{1, 0, 0}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(h.hom_norm(std::vector<double>{0, 0, 1}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(h.hom_norm(std::vector<double>{0, 0, -4}) == doctest::Approx(2.0).epsilon(1e-15));
  // Abelian: the formula reduces to the Euclidean norm.
  const auto a = GradedLieAlgebra::abelian(2);
  CHECK(a.hom_norm(std::vector<double>{3, 4}) == doctest::Approx(5.0).epsilon(1e-15));

  for (const auto& g : {h, oracle::UpperTriangular(4).algebra()}) {
    Rng rng(17);
    double err = 0.0;
    for (int i = 0; i < 200; ++i) {
      const double r = std::exp(rng.uniform(-5.0, 5.0));
      const auto t = random_point(rng, g.dim());
      const double lhs = g.hom_norm(g.dilate(r, t)), rhs = r * g.hom_norm(t);
      err = std::max(err, std::abs(lhs - rhs) / rhs);
      CHECK(g.hom_norm(t) > 0.0);
    }
    CHECK(err <= 1e-12);
  }
}

TEST_CASE("homogeneous dimension") {
  CHECK(GradedLieAlgebra::abelian(1).homogeneous_dimension() == 1);
  CHECK(GradedLieAlgebra::abelian(5).homogeneous_dimension() == 5);
  CHECK(GradedLieAlgebra::heisenberg(1).homogeneous_dimension() == 4);
  CHECK(GradedLieAlgebra::heisenberg(2).homogeneous_dimension() == 6);
  const GradedLieAlgebra two_layer({2, 3}, {});
  CHECK(two_layer.homogeneous_dimension() == 8);
  CHECK(two_layer.dim() == 5);
  CHECK(oracle::UpperTriangular(4).algebra().homogeneous_dimension() == 1 * 3 + 2 * 2 + 3 * 1);
}

TEST_CASE("triangle constant") {
  CHECK(triangle_constant(GradedLieAlgebra::abelian(3), 20000) == doctest::Approx(1.0).epsilon(1e-9));
  const auto h = GradedLieAlgebra::heisenberg(1);
  const double c5 = triangle_constant(h, 100000), c6 = triangle_constant(h, 1000000);
  CHECK(c6 >= 1.0);
  CHECK(c6 <= 4.0);
  CHECK(c5 <= c6 + 1e-9);
  CHECK(triangle_constant(h, 1000, 7) == triangle_constant(h, 1000, 7));
  // Two-digit agreement with a denser run.
  CHECK(std::abs(c6 - triangle_constant(h, 300000)) <= 0.01 * c6);
}

TEST_CASE("heisenberg left and right invariant fields") {
  const auto h = GradedLieAlgebra::heisenberg(1);
  const auto left = h.left_invariant_fields();
  REQUIRE(left.size() == 3);
  const std::vector<double> x = {0.7, -1.3, 0.4};
  // X1 = d1 - x2/2 d3, X2 = d2 + x1/2 d3, X3 = d3.
  CHECK(left[0].coefficient(0, x) == 1.0);
  CHECK(left[0].coefficient(1, x) == 0.0);
  CHECK(left[0].coefficient(2, x) == doctest::Approx(-x[1] / 2));
  CHECK(left[1].coefficient(0, x) == 0.0);
  CHECK(left[1].coefficient(1, x) == 1.0);
  CHECK(left[1].coefficient(2, x) == doctest::Approx(x[0] / 2));
  CHECK(left[2].coefficient(2, x) == 1.0);
  CHECK(left[2].coefficient(0, x) == 0.0);
  const auto right = h.right_invariant_fields();
  CHECK(right[0].coefficient(2, x) == doctest::Approx(x[1] / 2));
  CHECK(right[1].coefficient(2, x) == doctest::Approx(-x[0] / 2));

  const auto abel = GradedLieAlgebra::abelian(2).left_invariant_fields();
  const std::vector<double> y = {0.7, -1.3};
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k) {
      CHECK(abel[j].coeffs[k].terms().size() == (j == k ? 1u : 0u));
      CHECK(abel[j].coefficient(k, y) == (j == k ? 1.0 : 0.0));
    }
}

TEST_CASE("field coefficients: origin values and homogeneity") {
  for (const auto& g : {GradedLieAlgebra::heisenberg(2), oracle::UpperTriangular(5).algebra()}) {
    const auto& w = g.weights();
    const std::vector<double> origin(static_cast<std::size_t>(g.dim()), 0.0);
    for (const auto& fields : {g.left_invariant_fields(), g.right_invariant_fields()})
      for (const auto& f : fields) {
        CHECK(f.degree == w[f.index]);
        for (int k = 0; k < g.dim(); ++k) {
          CHECK(f.coefficient(k, origin) == (k == f.index ? 1.0 : 0.0));
          const int deg = w[k] - w[f.index];
          if (deg < 0)
            CHECK(f.coeffs[k].is_zero());
          else
            CHECK(f.coeffs[k].is_homogeneous(w, deg));
        }
      }
  }
}

namespace {

double gauss(const std::vector<double>& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (1.0 + 0.3 * i) * x[i] * x[i] + 0.2 * x[i];
  return std::exp(-s);
}

// (X_j f)(x) via the field coefficients and centered differences.
double apply_field(const VectorField& v, const std::function<double(const std::vector<double>&)>& f,
                   const std::vector<double>& x) {
  const double h = 1e-5;
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    auto p = x, m = x;
    p[k] += h;
    m[k] -= h;
    s += v.coefficient(k, x) * (f(p) - f(m)) / (2 * h);
  }
  return s;
}

}  // namespace

TEST_CASE("left fields are derivatives along right multiplication") {
  const auto g = oracle::UpperTriangular(4).algebra();
  const auto fields = g.left_invariant_fields();
  Rng rng(19);
  double err = 0.0;
  for (int i = 0; i < 20; ++i) {
    const auto x = random_point(rng, g.dim(), 0.8);
    for (const auto& v : fields) {
      std::vector<double> e(static_cast<std::size_t>(g.dim()), 0.0);
      const double s = 1e-5;
      e[v.index] = s;
      const auto p = g.multiply(x, e);
      e[v.index] = -s;
      const auto m = g.multiply(x, e);
      const double fd = (gauss(p) - gauss(m)) / (2 * s);
      err = std::max(err, std::abs(fd - apply_field(v, gauss, x)));
    }
  }
  CHECK(err <= 1e-7);
}

TEST_CASE("left fields commute with left translations") {
  const auto g = GradedLieAlgebra::heisenberg(1);
  const auto fields = g.left_invariant_fields();
  Rng rng(23);
  double err = 0.0;
  for (int i = 0; i < 20; ++i) {
    const auto a = random_point(rng, 3, 0.5), x = random_point(rng, 3, 0.5);
    const auto translated = [&](const std::vector<double>& y) { return gauss(g.multiply(a, y)); };
    for (const auto& v : fields)
      err = std::max(err, std::abs(apply_field(v, translated, x) - apply_field(v, gauss, g.multiply(a, x))));
  }
  CHECK(err <= 1e-7);
}

TEST_CASE("field homogeneity under dilation") {
  const auto g = oracle::UpperTriangular(4).algebra();
  const auto fields = g.left_invariant_fields();
  Rng rng(29);
  double err = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double r = std::exp(rng.uniform(-0.5, 0.5));
    std::vector<double> t(static_cast<std::size_t>(g.dim()));
    for (auto& v : t) v = 0.5 * rng.normal();
    const auto dilated = [&](const std::vector<double>& y) { return gauss(g.dilate(r, y)); };
    for (const auto& v : fields) {
      const double lhs = apply_field(v, dilated, t);
      const double rhs = std::pow(r, v.degree) * apply_field(v, gauss, g.dilate(r, t));
      err = std::max(err, std::abs(lhs - rhs));
    }
  }
  CHECK(err <= 1e-8);
}

TEST_CASE("invalid algebras are rejected") {
  CHECK_THROWS_AS(bad_jacobi(), ValidationError);
  // Grading: [X0, X1] landing in weight 1.
  CHECK_THROWS_AS(GradedLieAlgebra({3}, {{0, 1, 2, 1.0}}), ValidationError);
  // Antisymmetry: both orders given with the same sign.
  CHECK_THROWS_AS(GradedLieAlgebra({2, 1}, {{0, 1, 2, 1.0}, {1, 0, 2, 1.0}}), ValidationError);
  CHECK_THROWS_AS(GradedLieAlgebra({2, 1}, {{0, 0, 2, 1.0}}), ValidationError);
  CHECK_THROWS_AS(GradedLieAlgebra({2, 1}, {{0, 1, 7, 1.0}}), ValidationError);
  CHECK_THROWS_AS(GradedLieAlgebra({}, {}), ValidationError);
  CHECK_THROWS_AS(GradedLieAlgebra({2, 0}, {}), ValidationError);
  // Both orders with opposite signs are accepted.
  CHECK_NOTHROW(GradedLieAlgebra({2, 1}, {{0, 1, 2, 1.0}, {1, 0, 2, -1.0}}));
  // A consistent 3-step variant of the rejected one.
  CHECK_NOTHROW(GradedLieAlgebra({3, 3, 1}, {{0, 1, 3, 1.0},
                                              {1, 2, 4, 1.0},
                                              {2, 0, 5, 1.0},
                                              {0, 4, 6, 1.0},
                                              {1, 5, 6, -1.0}}));
}

TEST_CASE("dimension mismatch") {
  const auto h = GradedLieAlgebra::heisenberg(1);
  CHECK_THROWS_AS(h.multiply(std::vector<double>{1, 2}, std::vector<double>{1, 2, 3}), ValidationError);
  CHECK_THROWS_AS(h.invert(std::vector<double>{1, 2}), ValidationError);
}

TEST_CASE("json round trip and error paths") {
  const auto h = GradedLieAlgebra::heisenberg(1);
  const auto j = h.to_json();
  CHECK(j["n_layers"] == 2);
  CHECK(GradedLieAlgebra::from_json(j) == h);

  nlohmann::json bad = j;
  bad["structure_constants"][0][3] = "x";
  try {
    GradedLieAlgebra::from_json(bad, "/group");
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("/group/structure_constants/0") != std::string::npos);
  }
  nlohmann::json missing = j;
  missing.erase("layer_dims");
  CHECK_THROWS_AS(GradedLieAlgebra::from_json(missing), ValidationError);
  nlohmann::json wrong_layers = j;
  wrong_layers["n_layers"] = 3;
  CHECK_THROWS_AS(GradedLieAlgebra::from_json(wrong_layers), ValidationError);
}

TEST_CASE("lattice denominator and lattice closure") {
  CHECK(GradedLieAlgebra::abelian(2).lattice_denominator() == 1);
  CHECK(GradedLieAlgebra::heisenberg(1).lattice_denominator() == 2);
  const auto g = oracle::UpperTriangular(4).algebra();
  const std::int64_t d = g.lattice_denominator();
  REQUIRE(d > 0);
  // Lattice with spacing h^l / D^(l-1) on weight l is closed under the law.
  const double h = 0.25;
  Rng rng(31);
  for (int i = 0; i < 50; ++i) {
    std::vector<double> x(static_cast<std::size_t>(g.dim())), y(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
      const int l = g.weights()[k];
      const double s = std::pow(h, l) / std::pow(static_cast<double>(d), l - 1);
      x[k] = s * static_cast<double>(rng.uniform_int(-6, 6));
      y[k] = s * static_cast<double>(rng.uniform_int(-6, 6));
    }
    const auto z = g.multiply(x, y);
    for (std::size_t k = 0; k < z.size(); ++k) {
      const int l = g.weights()[k];
      const double s = std::pow(h, l) / std::pow(static_cast<double>(d), l - 1);
      CHECK(std::abs(z[k] / s - std::round(z[k] / s)) <= 1e-9);
    }
  }
  // Irrational-looking constants disable the lattice.
  CHECK(GradedLieAlgebra({2, 1}, {{0, 1, 2, std::sqrt(2.0)}}).lattice_denominator() == 0);
}

TEST_CASE("polynomial basics") {
  const Polynomial x = Polynomial::variable(2, 0), y = Polynomial::variable(2, 1);
  const Polynomial p = x * y * 3.0 + x - Polynomial::constant(2, 2.0);
  const std::vector<double> pt = {2.0, -1.0};
  CHECK(p.evaluate(pt) == doctest::Approx(-6.0));
  CHECK(p.derivative(0).evaluate(pt) == doctest::Approx(-2.0));
  CHECK(p.derivative(1).evaluate(pt) == doctest::Approx(6.0));
  CHECK((p - p).is_zero());
  const std::vector<int> w = {1, 2};
  CHECK((x * y).is_homogeneous(w, 3));
  CHECK(!p.is_homogeneous(w, 3));
  CHECK(p.to_string({"x", "y"}).find("x*y") != std::string::npos);
}
