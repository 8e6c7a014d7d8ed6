#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "helpers.hpp"
#include "nilconv/error.hpp"
#include "nilconv/grid_fields.hpp"
#include "nilconv/kernel_io.hpp"

using namespace nilconv;

namespace {

ProductGroup heis() { return ProductGroup::single(GradedLieAlgebra::heisenberg(1)); }

bool interior(const GridSpec& s, std::span<const int> m, int margin) {
  for (int a = 0; a < s.ndim(); ++a)
    if (m[a] < s.axes()[a].lo() + margin || m[a] > s.axes()[a].hi() - margin) return false;
  return true;
}

}  // namespace

TEST_CASE("Heisenberg fields are exact on quadratics") {
  const auto s = GridSpec::make(heis(), 8, 2.0);
  const auto f = GridFunction::sample(s, [](std::span<const double> x) { return cplx(x[0] * x[2]); });
  const auto g = GridFunction::sample(s, [](std::span<const double> x) { return cplx(x[0] * x[1]); });
  const auto x1f = apply_fields(f, MultiIndex(std::vector<std::vector<int>>{{1, 0, 0}}));
  const auto x1x2g = apply_fields(g, MultiIndex(std::vector<std::vector<int>>{{1, 1, 0}}));
  std::vector<int> m(3);
  for (std::size_t i = 0; i < s.size(); ++i) {
    s.lattice(i, m);
    const auto x = s.coords(i);
    if (interior(s, m, 1)) CHECK(std::abs(x1f[i] - cplx(x[2] - 0.5 * x[1] * x[0])) <= 1e-12);
    if (interior(s, m, 2)) CHECK(std::abs(x1x2g[i] - cplx(1.0)) <= 1e-12);
  }
}

TEST_CASE("apply_fields agrees with pointwise stencils") {
  const auto s = GridSpec::make(heis(), 8, 2.0);
  Rng rng(5);
  const auto f = testing_util::random_compact(s, 4, rng);
  const MultiIndex a(std::vector<std::vector<int>>{{1, 1, 1}});
  const auto af = apply_fields(f, a);
  const FieldStencils fs(s);
  std::vector<int> m(3), p(3);
  for (std::size_t i = 0; i < s.size(); ++i) {
    s.lattice(i, m);
    const auto st = fs.at(a, m);
    CHECK(st.reach() <= field_reach(a));
    cplx v = 0.0;
    for (std::size_t k = 0; k < st.offsets.size(); ++k) {
      for (int d = 0; d < 3; ++d) p[d] = m[d] + st.offsets[k][d];
      if (s.in_range(p)) v += st.weights[k] * f.at_lattice(p);
    }
    CHECK(std::abs(v - af[i]) <= 1e-9 * (1.0 + std::abs(af[i])));
  }
}

TEST_CASE("kernel files round trip and reject damage") {
  const auto g = heis();
  const auto s = GridSpec::make(g, 8, 1.5);
  Rng rng(9);
  const auto f = testing_util::random_compact(s, 3, rng);
  const std::string path = "test_kernel_io.nckr";
  write_kernel_file(path, f, {{"note", "probe"}});
  const auto h = read_kernel_header(path);
  CHECK(h.nu == 1);
  CHECK(h.q[0] == 3);
  CHECK(h.n == 8);
  CHECK(h.t == 1.5);
  const auto back = read_kernel_file(path);
  CHECK(back.spec() == s);
  CHECK(back.values() == f.values());
  CHECK(read_kernel_file(path, g).values() == f.values());

  {
    std::fstream io(path, std::ios::in | std::ios::out | std::ios::binary);
    io.seekp(0);
    io.write("XXXX", 4);
  }
  CHECK_THROWS_AS(read_kernel_file(path), ValidationError);
  write_kernel_file(path, f);
  std::ifstream in(path, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();
  std::ofstream(path, std::ios::binary | std::ios::trunc).write(bytes.data(), static_cast<std::streamsize>(bytes.size() - 8));
  CHECK_THROWS_AS(read_kernel_file(path), ValidationError);
  std::remove(path.c_str());
  std::remove((path + ".json").c_str());
  CHECK_THROWS_AS(read_kernel_file(path), ValidationError);
}
