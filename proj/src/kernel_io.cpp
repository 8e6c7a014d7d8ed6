#include "nilconv/kernel_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "nilconv/error.hpp"

namespace nilconv {

namespace {

static_assert(std::endian::native == std::endian::little, "kernel files assume a little-endian host");

constexpr char kMagic[4] = {'N', 'C', 'K', 'R'};
constexpr std::size_t kHeaderBytes = 64;

template <class T>
void put(std::vector<char>& buf, std::size_t at, T v) {
  std::memcpy(buf.data() + at, &v, sizeof(T));
}

template <class T>
T get(const std::vector<char>& buf, std::size_t at) {
  T v;
  std::memcpy(&v, buf.data() + at, sizeof(T));
  return v;
}

}  // namespace

void write_kernel_file(const std::string& path, const GridFunction& f, const nlohmann::json& meta) {
  const GridSpec& spec = f.spec();
  const ProductGroup& g = spec.group();
  require(g.nu() <= 8, "kernel file: at most 8 factors");
  require(spec == GridSpec::make(g, spec.n(), spec.t()), "kernel file: grid is not a standard grid");
  std::vector<char> head(kHeaderBytes, 0);
  std::memcpy(head.data(), kMagic, 4);
  put<std::uint32_t>(head, 4, 1);
  put<std::uint32_t>(head, 8, static_cast<std::uint32_t>(g.nu()));
  for (int mu = 0; mu < g.nu(); ++mu) put<std::uint32_t>(head, 12 + 4 * mu, static_cast<std::uint32_t>(g.dim(mu)));
  put<std::uint32_t>(head, 44, static_cast<std::uint32_t>(spec.n()));
  put<double>(head, 48, spec.t());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("kernel file: cannot write " + path);
  out.write(head.data(), static_cast<std::streamsize>(head.size()));
  out.write(reinterpret_cast<const char*>(f.values().data()),
            static_cast<std::streamsize>(f.values().size() * sizeof(cplx)));
  std::ofstream side(path + ".json");
  if (!side) throw ValidationError("kernel file: cannot write " + path + ".json");
  side << nlohmann::json{{"group", g.to_json()}, {"grid", spec.to_json()}, {"meta", meta}}.dump(2) << "\n";
}

KernelFileHeader read_kernel_header(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("kernel file: cannot open " + path);
  std::vector<char> head(kHeaderBytes);
  in.read(head.data(), static_cast<std::streamsize>(head.size()));
  if (in.gcount() != static_cast<std::streamsize>(kHeaderBytes) || std::memcmp(head.data(), kMagic, 4) != 0)
    throw ValidationError("kernel file: " + path + " is not a kernel file");
  KernelFileHeader h;
  h.version = get<std::uint32_t>(head, 4);
  if (h.version != 1) throw ValidationError("kernel file: unsupported version " + std::to_string(h.version));
  h.nu = get<std::uint32_t>(head, 8);
  if (h.nu < 1 || h.nu > 8) throw ValidationError("kernel file: bad factor count");
  for (int mu = 0; mu < 8; ++mu) h.q[mu] = get<std::uint32_t>(head, 12 + 4 * static_cast<std::size_t>(mu));
  h.n = get<std::uint32_t>(head, 44);
  h.t = get<double>(head, 48);
  return h;
}

GridFunction read_kernel_file(const std::string& path, const std::optional<ProductGroup>& group) {
  const auto h = read_kernel_header(path);
  std::optional<ProductGroup> g = group;
  if (!g) {
    std::ifstream side(path + ".json");
    if (side) {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(side);
      } catch (const nlohmann::json::exception& e) {
        throw ValidationError("kernel file: bad sidecar " + path + ".json: " + e.what());
      }
      std::vector<GradedLieAlgebra> fs;
      const auto& arr = j.at("group");
      for (std::size_t i = 0; i < arr.size(); ++i)
        fs.push_back(GradedLieAlgebra::from_json(arr[i], "/group/" + std::to_string(i)));
      g = ProductGroup(std::move(fs));
    } else {
      std::vector<GradedLieAlgebra> fs;
      for (std::uint32_t mu = 0; mu < h.nu; ++mu) fs.push_back(GradedLieAlgebra::abelian(static_cast<int>(h.q[mu])));
      g = ProductGroup(std::move(fs));
    }
  }
  require(g->nu() == static_cast<int>(h.nu), "kernel file: factor count does not match the group");
  for (int mu = 0; mu < g->nu(); ++mu)
    require(g->dim(mu) == static_cast<int>(h.q[mu]), "kernel file: factor dimension does not match the group");
  const GridSpec spec = GridSpec::make(*g, static_cast<int>(h.n), h.t);
  std::ifstream in(path, std::ios::binary);
  in.seekg(static_cast<std::streamoff>(kHeaderBytes));
  std::vector<cplx> values(spec.size());
  in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(cplx)));
  if (in.gcount() != static_cast<std::streamsize>(values.size() * sizeof(cplx)))
    throw ValidationError("kernel file: " + path + " is truncated");
  return GridFunction(spec, std::move(values));
}

}  // namespace nilconv
