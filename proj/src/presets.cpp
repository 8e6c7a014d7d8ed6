#include "nilconv/presets.hpp"

#include <filesystem>
#include <fstream>
#include <regex>

#include "nilconv/convolution.hpp"
#include "nilconv/dyadic.hpp"
#include "nilconv/error.hpp"
#include "nilconv/kernel_io.hpp"

namespace nilconv {

GradedLieAlgebra factor_preset(const std::string& name) {
  static const std::regex abelian_q(R"(abelian\((\d+)\))"), heis(R"(heisenberg(\d+))");
  std::smatch m;
  if (name == "abelian") return GradedLieAlgebra::abelian(1);
  if (std::regex_match(name, m, abelian_q)) return GradedLieAlgebra::abelian(std::stoi(m[1]));
  if (std::regex_match(name, m, heis)) return GradedLieAlgebra::heisenberg(std::stoi(m[1]));
  throw ValidationError("unknown group preset '" + name + "'");
}

ProductGroup group_preset(const std::string& name) {
  if (name == "abelian1") return ProductGroup::single(GradedLieAlgebra::abelian(1));
  if (name == "abelian2") return ProductGroup({GradedLieAlgebra::abelian(1), GradedLieAlgebra::abelian(1)});
  std::vector<GradedLieAlgebra> fs;
  std::size_t start = 0;
  while (true) {
    const std::size_t cut = name.find('x', start);
    fs.push_back(factor_preset(name.substr(start, cut - start)));
    if (cut == std::string::npos) break;
    start = cut + 1;
  }
  return ProductGroup(std::move(fs));
}

std::vector<std::string> group_preset_names() {
  return {"abelian1", "abelian2", "heisenberg1", "abelian(q)", "heisenbergN", "<factor>x<factor>"};
}

namespace {

nlohmann::json read_json_file(const std::string& path, const std::string& where) {
  std::ifstream in(path);
  if (!in) throw ValidationError(where + ": cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(where + ": '" + path + "' is not valid JSON: " + e.what());
  }
}

GradedLieAlgebra load_factor(const nlohmann::json& spec, const std::string& where) {
  if (spec.is_string()) return factor_preset(spec.get<std::string>());
  if (spec.is_object()) return GradedLieAlgebra::from_json(spec, where);
  throw ValidationError(where + ": factor must be a preset name or a group definition");
}

template <class T>
T get_or(const nlohmann::json& j, const char* key, T fallback, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError(where + "/" + key + ": wrong type");
  }
}

cplx amplitude(const nlohmann::json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("amplitude")) return 1.0;
  const auto& a = j.at("amplitude");
  if (a.is_number()) return a.get<double>();
  if (a.is_array() && a.size() == 2 && a[0].is_number() && a[1].is_number())
    return {a[0].get<double>(), a[1].get<double>()};
  throw ValidationError(where + "/amplitude: must be a number or [re, im]");
}

std::shared_ptr<const DyadicDecomposition> dyadic_from(const nlohmann::json& j, const ProductGroup& g,
                                                       std::uint64_t seed, bool flag, const std::string& where) {
  DyadicOptions o;
  o.seed = get_or<std::uint64_t>(j, "seed", seed, where);
  o.flag_mode = flag;
  o.family = profile_family_from_string(get_or<std::string>(j, "family", "random-smooth", where));
  o.moment_order = get_or<int>(j, "moment_order", 2, where);
  const auto w = get_or<std::vector<int>>(j, "window", {-2, 2}, where);
  if (w.size() != 2 || w[0] > w[1]) throw ValidationError(where + "/window: must be [lo, hi] with lo <= hi");
  return synth_dyadic(g, DyadicWindow::cube(g.nu(), w[0], w[1]), o);
}

const std::vector<std::string> kKeys = {"name", "amplitude", "seed", "window", "family", "moment_order",
                                        "component", "path"};

}  // namespace

ProductGroup load_group(const nlohmann::json& spec, const std::string& where) {
  if (spec.is_string()) {
    const auto s = spec.get<std::string>();
    if (s.size() > 5 && s.substr(s.size() - 5) == ".json" && std::filesystem::exists(s))
      return load_group(read_json_file(s, where), where);
    return group_preset(s);
  }
  if (spec.is_array()) {
    if (spec.empty()) throw ValidationError(where + ": product needs at least one factor");
    std::vector<GradedLieAlgebra> fs;
    for (std::size_t i = 0; i < spec.size(); ++i) fs.push_back(load_factor(spec[i], where + "/" + std::to_string(i)));
    return ProductGroup(std::move(fs));
  }
  if (spec.is_object()) return ProductGroup::single(GradedLieAlgebra::from_json(spec, where));
  throw ValidationError(where + ": group must be a preset name, a file path, an object or an array");
}

std::vector<std::string> kernel_preset_names() {
  return {"delta",         "hilbert",      "tensor-hilbert",     "inverse-cross",       "flag-model",
          "riesz",         "random-dyadic", "random-dyadic-flag", "dyadic-perturbation", "file"};
}

std::string kernel_id(const nlohmann::json& spec) {
  if (spec.is_string()) return spec.get<std::string>();
  if (spec.is_object() && spec.contains("name") && spec.at("name").is_string()) {
    std::string id = spec.at("name").get<std::string>();
    if (spec.contains("seed")) id += "#" + spec.at("seed").dump();
    return id;
  }
  return "kernel";
}

KernelRep load_kernel(const nlohmann::json& spec, const ProductGroup& g, const GridSpec& grid, std::uint64_t seed,
                      const std::string& where) {
  std::string name;
  if (spec.is_string()) {
    name = spec.get<std::string>();
  } else if (spec.is_object()) {
    if (!spec.contains("name") || !spec.at("name").is_string()) throw ValidationError(where + "/name: missing");
    name = spec.at("name").get<std::string>();
    for (auto it = spec.begin(); it != spec.end(); ++it)
      if (std::find(kKeys.begin(), kKeys.end(), it.key()) == kKeys.end())
        throw ValidationError(where + "/" + it.key() + ": unknown key");
  } else {
    throw ValidationError(where + ": kernel must be a preset name or an object");
  }
  const cplx amp = amplitude(spec, where);
  auto one_d = []() { return ProductGroup::single(GradedLieAlgebra::abelian(1)); };
  try {
    if (name == "delta") return KernelRep::delta(g, amp);
    if (name == "hilbert") return KernelRep::closed_form(g, ClosedFormId::Hilbert).scaled(amp);
    if (name == "tensor-hilbert") {
      for (int mu = 0; mu < g.nu(); ++mu)
        require(g.factor(mu) == GradedLieAlgebra::abelian(1), "tensor-hilbert needs one-dimensional abelian factors");
      if (g.nu() == 1) return KernelRep::closed_form(g, ClosedFormId::Hilbert).scaled(amp);
      std::vector<KernelRep> hs(static_cast<std::size_t>(g.nu()), KernelRep::closed_form(one_d(), ClosedFormId::Hilbert));
      return KernelRep::tensor(std::move(hs)).scaled(amp);
    }
    if (name == "inverse-cross") return KernelRep::closed_form(g, ClosedFormId::InverseCross).scaled(amp);
    if (name == "flag-model") return KernelRep::closed_form(g, ClosedFormId::FlagModel).scaled(amp);
    if (name == "riesz")
      return KernelRep::closed_form(g, ClosedFormId::Riesz, get_or<int>(spec, "component", 0, where)).scaled(amp);
    if (name == "random-dyadic" || name == "random-dyadic-flag")
      return KernelRep::dyadic(dyadic_from(spec, g, seed, name == "random-dyadic-flag", where)).scaled(amp);
    if (name == "dyadic-perturbation") {
      const double a = spec.is_object() && spec.contains("amplitude") ? std::abs(amp) : 0.1;
      const KernelRep d = KernelRep::dyadic(dyadic_from(spec, g, seed, false, where));
      const GridSpec kg = grid.kernel_grid();
      GridFunction v = symmetric_support(d.render(kg));
      const double dn = op_norm(d, grid).value;
      require(dn > 0.0, "dyadic-perturbation: the dyadic part vanishes on this grid");
      v *= a / dn;
      v += GridFunction::delta(kg);
      return KernelRep::grid(std::move(v));
    }
    if (name == "file") {
      const auto path = get_or<std::string>(spec, "path", "", where);
      if (path.empty()) throw ValidationError(where + "/path: missing");
      return KernelRep::grid(read_kernel_file(path, g)).scaled(amp);
    }
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    if (msg.rfind(where, 0) == 0) throw;
    throw ValidationError(where + ": " + msg);
  }
  throw ValidationError(where + ": unknown kernel preset '" + name + "'");
}

}  // namespace nilconv
