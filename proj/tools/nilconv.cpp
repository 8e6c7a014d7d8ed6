#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "nilconv/error.hpp"
#include "nilconv/experiments.hpp"
#include "nilconv/parallel.hpp"

namespace {

using nlohmann::json;

struct Flags {
  std::string preset, kernel, kernel2, variant, config, out;
  std::optional<int> n, pairs;
  std::optional<double> t;
  std::vector<int> k;
  std::optional<std::uint64_t> seed;
  bool flag = false, paper_eps = false;
  std::vector<std::string> sets;
  int jobs = 0;
};

std::string iso_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

json build_config(const std::string& command, const Flags& f) {
  json cfg = nilconv::default_config(command);
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw nilconv::ValidationError("--config: cannot open '" + f.config + "'");
    json file;
    try {
      file = json::parse(in);
    } catch (const json::parse_error& e) {
      throw nilconv::ValidationError("--config: invalid JSON: " + std::string(e.what()));
    }
    if (file.contains("command") && file.at("command") != command)
      throw nilconv::ValidationError("/command: config is for '" + file.at("command").dump() + "'");
    nilconv::merge_config(cfg, file);
  }
  auto as_spec = [](const std::string& s) -> json {
    if (!s.empty() && s.front() == '{') return json::parse(s);
    return s;
  };
  if (!f.preset.empty()) cfg["group"] = as_spec(f.preset);
  if (!f.kernel.empty()) cfg["kernel"] = as_spec(f.kernel);
  if (!f.kernel2.empty()) cfg["kernel2"] = as_spec(f.kernel2);
  if (f.n) cfg["grid"]["N"] = *f.n;
  if (f.t) cfg["grid"]["T"] = *f.t;
  if (!f.k.empty()) cfg["k"] = f.k;
  if (f.seed) cfg["seed"] = *f.seed;
  if (f.pairs) cfg["options"]["pairs"] = *f.pairs;
  if (!f.variant.empty()) cfg["options"]["variant"] = f.variant;
  if (f.flag) cfg["options"]["flag"] = true;
  if (f.paper_eps) cfg["options"]["paper_eps"] = true;
  for (const auto& s : f.sets) nilconv::apply_override(cfg, s);
  return cfg;
}

int run(const std::string& command, const Flags& f, const std::vector<std::string>& argv) {
  if (f.jobs > 0) nilconv::set_jobs(static_cast<unsigned>(f.jobs));
  const json cfg = build_config(command, f);
  const auto t0 = std::chrono::steady_clock::now();
  const auto out = nilconv::run_experiment(cfg);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::string dir = f.out;
  if (dir.empty()) {
    const char* env = std::getenv("NILCONV_OUT");
    dir = env && *env ? std::string(env) : std::string("nilconv_out");
    dir += "/" + command;
  }
  const json meta = {{"timestamp", iso_now()}, {"wall_seconds", wall}, {"jobs", nilconv::jobs()}, {"argv", argv}};
  nilconv::write_outputs(out, dir, meta);
  std::cout << out.summary << "\n" << "report: " << dir << "/report.json\n";
  return out.exit_code;
}

void add_flags(CLI::App* app, Flags& f, const std::string& command) {
  app->add_option("--preset", f.preset, "group preset, group JSON file, or inline JSON");
  app->add_option("--kernel", f.kernel, "kernel preset or inline JSON spec");
  if (command == "convolve" || command == "tame")
    app->add_option("--kernel2", f.kernel2, "second kernel preset or inline JSON spec");
  app->add_option("--N", f.n, "points per axis of the function grid");
  app->add_option("--T", f.t, "half-width of the first-layer box");
  app->add_option("--k", f.k, "seminorm order per factor")->expected(1, -1);
  app->add_option("--seed", f.seed, "base seed");
  if (command == "tame") {
    app->add_option("--pairs", f.pairs, "number of seeded dyadic pairs (0 uses --kernel/--kernel2)");
    app->add_option("--variant", f.variant, "product, single or flag");
  }
  if (command == "seminorm") app->add_flag("--flag", f.flag, "flag seminorm instead of the product seminorm");
  if (command == "invert" || command == "decay")
    app->add_flag("--paper-eps", f.paper_eps, "use epsilon = 1/sigma_max^2");
  app->add_option("--config", f.config, "JSON config file merged over the defaults");
  app->add_option("--set", f.sets, "override, key.path=value (value parsed as JSON)");
  app->add_option("--jobs", f.jobs, "worker threads (0 = hardware concurrency)");
  app->add_option("--out", f.out, "output directory (default $NILCONV_OUT/<command> or nilconv_out/<command>)");
  app->footer("CSV columns:\n  " + nilconv::csv_columns(command) +
              "\nExit status: 0 success, 2 invalid input, 3 numerical non-convergence.");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convolution operators on graded nilpotent product groups"};
  app.require_subcommand(1);
  Flags flags;
  std::string chosen;
  auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& command, const std::string& help) {
    auto* sub = parent->add_subcommand(name, help);
    add_flags(sub, flags, command);
    sub->callback([&chosen, command] { chosen = command; });
  };
  auto* group = app.add_subcommand("group", "group checks");
  group->require_subcommand(1);
  leaf(group, "check", "group-check", "group law, grading and norm checks");
  auto* kernel = app.add_subcommand("kernel", "kernel synthesis and checks");
  kernel->require_subcommand(1);
  leaf(kernel, "synth", "kernel-synth", "render a kernel to a kernel file");
  leaf(kernel, "check-growth", "kernel-check-growth", "empirical growth constants");
  leaf(kernel, "check-cancel", "kernel-check-cancel", "cancellation constants over one factor");
  leaf(&app, "convolve", "convolve", "compose two kernels");
  leaf(&app, "opnorm", "opnorm", "operator norm on L2 of the grid");
  leaf(&app, "seminorm", "seminorm", "product or flag seminorm estimate");
  leaf(&app, "tame", "tame", "tameness ratios for kernel pairs");
  leaf(&app, "invert", "invert", "Neumann-series inverse kernel");
  leaf(&app, "decay", "decay", "nth roots of seminorms of S^n");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  std::vector<std::string> args(argv, argv + argc);
  try {
    return run(chosen, flags, args);
  } catch (const nilconv::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
