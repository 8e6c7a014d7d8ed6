#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nilconv/grid.hpp"
#include "nilconv/product_group.hpp"

namespace nilconv {

/// Group law and norm checks on seeded random samples per factor.
struct GroupCheck {
  std::string name;
  int homogeneous_dimension = 0;
  std::vector<int> layer_dims;
  std::int64_t lattice_denominator = 1;
  double jacobi_residual = 0.0;
  /// max |(xy)z - x(yz)|, |x0 - x|, |0x - x|, |x x^-1|, |x^-1 x|.
  double associativity = 0.0;
  double identity = 0.0;
  double inverse = 0.0;
  /// max |rho(delta_r x) - r rho(x)| / (r rho(x)).
  double homogeneity = 0.0;
  double triangle = 1.0;
  std::size_t samples = 0;
  nlohmann::json to_json() const;
};

std::vector<GroupCheck> check_group(const ProductGroup& g, std::size_t samples, std::uint64_t seed);

/// Commands: group-check, kernel-synth, kernel-check-growth,
/// kernel-check-cancel, convolve, opnorm, seminorm, tame, invert, decay.
std::vector<std::string> command_names();

/// Defaults for a command. Keys: command, group, grid {N, T}, kernel,
/// kernel2, k (null means all ones), seed, seminorm, options.
nlohmann::json default_config(const std::string& command);

/// Applies "a.b=value" or "/a/b=value"; the value is parsed as JSON and
/// taken as a string when that fails.
void apply_override(nlohmann::json& cfg, const std::string& assignment);

/// Deep merge of `patch` into `base` (objects merge, everything else
/// replaces).
void merge_config(nlohmann::json& base, const nlohmann::json& patch);

/// Checks keys and types against the command defaults. Errors name the
/// JSON pointer of the offending entry.
void validate_config(const nlohmann::json& cfg);

struct RunOutput {
  /// Deterministic report: resolved config and results.
  nlohmann::json report;
  /// CSV and other text artifacts by file name.
  std::vector<std::pair<std::string, std::string>> files;
  /// Kernel files by file name.
  std::vector<std::pair<std::string, GridFunction>> kernels;
  /// 0 success, 3 numerical non-convergence.
  int exit_code = 0;
  std::string summary;
};

/// Runs one command. Throws ValidationError (exit 2) on bad input and
/// ConvergenceError (exit 3) when an iteration cannot proceed.
RunOutput run_experiment(const nlohmann::json& cfg);

/// Writes report.json, run_meta.json and the artifacts into `dir`.
void write_outputs(const RunOutput& out, const std::string& dir, const nlohmann::json& run_meta);

/// Column documentation per command, for --help.
std::string csv_columns(const std::string& command);

}  // namespace nilconv
