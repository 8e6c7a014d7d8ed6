#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nilconv/convolution.hpp"
#include "nilconv/kernel.hpp"
#include "nilconv/kernel_checks.hpp"
#include "nilconv/seminorms.hpp"

namespace nilconv {

struct EpsilonOptions {
  int max_iter = 500;
  double tol = 1e-10;
  /// Inverse iteration for sigma_min: outer steps and CG budget per solve.
  int inverse_iter = 60;
  int cg_max = 400;
  double cg_tol = 1e-10;
  /// Shift added to A*A, relative to sigma_max^2.
  double shift_rel = 1e-4;
  /// epsilon = 1 / sigma_max^2 instead of the optimal damping.
  bool paper_eps = false;
  /// Forces epsilon; sigma estimates are still reported.
  std::optional<double> epsilon;
  std::uint64_t seed = 1;
  nlohmann::json to_json() const;
};

struct EpsilonChoice {
  double sigma_max = 0.0;
  double sigma_min = 0.0;
  double epsilon = 0.0;
  /// max |1 - epsilon sigma^2| over [sigma_min, sigma_max].
  double s_norm = 0.0;
  bool invertible = true;
  std::string note;
  std::string rule;
  nlohmann::json to_json() const;
};

/// Op(K) on the kernel grid of `grid`, with K truncated to that grid. The
/// Neumann iteration runs on this operator.
DiscreteOperator inversion_operator(const KernelRep& k, const GridSpec& grid, const ConvolveOptions& conv = {});

EpsilonChoice choose_epsilon(const DiscreteOperator& a, const EpsilonOptions& opt = {});
EpsilonChoice choose_epsilon(const KernelRep& k, const GridSpec& grid, const EpsilonOptions& opt = {},
                             const ConvolveOptions& conv = {});

struct ProbeResidual {
  std::string name;
  /// ||Op(K)Op(L)f - f|| / ||f||.
  double kl = 0.0;
  /// ||Op(L)Op(K)f - f|| / ||f||.
  double lk = 0.0;
};

/// Moment-free probes on `grid`: Gaussian-derivative and Mexican-hat
/// tensors and a moment-projected random smooth function, all of width
/// width_rel * T per weight-one axis.
std::vector<std::pair<std::string, GridFunction>> inversion_probes(const GridSpec& grid, double width_rel = 0.125,
                                                                   std::uint64_t seed = 1);

std::vector<ProbeResidual> probe_residuals(const KernelRep& k, const KernelRep& l, const GridSpec& grid,
                                           const std::vector<std::pair<std::string, GridFunction>>& probes,
                                           const ConvolveOptions& conv = {});

struct DecayEntry {
  int n = 0;
  double seminorm = 0.0;
  double root = 0.0;
  double op_norm = 0.0;
  /// Accumulated L2 mass of the compositions lost off the kernel grid.
  double truncated = 0.0;
};

struct DecayReport {
  EpsilonChoice epsilon;
  /// ||Op(S)|| of the S kernel on the domain grid.
  double s_op_norm = 0.0;
  std::vector<int> k;
  std::vector<DecayEntry> entries;
  nlohmann::json grid, config;
  nlohmann::json to_json() const;
  /// n,seminorm,root,op_norm,truncated
  std::string csv() const;
};

struct DecayOptions {
  EpsilonOptions eps;
  SeminormConfig seminorm;
  ConvolveOptions conv;
};

/// S = delta - epsilon K~*K as a kernel on the kernel grid of `grid`.
GridFunction neumann_kernel(const KernelRep& k, const GridSpec& grid, double epsilon, const ConvolveOptions& conv = {},
                            double* truncated = nullptr);

/// ||S^n||_k with S^n formed by repeated kernel composition.
DecayReport seminorm_decay(const KernelRep& k, const GridSpec& grid, std::span<const int> order,
                           const std::vector<int>& n_list, const DecayOptions& opt = {});

struct InversionOptions {
  EpsilonOptions eps;
  int max_n = 4000;
  /// Stop once the increment has L2 norm <= tol * ||partial sum||.
  double tol = 1e-7;
  ConvolveOptions conv;
  double probe_width = 0.125;
  std::uint64_t probe_seed = 1;
  /// When set, the decay report of ||S^n||_k at track_n.
  std::optional<std::vector<int>> track_k;
  std::vector<int> track_n = {1, 2, 4, 8};
  SeminormConfig seminorm;
  /// When set, growth constants of L on interior points.
  std::optional<MultiIndex> growth_alpha;
  GrowthOptions growth;
  nlohmann::json to_json() const;
};

struct InversionResult {
  EpsilonChoice epsilon;
  int iterations = 0;
  bool converged = false;
  /// ||S^n u_0|| / ||u_0|| per step, u_0 = epsilon A* delta.
  std::vector<double> step_norms;
  /// Inverse kernel on the kernel grid of the domain.
  GridFunction inverse;
  std::vector<ProbeResidual> probes;
  double max_residual = 0.0;
  std::optional<DecayReport> decay;
  std::optional<GrowthReport> growth;
  nlohmann::json grid, config;

  explicit InversionResult(GridFunction l) : inverse(std::move(l)) {}
  KernelRep inverse_kernel() const { return KernelRep::grid(inverse); }
  nlohmann::json to_json() const;
};

/// L = epsilon sum_n S^n A* delta with S = I - epsilon A*A. Throws
/// ConvergenceError when Op(K) is not invertible at this resolution.
InversionResult neumann_invert(const KernelRep& k, const GridSpec& grid, const InversionOptions& opt = {});

/// Cosine similarity of two kernels over lattice points with |m_a| < frac * count_a / 2.
double kernel_cosine(const GridFunction& a, const GridFunction& b, double frac = 0.5);

}  // namespace nilconv
