#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "nilconv/kernel.hpp"

namespace nilconv {

enum class GrowthMode { Product, Flag };

std::string to_string(GrowthMode m);
GrowthMode growth_mode_from_string(const std::string& s);

struct GrowthEntry {
  MultiIndex alpha;
  /// sup |d^alpha K(t)| prod_mu w_mu(t)^{Q_mu + deg alpha_mu} over the samples.
  double constant = 0.0;
  std::vector<double> argmax;
  std::size_t samples = 0;
};

struct GrowthReport {
  GrowthMode mode = GrowthMode::Product;
  std::vector<GrowthEntry> entries;
  /// False when the kernel has no pointwise values off its singular set
  /// (deltas); constants then come from a grid rendering and depend on it.
  bool valid = true;
  std::string note;
  /// "analytic", "finite-difference" or "grid".
  std::string method;

  double max_constant() const;
  const GrowthEntry* find(const MultiIndex& alpha) const;
  nlohmann::json to_json() const;
};

struct GrowthOptions {
  GrowthMode mode = GrowthMode::Product;
  std::size_t samples = 2000;
  std::uint64_t seed = 1;
  /// Finite-difference step relative to the local scale |t_mu|^{d_j}.
  double fd_rel = 1e-2;
  /// Pointwise samples have log2 |t_mu| uniform in [log2_lo, log2_hi].
  double log2_lo = -3.0;
  double log2_hi = 3.0;
  /// Grid used for kernels without pointwise values (deltas).
  std::optional<GridSpec> grid;
  /// Grid samples keep |m_a| <= interior * count_a / 2.
  double interior = 0.5;
  /// Interiors with at most this many lattice points are enumerated.
  std::size_t exhaustive_limit = std::size_t{1} << 18;
  /// Grid samples keep this many cells between the stencil and the
  /// singular set.
  int singular_margin = 3;
};

/// Componentwise alpha <= alpha_max.
std::vector<MultiIndex> multi_indices_below(const MultiIndex& alpha_max);

/// Empirical growth constants for every alpha <= alpha_max. Closed forms
/// use analytic derivatives; other pointwise kernels use centered
/// differences with one Richardson step; grid data is differenced on its
/// lattice (step 2 on axes supported on odd indices).
GrowthReport check_growth(const KernelRep& k, const MultiIndex& alpha_max, const GrowthOptions& opt = {});

/// Growth constants of grid data, sampled on interior lattice points.
GrowthReport check_growth_grid(const GridFunction& f, const MultiIndex& alpha_max, const GrowthOptions& opt = {});

/// b(s) = exp(-1/(1-s^2)) / exp(-1) on [0,1), 0 beyond; b(0) = 1.
double bump_profile(double s);

/// Test function on one factor group with support in its unit ball.
struct Bump {
  std::string name;
  std::function<double(std::span<const double>)> eval;
};

/// even: b(|t|); shifted: b(2|c^-1 t|), c = (1/2, 0, ...); odd: difference
/// of the shifted bump and its reflection.
std::vector<Bump> bump_catalog(const GradedLieAlgebra& g);

struct CancellationEntry {
  double r = 1.0;
  std::string bump;
  GrowthReport growth;
};

struct CancellationReport {
  int mu = 0;
  std::vector<CancellationEntry> entries;
  /// Per bump, per alpha: sup over R of the reduced constants.
  std::vector<std::pair<std::string, std::vector<GrowthEntry>>> sup_over_r;
  std::vector<std::string> catalog;
  nlohmann::json to_json() const;
};

struct CancellationOptions {
  GrowthOptions growth;
  /// Grid carrying the reduced kernel when it is not a tensor.
  std::optional<GridSpec> reduced_grid;
  /// Midpoint nodes per axis of the integrated factor.
  int quadrature_points = 256;
};

/// K_{phi,R}(t') = int K(t) phi(R . t_mu) dt_mu over factor mu.
KernelRep reduce_kernel(const KernelRep& k, int mu, double r, const Bump& bump, const CancellationOptions& opt = {});

/// Reduces over factor mu for every R and bump, and checks the growth
/// of each reduced (nu-1)-factor kernel.
CancellationReport check_cancellation(const KernelRep& k, int mu, const std::vector<double>& r_list,
                                      const std::vector<Bump>& bumps, const MultiIndex& alpha_max,
                                      const CancellationOptions& opt = {});

}  // namespace nilconv
