#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "nilconv/grid.hpp"

namespace nilconv {

enum class ProfileFamily { GaussianDerivative, MexicanHat, RandomSmooth };

std::string to_string(ProfileFamily f);
ProfileFamily profile_family_from_string(const std::string& s);

/// A smooth function on one factor R^{q}: the raw family member minus
/// w(t) * sum_beta a_beta (t/sigma)^beta, which removes its moments. Zero outside
/// the unit box.
struct FactorFunction {
  ProfileFamily family = ProfileFamily::GaussianDerivative;
  int q = 1;
  double half_width = 8.0;
  // Random family: sum of Gaussian bumps.
  std::vector<double> amps;
  std::vector<std::vector<double>> centers;
  std::vector<double> widths;
  // Moment correction.
  std::vector<std::vector<int>> exponents;
  std::vector<double> poly;
  std::vector<double> window_sigma;

  double raw(std::span<const double> t) const;
  double eval(std::span<const double> t) const;
};

/// One dyadic term phi_n = prod_mu F_mu(t_mu).
struct ScaleTerm {
  std::vector<int> n;
  SubsetMask cancel;
  std::vector<FactorFunction> factors;
};

struct DyadicWindow {
  std::vector<int> lo;
  std::vector<int> hi;
  static DyadicWindow cube(int nu, int lo, int hi);
};

struct DyadicOptions {
  ProfileFamily family = ProfileFamily::GaussianDerivative;
  int moment_order = 2;
  bool flag_mode = false;
  std::uint64_t seed = 1;
  /// Samples per axis of the unit box; 0 picks 64 (32 for q >= 3).
  int profile_samples = 0;
  double unit_half_width = 8.0;
  std::size_t memory_budget = std::size_t{1} << 30;
};

class DyadicDecomposition {
 public:
  DyadicDecomposition(ProductGroup group, DyadicWindow window, DyadicOptions options, std::vector<ScaleTerm> scales,
                      std::vector<double> bounds);

  const ProductGroup& group() const { return group_; }
  const DyadicWindow& window() const { return window_; }
  const DyadicOptions& options() const { return options_; }
  const std::vector<ScaleTerm>& scales() const { return scales_; }
  /// Per scale: max over factors and pure derivative orders <= M of the
  /// sampled sup norm.
  const std::vector<double>& profile_bounds() const { return bounds_; }

  /// Index of scale n, or -1.
  int index_of(std::span<const int> n) const;
  double profile(std::size_t s, std::span<const double> t) const;
  /// 2^{sum n_mu Q_mu} phi_n(2^{n_1} . t_1, ..., 2^{n_nu} . t_nu).
  double dilated_eval(std::size_t s, std::span<const double> t) const;
  double eval(std::span<const double> t) const;

  GridSpec unit_box_spec() const;
  GridFunction profile_grid(std::size_t s) const;
  nlohmann::json to_json() const;

 private:
  ProductGroup group_;
  DyadicWindow window_;
  DyadicOptions options_;
  std::vector<ScaleTerm> scales_;
  std::vector<double> bounds_;
};

/// Builds the dyadic kernel sum_n phi_n^{(2^n)} over the window. Flag mode
/// keeps n_1 >= ... >= n_nu and cancels moments only in factors
/// S(n) = {mu : mu = nu or n_mu > n_{mu+1}}.
std::shared_ptr<const DyadicDecomposition> synth_dyadic(const ProductGroup& group, const DyadicWindow& window,
                                                        const DyadicOptions& options);

/// Projects out the factor-mu moments of order <= M (M <= 4). The
/// correction lies in span{t^beta w(t)} for a Gaussian window w and is
/// orthogonal in the 1/w-weighted inner product, so the map is an
/// idempotent projector and the discrete moments vanish.
GridFunction enforce_moments(const GridFunction& f, int moment_order, int mu);

/// Riemann-sum moments int t_mu^beta f dt_mu, maximised over |beta| <= M
/// and over the other coordinates.
double max_moment(const GridFunction& f, int moment_order, int mu);

/// Exponent tuples of total degree <= M in q variables.
std::vector<std::vector<int>> monomial_exponents(int q, int moment_order);

}  // namespace nilconv
