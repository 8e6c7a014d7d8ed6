#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nilconv/convolution.hpp"
#include "nilconv/grid.hpp"
#include "nilconv/kernel.hpp"

namespace nilconv {

/// b(|c^-1 x_mu| / radius) on factor mu, b the catalog bump profile.
struct BumpSpec {
  int mu = 0;
  std::vector<double> center;
  double radius = 1.0;
  nlohmann::json to_json() const;
};

/// Product of the listed bumps; factors without a bump contribute 1.
GridFunction bump_values(const GridSpec& domain, const std::vector<BumpSpec>& bumps);

struct BlockOptions {
  int max_iter = 300;
  double tol = 1e-10;
  std::uint64_t seed = 1;
  /// Per factor: required |c_phi^-1 c_gamma| / max(r_phi, r_gamma); 0 skips.
  std::vector<double> separation;
};

/// Kernel data prepared for localized blocks on a domain grid.
class BlockKernel {
 public:
  BlockKernel(const KernelRep& k, const GridSpec& domain);
  BlockKernel(const GridFunction& kernel_on_kernel_grid, const GridSpec& domain);

  const GridSpec& domain() const { return domain_; }
  const GridFunction& kernel() const { return kernel_; }
  /// K(x y^-1) for lattice points of the domain; zero off the kernel grid.
  cplx at(std::span<const int> x, std::span<const int> y) const;

 private:
  GridSpec domain_;
  GridFunction kernel_;
};

/// Power-iteration estimate of || M_phi X^alpha Op(K) M_gamma ||. The
/// fields act on the output of the convolution (zero extension outside
/// the domain). Throws ValidationError when a bump support reaches the
/// grid boundary, when the stencil of the phi support meets the gamma
/// support, or when a separation requirement fails.
OpNormEstimate localized_block(const BlockKernel& k, const MultiIndex& alpha, const std::vector<BumpSpec>& phi,
                               const std::vector<BumpSpec>& gamma, const BlockOptions& opt = {});
OpNormEstimate localized_block(const KernelRep& k, const GridSpec& domain, const MultiIndex& alpha,
                               const std::vector<BumpSpec>& phi, const std::vector<BumpSpec>& gamma,
                               const BlockOptions& opt = {});

struct SeminormConfig {
  /// Bump radii 2^j and 2^l for j, l in [j_min, j_max].
  int j_min = -1;
  int j_max = 1;
  /// Centers z_mu run over lattice points whose indices are multiples of
  /// this stride.
  int center_stride = 1;
  /// Centers farther than this many minimal separations are skipped; 0
  /// keeps every center that fits the box.
  double center_shells = 0.0;
  /// |z_mu| >= separation * C'_mu * 2^{max(j, l)}, C'_mu = safety times the
  /// sampled quasi-triangle constant.
  double separation = 3.0;
  double triangle_safety = 1.1;
  std::size_t triangle_samples = 100000;
  int max_iter = 300;
  double tol = 1e-10;
  std::uint64_t seed = 1;
  std::string bump = "exp-bump";
  /// Keep the (j, l, |z|) -> value surface in the report.
  bool keep_surface = false;

  void validate() const;
  nlohmann::json to_json() const;
  static SeminormConfig from_json(const nlohmann::json& j, const std::string& where = "");
};

/// One sampled configuration of a localized block.
struct BlockSample {
  MultiIndex alpha;
  std::vector<int> mu;  // localized factors
  std::vector<int> j, l;
  std::vector<std::vector<double>> z;
  double block = 0.0;
  double weight = 0.0;
  double value = 0.0;  // block * weight
  double residual = 0.0;
  nlohmann::json to_json() const;
};

struct AlphaTerm {
  MultiIndex alpha;
  double sup = 0.0;
  std::optional<BlockSample> argmax;
  std::size_t blocks = 0;
};

/// A product-kernel subset term ||K||^S_{k^S} or a flag single-factor term.
struct SeminormTerm {
  std::string label;
  SubsetMask subset;
  int flag_mu = -1;
  std::vector<int> k;
  double value = 0.0;
  std::vector<AlphaTerm> alphas;
  nlohmann::json to_json(int nu) const;
};

struct SeminormReport {
  std::vector<int> k;
  bool flag = false;
  double op_norm = 0.0;
  double op_norm_residual = 0.0;
  std::vector<SeminormTerm> subsets;
  double total = 0.0;
  std::vector<SeminormTerm> flag_terms;
  double flag_total = 0.0;
  std::vector<double> triangle;
  nlohmann::json grid, config, lattice;
  std::vector<BlockSample> surface;

  const SeminormTerm& subset(SubsetMask s) const;
  nlohmann::json to_json() const;
  /// term, alpha, j, l, |z|, block, weight, value per sampled block.
  std::string surface_csv() const;
};

/// Shared state for seminorm estimates of one kernel on one domain.
class SeminormEstimator {
 public:
  SeminormEstimator(const KernelRep& k, const GridSpec& domain, SeminormConfig cfg,
                    ConvolveOptions conv = {});
  SeminormEstimator(const GridFunction& kernel_on_kernel_grid, const GridSpec& domain, SeminormConfig cfg,
                    ConvolveOptions conv = {});

  const GridSpec& domain() const { return block_.domain(); }
  const SeminormConfig& config() const { return cfg_; }
  const std::vector<double>& triangle() const { return triangle_; }

  /// ||Op(K)||.
  const OpNormEstimate& op_norm() const;
  /// ||K||^S_{k^S}: sum over alpha^S <= k^S of the sup over sampled
  /// (j, l, z) of block * prod_{mu in S} |z_mu|^{Q_mu + deg alpha_mu}.
  /// The empty subset gives ||Op(K)||.
  SeminormTerm subset_term(std::span<const int> k, SubsetMask s, std::vector<BlockSample>* surface = nullptr) const;
  /// Flag term for factor mu: localized in mu only, alpha_nu <= k_nu for
  /// nu >= mu, weight prod_{nu >= mu} |z_mu|^{Q_nu + deg alpha_nu}.
  SeminormTerm flag_term(std::span<const int> k, int mu, std::vector<BlockSample>* surface = nullptr) const;

  SeminormReport pk(std::span<const int> k) const;
  /// Flag seminorm: the product total plus the single-factor flag terms.
  SeminormReport fk(std::span<const int> k) const;

  /// Lattice of (j, l, z) per factor actually sampled, for reports.
  nlohmann::json lattice_json(std::span<const int> k) const;

 private:
  struct Triple {
    int j, l;
    std::vector<double> z;
    double znorm;
  };
  std::vector<Triple> triples(int mu, int reach) const;
  SeminormTerm localized_term(std::span<const int> k, const std::vector<int>& loc, const std::vector<MultiIndex>& alphas,
                              const std::vector<int>& weight_factors, std::string label,
                              std::vector<BlockSample>* surface) const;
  void init(ConvolveOptions conv);

  BlockKernel block_;
  SeminormConfig cfg_;
  std::vector<double> triangle_;
  std::shared_ptr<const DiscreteOperator> op_;
  mutable std::optional<OpNormEstimate> op_norm_;
};

SeminormReport pk_seminorm(const KernelRep& k, std::span<const int> order, const GridSpec& domain,
                           const SeminormConfig& cfg = {});
SeminormReport fk_seminorm(const KernelRep& k, std::span<const int> order, const GridSpec& domain,
                           const SeminormConfig& cfg = {});

}  // namespace nilconv
