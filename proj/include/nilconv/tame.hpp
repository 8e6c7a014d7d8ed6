#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "nilconv/convolution.hpp"
#include "nilconv/kernel.hpp"
#include "nilconv/seminorms.hpp"

namespace nilconv {

enum class TameKind { Product, Single, Flag };

std::string to_string(TameKind k);
TameKind tame_kind_from_string(const std::string& s);

/// One seminorm factor of a right-hand-side summand.
struct SummandFactor {
  /// "K" or "L".
  std::string kernel;
  /// "op", "pk", "fk", or "pk^{mu}" for a single-subset term.
  std::string seminorm;
  /// Derivative orders per parameter; all zero for "op".
  std::vector<int> orders;
  double value = 0.0;
  bool operator==(const SummandFactor&) const = default;
};

struct TameSummand {
  std::string label;
  std::vector<SummandFactor> factors;
  double value = 0.0;
};

struct TameReport {
  TameKind kind = TameKind::Product;
  std::string k_id = "K", l_id = "L";
  std::vector<int> k;
  /// Seminorm of K*L used on the left.
  std::string lhs_seminorm;
  double lhs = 0.0;
  std::vector<TameSummand> summands;
  double rhs = 0.0;
  double ratio = 0.0;
  /// L2 mass of K*L falling outside the kernel grid.
  double truncated = 0.0;
  nlohmann::json grid, config;

  nlohmann::json to_json() const;
};

struct TameOptions {
  SeminormConfig seminorm;
  ConvolveOptions conv;
  std::string k_id = "K", l_id = "L";
};

/// Both sides of the two-parameter product estimate at orders k.
TameReport tame_report_pk(const KernelRep& k, const KernelRep& l, std::span<const int> order, const GridSpec& domain,
                          const TameOptions& opt = {});
/// ||K*L||^{1}_{(k1,0)} against ||K||^{1} ||Op(L)|| + ||Op(K)|| ||L||^{1}.
TameReport tame_report_single(const KernelRep& k, const KernelRep& l, int k1, const GridSpec& domain,
                              const TameOptions& opt = {});
/// Flag estimate: flag seminorms on the outer summands and the left,
/// single-subset product seminorms in the middle.
TameReport tame_report_fk(const KernelRep& k, const KernelRep& l, std::span<const int> order, const GridSpec& domain,
                          const TameOptions& opt = {});
TameReport tame_report(TameKind kind, const KernelRep& k, const KernelRep& l, std::span<const int> order,
                       const GridSpec& domain, const TameOptions& opt = {});

/// Every summand has at most one factor with a nonzero order in each
/// parameter. Writes the first offending summand to `why`.
bool tameness_structure_ok(const TameReport& r, std::string* why = nullptr);

/// The report with the roles of K and L exchanged in the summand metadata.
TameReport relabeled(const TameReport& r);

/// True when the summands of `swapped` (computed for (L, K)) are the
/// summands of `r` (computed for (K, L)) after relabeling, as a multiset,
/// with identical values.
bool relabeling_identity(const TameReport& r, const TameReport& swapped);

/// kind,k_id,l_id,k,lhs,rhs,ratio,summand values...
std::string tame_csv_header(const TameReport& r);
std::string tame_csv_row(const TameReport& r);

}  // namespace nilconv
