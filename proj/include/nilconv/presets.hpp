#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "nilconv/grid.hpp"
#include "nilconv/kernel.hpp"

namespace nilconv {

/// Single-factor presets: "abelian(q)", "abelian" (q = 1), "heisenbergN".
GradedLieAlgebra factor_preset(const std::string& name);

/// Product presets: "abelian1" (R), "abelian2" (R x R), "heisenberg1",
/// single-factor names, or factor names joined by 'x'
/// ("heisenberg1xabelian(1)").
ProductGroup group_preset(const std::string& name);

std::vector<std::string> group_preset_names();

/// A group spec: a preset name, a path to a JSON file, a group-definition
/// object, or an array of factor specs. Errors name the JSON pointer.
ProductGroup load_group(const nlohmann::json& spec, const std::string& where = "/group");

/// Kernel specs are a preset name or an object {"name": ..., options}.
///   delta               amplitude (number or [re, im])
///   hilbert             nu = 1 abelian
///   tensor-hilbert      Tensor(H, ..., H) over one-dimensional abelian factors
///   inverse-cross, flag-model, riesz (component)
///   random-dyadic       seed, window [lo, hi], family, moment_order
///   random-dyadic-flag  as above in flag mode
///   dyadic-perturbation delta + amplitude * D / ||Op(D)|| for a random
///                       dyadic D (amplitude 0.1 by default), held on the
///                       kernel grid
///   file                path to a kernel file
/// `grid` is the function grid; `seed` is used when the kernel object has no seed.
KernelRep load_kernel(const nlohmann::json& spec, const ProductGroup& group, const GridSpec& grid, std::uint64_t seed,
                      const std::string& where = "/kernel");

std::vector<std::string> kernel_preset_names();

/// Kernel id used in reports and CSV rows.
std::string kernel_id(const nlohmann::json& spec);

}  // namespace nilconv
