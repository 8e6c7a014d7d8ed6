#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "nilconv/grid.hpp"
#include "nilconv/kernel.hpp"

namespace nilconv {

/// 64-byte little-endian header: "NCKR", u32 version, u32 nu, u32 q_mu[8],
/// u32 N, f64 T, 8 bytes reserved. The grid is GridSpec::make(group, N, T).
struct KernelFileHeader {
  std::uint32_t version = 1;
  std::uint32_t nu = 0;
  std::uint32_t q[8] = {};
  std::uint32_t n = 0;
  double t = 0.0;
};

/// Writes the header and interleaved re/im binary64 values in row-major
/// order, plus a JSON sidecar `<path>.json` holding the group, the grid
/// and `meta`.
void write_kernel_file(const std::string& path, const GridFunction& f, const nlohmann::json& meta = nullptr);

/// Reads a kernel file. The group comes from `group` when given, else
/// from the sidecar, else all factors are taken abelian.
GridFunction read_kernel_file(const std::string& path, const std::optional<ProductGroup>& group = std::nullopt);

KernelFileHeader read_kernel_header(const std::string& path);

}  // namespace nilconv
