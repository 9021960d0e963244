#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "ctrw/aig.hpp"
#include "ctrw/requirement.hpp"

namespace ctrw {

inline constexpr int kOracleMaxVars = 4;
inline constexpr int kOracleMaxBound = 7;

struct OracleOptions {
  bool allow_constants = false;
  bool parallel = true;
};

struct OracleResult {
  int min_ands = 0;
  Aig witness;
  uint64_t explored = 0;
};

/// Smallest AND chain meeting every requirement, searching chain lengths
/// 0..bound. Fanins are signed inputs or signed earlier steps. Returns
/// nullopt when the bound is exceeded.
std::optional<OracleResult> exact_min_ands(std::span<const Requirement> requirements, int bound,
                                           const OracleOptions& opts = {});

}  // namespace ctrw
