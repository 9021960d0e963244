#pragma once

#include <span>
#include <vector>

#include "ctrw/truth_table.hpp"

namespace ctrw {

/// Partial truth table an output must meet: bits under `care` are fixed to
/// `val`, the rest are don't cares. `val` is kept zero outside `care`.
struct Requirement {
  TruthTable care;
  TruthTable val;

  Requirement() = default;
  Requirement(TruthTable care_, TruthTable val_) : care(std::move(care_)), val(std::move(val_)) {
    val &= care;
  }

  /// Full-care requirement fixing every pattern to `t`.
  static Requirement exactly(const TruthTable& t) {
    return Requirement(TruthTable(t.num_vars(), true), t);
  }

  int num_vars() const { return care.num_vars(); }
  bool satisfied_by(const TruthTable& t) const { return matches_on(t, care, val); }
  bool operator==(const Requirement&) const = default;
};

inline std::vector<Requirement> exact_requirements(std::span<const TruthTable> tables) {
  std::vector<Requirement> r;
  r.reserve(tables.size());
  for (const auto& t : tables) r.push_back(Requirement::exactly(t));
  return r;
}

}  // namespace ctrw
