#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ctrw/aig.hpp"
#include "ctrw/window.hpp"

namespace ctrw {

/// Opaque key shared by every member of an NPNP class (input negation and
/// permutation, output negation and permutation).
using CanonicalKey = std::string;

inline constexpr int kDefaultMaxCanonOutputs = 4;

/// Input permutation/negation plus output negation. New variable j+1 reads
/// old variable perm[j]+1 complemented when bit j of input_neg is set.
struct NpnpTransform {
  std::vector<int> perm;
  uint32_t input_neg = 0;
  uint32_t output_neg = 0;

  static NpnpTransform identity(int num_vars);
};

TruthTable apply_transform(const TruthTable& f, const NpnpTransform& t, bool negate_output);

CanonicalKey canonicalize(std::span<const TruthTable> outputs,
                          int max_outputs = kDefaultMaxCanonOutputs);
CanonicalKey canonicalize(const Aig& aig, int max_outputs = kDefaultMaxCanonOutputs);
CanonicalKey canonicalize(const Aig& aig, const Window& w,
                          int max_outputs = kDefaultMaxCanonOutputs);

Aig npnp_transform(const Aig& aig, const NpnpTransform& t);
Aig npnp_transform(const Aig& aig, std::mt19937_64& rng);

/// Uniform draw in [0, n) that does not depend on the standard library's
/// distribution implementation.
uint64_t uniform_below(std::mt19937_64& rng, uint64_t n);

}  // namespace ctrw
