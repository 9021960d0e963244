#pragma once

#include <string>
#include <vector>

#include "ctrw/aig.hpp"
#include "ctrw/requirement.hpp"

namespace ctrw {

/// Fanout-free window: every internal node's fanins lie in internal ∪ inputs,
/// and every internal node that is not an output fans out only internally.
struct Window {
  std::vector<NodeId> inputs;    // ordered; window variable j+1 <-> inputs[j]
  std::vector<NodeId> internal;  // ascending node ids
  std::vector<NodeId> outputs;   // ascending, subset of internal

  bool operator==(const Window&) const = default;
};

struct WindowLimits {
  int k = 8;              // max inputs
  std::size_t max_len = 200;  // encoded-length filter
  int max_outputs = 4;
};

/// Greedy maximal windows seeded from AND nodes in reverse topological order.
/// Windows in one call never share an internal node.
std::vector<Window> extract_ffws(const Aig& aig, const WindowLimits& limits);

/// Inputs/outputs induced by an internal node set (outputs = nodes referenced
/// from outside the set or by a primary output).
Window make_window(const Aig& aig, std::vector<NodeId> internal);

/// The window as a standalone graph over its own inputs.
Aig window_to_aig(const Aig& aig, const Window& w);

/// Encoded token length of the window's unfolded outputs (saturating).
std::size_t window_encoded_length(const Aig& aig, const Window& w);

/// One requirement per window output over 2^m window patterns; unreachable
/// window valuations are don't cares. `tables` are the global node tables.
std::vector<Requirement> window_requirements(const Aig& aig, const Window& w,
                                             std::span<const TruthTable> tables);
std::vector<Requirement> window_requirements(const Aig& aig, const Window& w);

/// Pattern-by-pattern reference for the parallel kernel above.
std::vector<Requirement> window_requirements_serial(const Aig& aig, const Window& w,
                                                    std::span<const TruthTable> tables);

/// Window dump: AIGER text followed by comment lines naming the boundary.
std::string dump_window(const Aig& aig, const Window& w);

}  // namespace ctrw
