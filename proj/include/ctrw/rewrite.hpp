#pragma once

#include <span>
#include <vector>

#include "ctrw/aig.hpp"
#include "ctrw/mcts.hpp"
#include "ctrw/policy.hpp"
#include "ctrw/window.hpp"

namespace ctrw {

struct RewriteConfig {
  int k = 8;
  std::size_t max_len = 200;
  SearchConfig search;
  bool accept_zero_gain = false;
  int max_passes = 4;

  void validate() const;
};

struct WindowRecord {
  int pass = 0;
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  std::size_t internal = 0;
  long gain = 0;
  bool accepted = false;
  bool cycle_reverted = false;
  bool synthesis_failed = false;
  double seconds = 0;
};

struct RewriteStats {
  std::size_t initial_size = 0;
  std::size_t final_size = 0;
  double improvement = 0;
  int passes = 0;
  std::vector<WindowRecord> windows;
  double wall_seconds = 0;

  std::size_t accepted() const;
  std::size_t cycle_reverts() const;
};

struct ReplaceResult {
  long gain = 0;
  bool accepted = false;
  bool cycle_reverted = false;
  /// Old node id -> new node id after an accepted splice (kNoNode if dropped).
  std::vector<NodeId> node_map;
};

/// Splices `new_impl` in place of the window. Inputs 1..|w.inputs| of
/// `new_impl` bind to the window inputs in order and any further inputs to
/// `bindings`. The graph changes only when the replacement is accepted; the
/// accepted graph is compacted.
ReplaceResult replace_window(Aig& aig, const Window& w, const Aig& new_impl,
                             std::span<const NodeId> bindings = {},
                             bool accept_zero_gain = false);

/// Rewrites fanout-free windows until a pass accepts nothing or the pass
/// limit is reached. On a failed final check the graph is restored.
RewriteStats ctrw_pass(Aig& aig, const PolicyPrior& prior, const RewriteConfig& cfg);

}  // namespace ctrw
