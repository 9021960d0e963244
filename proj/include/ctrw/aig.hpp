#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ctrw/truth_table.hpp"

namespace ctrw {

using NodeId = uint32_t;

/// Signed reference to a node. Packed like an AIGER literal (2*node + sign).
inline constexpr NodeId kNoNode = ~NodeId{0};

class Literal {
 public:
  constexpr Literal() = default;
  constexpr Literal(NodeId node, bool complemented)
      : code_(node * 2 + (complemented ? 1u : 0u)) {}

  static constexpr Literal from_code(uint32_t code) {
    Literal l;
    l.code_ = code;
    return l;
  }
  static constexpr Literal const0() { return Literal(0, false); }

  constexpr NodeId node() const { return code_ >> 1; }
  constexpr bool complemented() const { return code_ & 1u; }
  constexpr uint32_t code() const { return code_; }

  constexpr Literal operator!() const { return from_code(code_ ^ 1u); }
  constexpr Literal operator^(bool c) const { return from_code(code_ ^ (c ? 1u : 0u)); }
  constexpr auto operator<=>(const Literal&) const = default;

 private:
  uint32_t code_ = 0;
};

/// And-Inverter Graph. Node 0 is constant false, nodes 1..K are primary
/// inputs and nodes K+1.. are AND gates in storage order. Storage order is
/// topological except transiently while a rewrite splices a window in.
class Aig {
 public:
  struct And {
    Literal lit0;
    Literal lit1;
    bool operator==(const And&) const = default;
  };

  Aig() = default;
  explicit Aig(int num_inputs);

  int num_inputs() const { return num_inputs_; }
  std::size_t num_ands() const { return ands_.size(); }
  std::size_t num_nodes() const { return 1 + num_inputs_ + ands_.size(); }
  std::size_t num_outputs() const { return outputs_.size(); }

  bool is_const(NodeId n) const { return n == 0; }
  bool is_input(NodeId n) const { return n >= 1 && n <= static_cast<NodeId>(num_inputs_); }
  bool is_and(NodeId n) const { return n > static_cast<NodeId>(num_inputs_) && n < num_nodes(); }

  NodeId and_node(std::size_t i) const { return static_cast<NodeId>(1 + num_inputs_ + i); }
  Literal input(int i) const { return Literal(static_cast<NodeId>(i), false); }  // 1-based

  const And& gate(NodeId n) const { return ands_[n - 1 - num_inputs_]; }
  std::span<const And> ands() const { return ands_; }
  std::span<const Literal> outputs() const { return outputs_; }
  Literal output(std::size_t i) const { return outputs_[i]; }

  Literal add_and(Literal a, Literal b);
  void add_output(Literal l);

  /// Rewires one fanin of AND `n`; which = 0 or 1.
  void set_fanin(NodeId n, int which, Literal l);
  void set_output(std::size_t i, Literal l);

  int refcount(NodeId n) const { return refs_[n]; }
  std::span<const int> refcounts() const { return refs_; }
  std::vector<int>& mutable_refcounts() { return refs_; }
  void recompute_refcounts();

  /// Number of AND nodes reachable from the outputs.
  std::size_t live_ands() const;

  /// Drops unreachable ANDs and renumbers into topological storage order.
  /// Throws StructureError on a cycle. `node_map` receives the new id of
  /// every old node, kNoNode for dropped ones.
  Aig compacted(std::vector<NodeId>* node_map = nullptr) const;

  /// Validates literal ranges and topological storage.
  void check() const;

  bool operator==(const Aig& o) const {
    return num_inputs_ == o.num_inputs_ && ands_ == o.ands_ && outputs_ == o.outputs_;
  }

 private:
  int num_inputs_ = 0;
  std::vector<And> ands_;
  std::vector<Literal> outputs_;
  std::vector<int> refs_{0};
};

// ---------------------------------------------------------------- file I/O

Aig parse_aiger(std::string_view text);
std::string write_aiger(const Aig& aig);

// -------------------------------------------------------------- simulation

/// Per-node global truth tables (index = node id). Uses OpenMP over pattern
/// words when the table spans more than one word.
std::vector<TruthTable> simulate_all(const Aig& aig);

/// Single-threaded reference used to check the parallel kernel.
std::vector<TruthTable> simulate_all_serial(const Aig& aig);

/// Truth table of each output literal.
std::vector<TruthTable> output_tables(const Aig& aig);
std::vector<TruthTable> output_tables(const Aig& aig, std::span<const TruthTable> node_tables);

inline TruthTable literal_table(std::span<const TruthTable> tables, Literal l) {
  return tables[l.node()].flip_if(l.complemented());
}

/// Topological order of the AND nodes; throws StructureError on a cycle.
std::vector<NodeId> topological_ands(const Aig& aig);

// ------------------------------------------------------------- equivalence

bool cec(const Aig& a, const Aig& b);

/// First input pattern where some output differs, or nullopt-like -1.
struct CecCounterexample {
  std::size_t output;
  std::size_t pattern;
};
bool cec(const Aig& a, const Aig& b, CecCounterexample* cex);

// ----------------------------------------------------------- ref counting

/// Releases `root` and recursively every fanin whose count drops to zero.
/// Returns the number of AND nodes freed, root included. With `mock` the
/// counts are restored before returning.
int dereference(Aig& aig, NodeId root, bool mock);

/// Same walk on an external count vector; freed nodes are appended to `freed`.
int dereference_counts(const Aig& aig, std::vector<int>& refs, NodeId root,
                       std::vector<NodeId>* freed = nullptr);

bool detect_cycle(const Aig& aig);

/// Per-node fanout lists (AND fanouts only).
std::vector<std::vector<NodeId>> fanouts(const Aig& aig);

}  // namespace ctrw
