#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ctrw/aig.hpp"
#include "ctrw/requirement.hpp"
#include "ctrw/window.hpp"

namespace ctrw {

// ------------------------------------------------------------------ tokens

enum class TokenKind : uint8_t { Pad, Eos, And, Pi };

/// Generation token. Stable numbering: 0 PAD, 1 EOS, 2 AND, 3 AND',
/// 4 + 2(i-1) + c for input i with complement c.
struct Token {
  TokenKind kind = TokenKind::Pad;
  int index = 0;  // input ordinal, PI only
  bool complemented = false;

  static Token pad() { return {TokenKind::Pad, 0, false}; }
  static Token eos() { return {TokenKind::Eos, 0, false}; }
  static Token and_gate(bool c) { return {TokenKind::And, 0, c}; }
  static Token pi(int i, bool c) { return {TokenKind::Pi, i, c}; }

  int id() const;
  static Token from_id(int id, int num_vars);
  bool operator==(const Token&) const = default;
  std::string str() const;
};

inline int vocabulary_size(int num_vars) { return 4 + 2 * num_vars; }

/// Bit t set <=> token id t is valid. The vocabulary never exceeds 36 ids.
using TokenMask = uint64_t;

inline bool mask_has(TokenMask m, int id) { return (m >> id) & 1u; }
inline int mask_count(TokenMask m) { return std::popcount(m); }

// ---------------------------------------------------------------- context

/// Existing nodes of the surrounding graph that generated nodes may merge
/// with; tables are expressed over the window's variables.
struct SynthContext {
  std::vector<NodeId> nodes;
  std::vector<TruthTable> tables;
};

/// Nodes outside the window that are functions of its inputs, stay alive
/// once the window is released, and are not in the transitive fanout of the
/// window outputs.
SynthContext make_context(const Aig& aig, const Window& w);

// ------------------------------------------------------------------ state

enum class DeadEndMode : uint8_t { Guaranteed, Strict };

struct GenOptions {
  std::size_t budget = 100;
  int max_depth = 12;
  bool merge_complements = true;
};

class GenState {
 public:
  /// Reference to a signal in the partial circuit.
  struct Ref {
    enum Kind : uint8_t { None, Input, Built, Context };
    Kind kind = None;
    uint32_t index = 0;  // input ordinal (1-based), built id or context slot
    bool complemented = false;

    Ref operator^(bool c) const { return {kind, index, static_cast<bool>(complemented ^ c)}; }
    bool operator==(const Ref&) const = default;
  };

  /// Where a finished signal is consumed: child `index` of built node `node`,
  /// or output `index` when node < 0.
  struct Slot {
    int node = -1;
    int index = 0;
  };

  struct Obligation {
    Slot slot;
    TruthTable care;
    TruthTable val;
    int depth = 0;
    bool deferred = false;  // second child waiting on its sibling
  };

  struct BuiltNode {
    Ref fanin[2];
    TruthTable child_table[2];  // literal tables of finished children
    TruthTable table;           // raw AND table once determined
    TruthTable req1, req0;      // raw must be 1 / 0 on these patterns
    Slot parent;
    bool out_complemented = false;
    bool determined = false;
    bool alive = true;
    int refs = 0;
  };

  GenState(std::vector<Requirement> requirements, const SynthContext* context,
           const GenOptions& opts);

  int num_vars() const { return num_vars_; }
  int vocabulary() const { return vocabulary_size(num_vars_); }
  std::span<const Requirement> requirements() const { return requirements_; }
  std::span<const Token> tokens() const { return tokens_; }
  std::span<const Obligation> obligations() const { return stack_; }
  std::span<const BuiltNode> built() const { return built_; }
  const GenOptions& options() const { return opts_; }

  long cum_reward() const { return cum_reward_; }
  long last_reward() const { return last_reward_; }
  int last_delta() const { return last_delta_; }
  std::size_t alive_ands() const { return alive_; }
  bool terminal() const { return terminal_; }
  bool over_budget() const { return over_budget_; }
  std::size_t remaining_budget() const {
    return tokens_.size() >= opts_.budget ? 0 : opts_.budget - tokens_.size();
  }
  std::size_t outputs_done() const { return outputs_done_; }
  const SynthContext* context() const { return context_; }

  TokenMask valid_tokens() const;

  /// Applies a valid token and returns its immediate reward.
  long apply(Token t);

  /// Applies `t` ignoring budget and depth; the literal check still holds.
  long apply_forced(Token t);

  /// PI token would finish a node that merges immediately.
  bool pi_would_merge(Token t) const;
  /// The top obligation is an output root.
  bool top_is_output() const;
  /// Patterns where the raw AND under AND(c) must be 1 at the top obligation.
  TruthTable and_required_ones(bool c) const;

  /// Literal table of a signed input over the state's variables.
  const TruthTable& input_table(int i, bool c) const { return var_tables_[2 * (i - 1) + (c ? 1 : 0)]; }

  /// Table of a reference as tracked during generation.
  TruthTable ref_table(Ref r) const;

  /// Tables of the finished outputs as tracked during generation.
  std::span<const TruthTable> output_tables() const { return output_tables_; }
  std::span<const Ref> output_refs() const { return outputs_; }

 private:
  friend void shannon_complete(GenState& state);

  long apply_impl(Token t, bool forced);
  void bind(Slot s, Ref r);
  void finish_slot(Slot s, TruthTable t);
  std::optional<Ref> find_equivalent(const TruthTable& raw, int self) const;
  int free_node(int id);
  void push_output(std::size_t i);
  void register_node(int id);
  TruthTable key_of(const TruthTable& t) const { return t & merge_mask_; }

  int num_vars_ = 0;
  std::vector<Requirement> requirements_;
  const SynthContext* context_ = nullptr;
  GenOptions opts_;

  std::vector<TruthTable> var_tables_;
  TruthTable merge_mask_;
  std::vector<Token> tokens_;
  std::vector<Obligation> stack_;
  std::vector<BuiltNode> built_;
  std::vector<Ref> outputs_;
  std::vector<TruthTable> output_tables_;
  std::unordered_map<TruthTable, Ref, TruthTableHash> node_table_;
  std::unordered_map<TruthTable, Ref, TruthTableHash> context_table_;

  std::size_t outputs_done_ = 0;
  std::size_t outputs_started_ = 0;
  std::size_t alive_ = 0;
  long cum_reward_ = 0;
  long last_reward_ = 0;
  int last_delta_ = 0;
  bool terminal_ = false;
  bool over_budget_ = false;
};

GenState new_state(std::vector<Requirement> requirements, const SynthContext* context,
                   const GenOptions& opts = {});

/// Deterministic cofactor completion of every open obligation, then EOS.
void shannon_complete(GenState& state);

/// Built circuit over the state's variables. Context references become extra
/// inputs num_vars+1.. whose graph nodes are returned through `bindings`.
Aig finalize(const GenState& state, std::vector<NodeId>* bindings = nullptr);

// --------------------------------------------------------------- encoding

/// Depth-first pre-order unfolding of every output, then EOS.
std::vector<Token> encode_aig(const Aig& aig);
std::size_t encoded_length(const Aig& aig);

/// Replays a token sequence against the graph's own output tables.
Aig replay_tokens(std::span<const Token> tokens, const Aig& reference);

}  // namespace ctrw
