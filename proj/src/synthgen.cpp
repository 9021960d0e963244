#include "ctrw/synthgen.hpp"

#include <algorithm>
#include <functional>
#include <limits>

#include "ctrw/errors.hpp"

namespace ctrw {

// ------------------------------------------------------------------ tokens

int Token::id() const {
  switch (kind) {
    case TokenKind::Pad: return 0;
    case TokenKind::Eos: return 1;
    case TokenKind::And: return complemented ? 3 : 2;
    case TokenKind::Pi: return 4 + 2 * (index - 1) + (complemented ? 1 : 0);
  }
  return 0;
}

Token Token::from_id(int id, int num_vars) {
  if (id < 0 || id >= vocabulary_size(num_vars))
    throw DomainError("token id " + std::to_string(id) + " outside the vocabulary");
  if (id == 0) return pad();
  if (id == 1) return eos();
  if (id < 4) return and_gate(id == 3);
  return pi((id - 4) / 2 + 1, (id - 4) % 2 == 1);
}

std::string Token::str() const {
  switch (kind) {
    case TokenKind::Pad: return "PAD";
    case TokenKind::Eos: return "EOS";
    case TokenKind::And: return complemented ? "AND'" : "AND";
    case TokenKind::Pi: return (complemented ? "!x" : "x") + std::to_string(index);
  }
  return "?";
}

// ------------------------------------------------------------------ state

GenState::GenState(std::vector<Requirement> requirements, const SynthContext* context,
                   const GenOptions& opts)
    : requirements_(std::move(requirements)), context_(context), opts_(opts) {
  if (requirements_.empty()) throw DomainError("generation needs at least one requirement");
  num_vars_ = requirements_[0].num_vars();
  for (const auto& r : requirements_)
    if (r.num_vars() != num_vars_ || r.val.num_vars() != num_vars_)
      throw DomainError("requirements disagree on the variable count");
  if (num_vars_ < 1) throw DomainError("generation needs at least one variable");
  if (vocabulary_size(num_vars_) > 64) throw CapacityError("vocabulary exceeds the token mask");
  if (opts_.budget < 1) throw DomainError("token budget must be at least 1");

  for (int i = 1; i <= num_vars_; ++i) {
    var_tables_.push_back(TruthTable::nth_var(num_vars_, i));
    var_tables_.push_back(~var_tables_.back());
  }
  merge_mask_ = TruthTable(num_vars_);
  for (const auto& r : requirements_) merge_mask_ |= r.care;

  for (int i = 1; i <= num_vars_; ++i)
    node_table_.emplace(key_of(input_table(i, false)), Ref{Ref::Input, static_cast<uint32_t>(i), false});
  if (context_) {
    if (context_->nodes.size() != context_->tables.size())
      throw DomainError("context nodes and tables differ in length");
    for (std::size_t j = 0; j < context_->tables.size(); ++j) {
      if (context_->tables[j].num_vars() != num_vars_)
        throw DomainError("context table has the wrong variable count");
      context_table_.emplace(key_of(context_->tables[j]),
                             Ref{Ref::Context, static_cast<uint32_t>(j), false});
    }
  }
  outputs_.resize(requirements_.size());
  output_tables_.resize(requirements_.size());
  push_output(0);
}

GenState new_state(std::vector<Requirement> requirements, const SynthContext* context,
                   const GenOptions& opts) {
  return GenState(std::move(requirements), context, opts);
}

void GenState::push_output(std::size_t i) {
  const auto& r = requirements_[i];
  stack_.push_back({Slot{-1, static_cast<int>(i)}, r.care, r.val, 0, false});
  ++outputs_started_;
}

TokenMask GenState::valid_tokens() const {
  if (terminal_) return 0;
  if (stack_.empty()) return outputs_done_ == requirements_.size() ? TokenMask{1} << 1 : 0;
  const Obligation& top = stack_.back();
  TokenMask mask = 0;
  std::size_t min_completion = stack_.size() + (requirements_.size() - outputs_started_) + 1;
  std::size_t remaining = remaining_budget();
  if (remaining >= min_completion) {
    for (int i = 1; i <= num_vars_; ++i)
      for (int c = 0; c < 2; ++c)
        if (matches_on(input_table(i, c), top.care, top.val))
          mask |= TokenMask{1} << Token::pi(i, c).id();
  }
  if (top.depth < opts_.max_depth && remaining >= min_completion + 2)
    mask |= (TokenMask{1} << 2) | (TokenMask{1} << 3);
  return mask;
}

long GenState::apply(Token t) { return apply_impl(t, false); }
long GenState::apply_forced(Token t) { return apply_impl(t, true); }

long GenState::apply_impl(Token t, bool forced) {
  if (terminal_) throw ContractViolation("token applied to a terminal state");
  if (!forced) {
    if (t.kind == TokenKind::Pi && (t.index < 1 || t.index > num_vars_))
      throw ContractViolation("input token out of range: " + t.str());
    if (!mask_has(valid_tokens(), t.id()))
      throw ContractViolation("invalid token " + t.str());
  }
  last_delta_ = 0;
  long base = 0;
  switch (t.kind) {
    case TokenKind::Pad:
      throw ContractViolation("PAD is never valid during generation");
    case TokenKind::Eos:
      if (!stack_.empty() || outputs_done_ != requirements_.size())
        throw ContractViolation("EOS before every output is finished");
      terminal_ = true;
      break;
    case TokenKind::And: {
      if (stack_.empty()) throw ContractViolation("AND with no open obligation");
      Obligation ob = std::move(stack_.back());
      stack_.pop_back();
      int id = static_cast<int>(built_.size());
      BuiltNode node;
      node.parent = ob.slot;
      node.out_complemented = t.complemented;
      node.refs = 1;
      node.req1 = t.complemented ? (ob.care & ~ob.val) : ob.val;
      node.req0 = ob.care & ~node.req1;
      built_.push_back(std::move(node));
      bind(ob.slot, Ref{Ref::Built, static_cast<uint32_t>(id), t.complemented});
      ++alive_;
      const BuiltNode& n = built_.back();
      stack_.push_back({Slot{id, 1}, TruthTable(num_vars_), TruthTable(num_vars_), ob.depth + 1, true});
      stack_.push_back({Slot{id, 0}, n.req1, n.req1, ob.depth + 1, false});
      base = -1;
      break;
    }
    case TokenKind::Pi: {
      if (stack_.empty()) throw ContractViolation("input token with no open obligation");
      if (t.index < 1 || t.index > num_vars_)
        throw ContractViolation("input token out of range: " + t.str());
      Obligation ob = std::move(stack_.back());
      if (ob.deferred) throw ContractViolation("obligation not materialized");
      if (!matches_on(input_table(t.index, t.complemented), ob.care, ob.val))
        throw ContractViolation("input token " + t.str() + " violates the obligation");
      stack_.pop_back();
      bind(ob.slot, Ref{Ref::Input, static_cast<uint32_t>(t.index), t.complemented});
      finish_slot(ob.slot, input_table(t.index, t.complemented));
      break;
    }
  }
  tokens_.push_back(t);
  if (tokens_.size() > opts_.budget) over_budget_ = true;
  last_reward_ = base + last_delta_;
  cum_reward_ += last_reward_;
  return last_reward_;
}

void GenState::bind(Slot s, Ref r) {
  if (s.node < 0)
    outputs_[s.index] = r;
  else
    built_[s.node].fanin[s.index] = r;
}

std::optional<GenState::Ref> GenState::find_equivalent(const TruthTable& raw, int self) const {
  auto probe = [&](const std::unordered_map<TruthTable, Ref, TruthTableHash>& table)
      -> std::optional<Ref> {
    if (auto it = table.find(key_of(raw)); it != table.end()) {
      if (!(it->second.kind == Ref::Built && static_cast<int>(it->second.index) == self))
        return it->second;
    }
    if (opts_.merge_complements) {
      if (auto it = table.find(key_of(~raw)); it != table.end()) {
        if (!(it->second.kind == Ref::Built && static_cast<int>(it->second.index) == self))
          return it->second ^ true;
      }
    }
    return std::nullopt;
  };
  if (auto r = probe(node_table_)) return r;
  if (context_) return probe(context_table_);
  return std::nullopt;
}

void GenState::register_node(int id) {
  node_table_.emplace(key_of(built_[id].table), Ref{Ref::Built, static_cast<uint32_t>(id), false});
}

int GenState::free_node(int id) {
  int count = 0;
  std::vector<int> stack{id};
  built_[id].refs = 0;
  while (!stack.empty()) {
    int n = stack.back();
    stack.pop_back();
    BuiltNode& node = built_[n];
    node.alive = false;
    --alive_;
    ++count;
    if (node.determined) {
      auto it = node_table_.find(key_of(node.table));
      if (it != node_table_.end() && it->second.kind == Ref::Built &&
          static_cast<int>(it->second.index) == n)
        node_table_.erase(it);
    }
    for (const Ref& f : node.fanin) {
      if (f.kind != Ref::Built) continue;
      if (--built_[f.index].refs == 0) stack.push_back(static_cast<int>(f.index));
    }
  }
  return count;
}

void GenState::finish_slot(Slot slot, TruthTable t) {
  for (;;) {
    if (slot.node < 0) {
      output_tables_[slot.index] = std::move(t);
      ++outputs_done_;
      if (outputs_started_ < requirements_.size()) push_output(outputs_started_);
      return;
    }
    int id = slot.node;
    built_[id].child_table[slot.index] = t;
    if (slot.index == 0) {
      Obligation& second = stack_.back();
      if (!second.deferred || second.slot.node != id)
        throw ContractViolation("second-child obligation is not on top of the stack");
      const BuiltNode& n = built_[id];
      second.care = n.req1 | (n.req0 & t);
      second.val = n.req1;
      second.deferred = false;
      return;
    }
    BuiltNode& n = built_[id];
    n.table = n.child_table[0] & n.child_table[1];
    n.determined = true;
    TruthTable out = n.table.flip_if(n.out_complemented);
    Slot parent = n.parent;
    if (auto eq = find_equivalent(n.table, id)) {
      Ref repl = *eq ^ n.out_complemented;
      if (repl.kind == Ref::Built) ++built_[repl.index].refs;
      bind(parent, repl);
      last_delta_ += free_node(id);
    } else {
      register_node(id);
    }
    slot = parent;
    t = std::move(out);
  }
}

bool GenState::pi_would_merge(Token t) const {
  if (t.kind != TokenKind::Pi || stack_.empty()) return false;
  const Obligation& top = stack_.back();
  if (top.slot.node < 0 || top.slot.index != 1) return false;
  const BuiltNode& n = built_[top.slot.node];
  TruthTable raw = n.child_table[0] & input_table(t.index, t.complemented);
  return find_equivalent(raw, top.slot.node).has_value();
}

bool GenState::top_is_output() const { return !stack_.empty() && stack_.back().slot.node < 0; }

TruthTable GenState::and_required_ones(bool c) const {
  if (stack_.empty()) return TruthTable(num_vars_);
  const Obligation& top = stack_.back();
  return c ? (top.care & ~top.val) : top.val;
}

TruthTable GenState::ref_table(Ref r) const {
  switch (r.kind) {
    case Ref::Input: return input_table(static_cast<int>(r.index), r.complemented);
    case Ref::Built: return built_[r.index].table.flip_if(r.complemented);
    case Ref::Context: return context_->tables[r.index].flip_if(r.complemented);
    case Ref::None: break;
  }
  throw ContractViolation("unbound reference");
}

// --------------------------------------------------------------- shannon

namespace {

std::optional<Token> first_literal(const GenState& s, const TruthTable& care, const TruthTable& val) {
  for (int i = 1; i <= s.num_vars(); ++i)
    for (int c = 0; c < 2; ++c)
      if (matches_on(s.input_table(i, c), care, val)) return Token::pi(i, c);
  return std::nullopt;
}

}  // namespace

void shannon_complete(GenState& state) {
  // Drive each obligation with the cofactor recursion. The two literal
  // slots of the expansion are filled explicitly so the split variable is
  // the one bound next to each cofactor.
  std::function<void(TruthTable, TruthTable)> run = [&](TruthTable care, TruthTable val) {
    const auto& top = state.obligations().back();
    if (!(top.care & ~care).is_zero() || !matches_on(val, top.care, top.val)) {
      care = top.care;
      val = top.val;
    }
    if (auto lit = first_literal(state, care, val)) {
      state.apply_forced(*lit);
      return;
    }
    int split = 0;
    for (int i = 1; i <= state.num_vars() && !split; ++i) {
      const TruthTable& x = state.input_table(i, false);
      if (!(care & x).is_zero() && !(care & ~x).is_zero()) split = i;
    }
    if (!split) throw ContractViolation("no literal and no splitting variable");
    TruthTable x = state.input_table(split, false);
    state.apply_forced(Token::and_gate(true));
    state.apply_forced(Token::and_gate(true));
    state.apply_forced(Token::pi(split, false));
    run(care & x, val & x);
    state.apply_forced(Token::and_gate(true));
    state.apply_forced(Token::pi(split, true));
    run(care & ~x, val & ~x);
  };
  while (!state.terminal()) {
    if (state.obligations().empty()) {
      state.apply_forced(Token::eos());
      continue;
    }
    const auto& top = state.obligations().back();
    run(top.care, top.val);
  }
}

// --------------------------------------------------------------- finalize

Aig finalize(const GenState& state, std::vector<NodeId>* bindings) {
  using Ref = GenState::Ref;
  if (!state.terminal()) throw ContractViolation("finalize on a non-terminal state");
  const auto built = state.built();
  const int m = state.num_vars();

  std::vector<int> order;
  std::vector<uint8_t> mark(built.size(), 0);
  std::vector<int> ctx_slot(state.context() ? state.context()->nodes.size() : 0, -1);
  std::vector<uint32_t> ctx_order;
  auto note_ctx = [&](const Ref& r) {
    if (r.kind == Ref::Context && ctx_slot[r.index] < 0) {
      ctx_slot[r.index] = static_cast<int>(ctx_order.size());
      ctx_order.push_back(r.index);
    }
  };
  for (const Ref& o : state.output_refs()) {
    note_ctx(o);
    if (o.kind != Ref::Built) continue;
    std::vector<std::pair<int, int>> stack{{static_cast<int>(o.index), 0}};
    if (mark[o.index]) continue;
    mark[o.index] = 1;
    while (!stack.empty()) {
      auto& [n, next] = stack.back();
      if (next < 2) {
        const Ref& f = built[n].fanin[next++];
        note_ctx(f);
        if (f.kind == Ref::Built && !mark[f.index]) {
          if (!built[f.index].alive) throw ContractViolation("reference to a freed node");
          mark[f.index] = 1;
          stack.push_back({static_cast<int>(f.index), 0});
        }
      } else {
        order.push_back(n);
        stack.pop_back();
      }
    }
  }
  if (order.size() != state.alive_ands() ||
      static_cast<long>(order.size()) != -state.cum_reward())
    throw ContractViolation("reward accounting mismatch: " + std::to_string(order.size()) +
                            " reachable ANDs, cumulative reward " +
                            std::to_string(state.cum_reward()));

  Aig aig(m + static_cast<int>(ctx_order.size()));
  std::vector<Literal> lit_of(built.size());
  std::vector<TruthTable> table_of(built.size());
  auto lit = [&](const Ref& r) -> Literal {
    switch (r.kind) {
      case Ref::Input: return Literal(r.index, r.complemented);
      case Ref::Context: return Literal(static_cast<NodeId>(m + 1 + ctx_slot[r.index]), r.complemented);
      case Ref::Built: return lit_of[r.index] ^ r.complemented;
      case Ref::None: break;
    }
    throw ContractViolation("unbound reference in finished circuit");
  };
  auto table = [&](const Ref& r) -> TruthTable {
    if (r.kind == Ref::Built) return table_of[r.index].flip_if(r.complemented);
    return state.ref_table(r);
  };
  for (int n : order) {
    lit_of[n] = aig.add_and(lit(built[n].fanin[0]), lit(built[n].fanin[1]));
    table_of[n] = table(built[n].fanin[0]) & table(built[n].fanin[1]);
  }
  for (std::size_t o = 0; o < state.output_refs().size(); ++o) {
    const Ref& r = state.output_refs()[o];
    aig.add_output(lit(r));
    if (!state.requirements()[o].satisfied_by(table(r)))
      throw ContractViolation("output " + std::to_string(o) + " violates its requirement");
  }
  if (bindings) {
    bindings->clear();
    for (uint32_t j : ctx_order) bindings->push_back(state.context()->nodes[j]);
  }
  return aig;
}

// --------------------------------------------------------------- encoding

std::size_t encoded_length(const Aig& aig) {
  constexpr std::size_t cap = std::numeric_limits<std::size_t>::max() / 4;
  std::vector<std::size_t> len(aig.num_nodes(), 1);
  for (NodeId n : topological_ands(aig)) {
    const auto& g = aig.gate(n);
    len[n] = std::min(cap, 1 + len[g.lit0.node()] + len[g.lit1.node()]);
  }
  std::size_t total = 1;
  for (auto o : aig.outputs()) {
    if (o.node() == 0) throw DomainError("constant outputs have no token encoding");
    total = std::min(cap, total + len[o.node()]);
  }
  return total;
}

std::vector<Token> encode_aig(const Aig& aig) {
  std::size_t len = encoded_length(aig);
  if (len > (std::size_t{1} << 24)) throw CapacityError("encoding too long");
  if (vocabulary_size(aig.num_inputs()) > 64) throw CapacityError("too many inputs to encode");
  std::vector<Token> out;
  out.reserve(len);
  std::vector<Literal> stack;
  for (auto o : aig.outputs()) {
    stack.push_back(o);
    while (!stack.empty()) {
      Literal l = stack.back();
      stack.pop_back();
      if (aig.is_input(l.node())) {
        out.push_back(Token::pi(static_cast<int>(l.node()), l.complemented()));
      } else if (aig.is_and(l.node())) {
        out.push_back(Token::and_gate(l.complemented()));
        stack.push_back(aig.gate(l.node()).lit1);
        stack.push_back(aig.gate(l.node()).lit0);
      } else {
        throw DomainError("constant fanins have no token encoding");
      }
    }
  }
  out.push_back(Token::eos());
  return out;
}

Aig replay_tokens(std::span<const Token> tokens, const Aig& reference) {
  auto reqs = exact_requirements(output_tables(reference));
  GenOptions opts;
  opts.budget = tokens.size();
  opts.max_depth = std::numeric_limits<int>::max();
  GenState s(std::move(reqs), nullptr, opts);
  for (const Token& t : tokens) s.apply(t);
  return finalize(s);
}

// ---------------------------------------------------------------- context

SynthContext make_context(const Aig& aig, const Window& w) {
  const int m = static_cast<int>(w.inputs.size());
  std::vector<char> excluded(aig.num_nodes(), 0);
  for (NodeId n : w.internal) excluded[n] = 1;

  // transitive fanout of the window outputs
  auto fo = fanouts(aig);
  std::vector<NodeId> stack(w.outputs.begin(), w.outputs.end());
  while (!stack.empty()) {
    NodeId n = stack.back();
    stack.pop_back();
    for (NodeId s : fo[n])
      if (!excluded[s]) {
        excluded[s] = 1;
        stack.push_back(s);
      }
  }
  // nodes freed when every external reference of the window moves away
  std::vector<char> internal(aig.num_nodes(), 0);
  for (NodeId n : w.internal) internal[n] = 1;
  std::vector<int> refs(aig.refcounts().begin(), aig.refcounts().end());
  for (NodeId o : w.outputs) {
    int inside = 0;
    for (NodeId s : fo[o])
      if (internal[s]) {
        const auto& g = aig.gate(s);
        inside += (g.lit0.node() == o) + (g.lit1.node() == o);
      }
    refs[o] = inside;
  }
  std::vector<NodeId> freed;
  for (NodeId o : w.outputs)
    if (refs[o] == 0) dereference_counts(aig, refs, o, &freed);
  for (NodeId n : freed) excluded[n] = 1;

  SynthContext ctx;
  std::vector<TruthTable> table(aig.num_nodes());
  std::vector<char> known(aig.num_nodes(), 0);
  for (int j = 0; j < m; ++j) {
    table[w.inputs[j]] = TruthTable::nth_var(m, j + 1);
    known[w.inputs[j]] = 1;
  }
  for (NodeId n : topological_ands(aig)) {
    if (known[n] || internal[n]) continue;
    const auto& g = aig.gate(n);
    if (!known[g.lit0.node()] || !known[g.lit1.node()]) continue;
    table[n] = table[g.lit0.node()].flip_if(g.lit0.complemented()) &
               table[g.lit1.node()].flip_if(g.lit1.complemented());
    known[n] = 1;
    if (!excluded[n]) {
      ctx.nodes.push_back(n);
      ctx.tables.push_back(table[n]);
    }
  }
  return ctx;
}

}  // namespace ctrw
