#include "ctrw/aig.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "ctrw/errors.hpp"

namespace ctrw {

Aig::Aig(int num_inputs) : num_inputs_(num_inputs), refs_(1 + num_inputs, 0) {
  if (num_inputs < 0) throw DomainError("negative input count");
}

Literal Aig::add_and(Literal a, Literal b) {
  NodeId n = static_cast<NodeId>(num_nodes());
  if (a.node() >= n || b.node() >= n)
    throw DomainError("AND fanin references a node that does not exist yet");
  ands_.push_back({a, b});
  refs_.push_back(0);
  ++refs_[a.node()];
  ++refs_[b.node()];
  return Literal(n, false);
}

void Aig::add_output(Literal l) {
  if (l.node() >= num_nodes()) throw DomainError("output references a missing node");
  outputs_.push_back(l);
  ++refs_[l.node()];
}

void Aig::set_fanin(NodeId n, int which, Literal l) {
  if (!is_and(n)) throw DomainError("set_fanin on a non-AND node");
  if (l.node() >= num_nodes()) throw DomainError("fanin references a missing node");
  And& g = ands_[n - 1 - num_inputs_];
  Literal& slot = which == 0 ? g.lit0 : g.lit1;
  --refs_[slot.node()];
  slot = l;
  ++refs_[l.node()];
}

void Aig::set_output(std::size_t i, Literal l) {
  if (l.node() >= num_nodes()) throw DomainError("output references a missing node");
  --refs_[outputs_[i].node()];
  outputs_[i] = l;
  ++refs_[l.node()];
}

void Aig::recompute_refcounts() {
  refs_.assign(num_nodes(), 0);
  for (const auto& g : ands_) {
    ++refs_[g.lit0.node()];
    ++refs_[g.lit1.node()];
  }
  for (auto o : outputs_) ++refs_[o.node()];
}

std::size_t Aig::live_ands() const {
  std::vector<char> seen(num_nodes(), 0);
  std::vector<NodeId> stack;
  for (auto o : outputs_) stack.push_back(o.node());
  std::size_t count = 0;
  while (!stack.empty()) {
    NodeId n = stack.back();
    stack.pop_back();
    if (seen[n] || !is_and(n)) continue;
    seen[n] = 1;
    ++count;
    stack.push_back(gate(n).lit0.node());
    stack.push_back(gate(n).lit1.node());
  }
  return count;
}

void Aig::check() const {
  for (std::size_t i = 0; i < ands_.size(); ++i) {
    NodeId n = and_node(i);
    if (ands_[i].lit0.node() >= n || ands_[i].lit1.node() >= n)
      throw StructureError("AND " + std::to_string(n) + " is not in topological order");
  }
  for (auto o : outputs_)
    if (o.node() >= num_nodes()) throw StructureError("dangling output literal");
}

namespace {

// Post-order DFS over ANDs reachable from `roots`; cycle -> StructureError.
std::vector<NodeId> post_order(const Aig& aig, std::span<const NodeId> roots) {
  std::vector<uint8_t> state(aig.num_nodes(), 0);  // 0 new, 1 open, 2 done
  std::vector<NodeId> order;
  std::vector<std::pair<NodeId, int>> stack;
  for (NodeId r : roots) {
    if (!aig.is_and(r) || state[r]) continue;
    stack.push_back({r, 0});
    state[r] = 1;
    while (!stack.empty()) {
      auto& [n, next] = stack.back();
      if (next < 2) {
        const auto& g = aig.gate(n);
        NodeId f = (next == 0 ? g.lit0 : g.lit1).node();
        ++next;
        if (!aig.is_and(f)) continue;
        if (state[f] == 1) throw StructureError("combinational cycle through node " + std::to_string(f));
        if (state[f] == 0) {
          state[f] = 1;
          stack.push_back({f, 0});
        }
      } else {
        state[n] = 2;
        order.push_back(n);
        stack.pop_back();
      }
    }
  }
  return order;
}

bool is_stored_topologically(const Aig& aig) {
  for (std::size_t i = 0; i < aig.num_ands(); ++i) {
    NodeId n = aig.and_node(i);
    const auto& g = aig.ands()[i];
    if (g.lit0.node() >= n || g.lit1.node() >= n) return false;
  }
  return true;
}

}  // namespace

std::vector<NodeId> topological_ands(const Aig& aig) {
  std::vector<NodeId> all(aig.num_ands());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = aig.and_node(i);
  if (is_stored_topologically(aig)) return all;
  return post_order(aig, all);
}

Aig Aig::compacted(std::vector<NodeId>* node_map) const {
  std::vector<NodeId> roots;
  for (auto o : outputs_) roots.push_back(o.node());
  auto order = post_order(*this, roots);
  // Keep the original relative order where it is already topological so
  // compaction of a clean graph is the identity.
  if (is_stored_topologically(*this)) std::sort(order.begin(), order.end());
  std::vector<Literal> map(num_nodes());
  for (int i = 0; i <= num_inputs_; ++i) map[i] = Literal(static_cast<NodeId>(i), false);
  Aig out(num_inputs_);
  auto remap = [&](Literal l) { return map[l.node()] ^ l.complemented(); };
  for (NodeId n : order) map[n] = out.add_and(remap(gate(n).lit0), remap(gate(n).lit1));
  for (auto o : outputs_) out.add_output(remap(o));
  if (node_map) {
    node_map->assign(num_nodes(), kNoNode);
    for (int i = 0; i <= num_inputs_; ++i) (*node_map)[i] = static_cast<NodeId>(i);
    for (NodeId n : order) (*node_map)[n] = map[n].node();
  }
  return out;
}

// ------------------------------------------------------------------ AIGER

namespace {

struct LineReader {
  std::string_view text;
  std::size_t pos = 0;
  int line_no = 0;

  bool next(std::string_view& line) {
    if (pos >= text.size()) return false;
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = end + 1;
    ++line_no;
    return true;
  }
};

std::vector<uint64_t> parse_uints(std::string_view line, int line_no) {
  std::vector<uint64_t> v;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (i >= line.size()) break;
    uint64_t x = 0;
    auto [p, ec] = std::from_chars(line.data() + i, line.data() + line.size(), x);
    if (ec != std::errc() || (p != line.data() + line.size() && *p != ' ' && *p != '\t'))
      throw ParseError(line_no, "expected unsigned integers, got '" + std::string(line) + "'");
    i = p - line.data();
    v.push_back(x);
  }
  return v;
}

}  // namespace

Aig parse_aiger(std::string_view text) {
  LineReader rd{text};
  std::string_view line;
  if (!rd.next(line)) throw ParseError(1, "empty document");
  if (line.substr(0, 4) != "aag ") throw ParseError(1, "header must start with 'aag'");
  auto hdr = parse_uints(line.substr(4), 1);
  if (hdr.size() < 5) throw ParseError(1, "header needs M I L O A");
  uint64_t M = hdr[0], I = hdr[1], L = hdr[2], O = hdr[3], A = hdr[4];
  if (L != 0) throw ParseError(1, "latches are not supported (L = " + std::to_string(L) + ")");
  if (M < I + A) throw ParseError(1, "M is smaller than I + A");
  if (I > 1u << 20 || A > 1u << 26) throw ParseError(1, "circuit too large");

  // AIGER variable -> definition line
  std::vector<int64_t> input_slot(M + 1, -1);
  std::vector<int64_t> and_slot(M + 1, -1);
  std::vector<uint64_t> in_vars;
  std::vector<uint64_t> out_lits;
  struct RawAnd {
    uint64_t lhs, r0, r1;
    int line;
  };
  std::vector<RawAnd> raw;

  auto need = [&](const char* what) {
    if (!rd.next(line)) throw ParseError(rd.line_no + 1, std::string("missing ") + what + " line");
  };
  for (uint64_t i = 0; i < I; ++i) {
    need("input");
    auto v = parse_uints(line, rd.line_no);
    if (v.size() != 1 || v[0] < 2 || (v[0] & 1) || (v[0] >> 1) > M)
      throw ParseError(rd.line_no, "bad input literal");
    uint64_t var = v[0] >> 1;
    if (input_slot[var] >= 0) throw ParseError(rd.line_no, "input variable defined twice");
    input_slot[var] = static_cast<int64_t>(i);
    in_vars.push_back(var);
  }
  for (uint64_t i = 0; i < O; ++i) {
    need("output");
    auto v = parse_uints(line, rd.line_no);
    if (v.size() != 1 || (v[0] >> 1) > M) throw ParseError(rd.line_no, "bad output literal");
    out_lits.push_back(v[0]);
  }
  for (uint64_t i = 0; i < A; ++i) {
    need("AND");
    auto v = parse_uints(line, rd.line_no);
    if (v.size() != 3 || v[0] < 2 || (v[0] & 1)) throw ParseError(rd.line_no, "bad AND line");
    uint64_t var = v[0] >> 1;
    if (var > M) throw ParseError(rd.line_no, "AND variable exceeds M");
    if (input_slot[var] >= 0 || and_slot[var] >= 0)
      throw ParseError(rd.line_no, "variable defined twice");
    if ((v[1] >> 1) > M || (v[2] >> 1) > M) throw ParseError(rd.line_no, "dangling literal index");
    and_slot[var] = static_cast<int64_t>(i);
    raw.push_back({var, v[1], v[2], rd.line_no});
  }
  // Symbol table and comments are ignored.

  auto defined = [&](uint64_t lit) {
    uint64_t var = lit >> 1;
    return var == 0 || input_slot[var] >= 0 || and_slot[var] >= 0;
  };
  for (const auto& r : raw)
    if (!defined(r.r0) || !defined(r.r1)) throw ParseError(r.line, "dangling literal index");
  for (uint64_t i = 0; i < O; ++i)
    if (!defined(out_lits[i]))
      throw ParseError(static_cast<int>(2 + I + i), "dangling literal index");

  Aig aig(static_cast<int>(I));
  std::vector<Literal> map(M + 1);
  std::vector<uint8_t> done(M + 1, 0);
  for (uint64_t i = 0; i < I; ++i) {
    map[in_vars[i]] = Literal(static_cast<NodeId>(i + 1), false);
    done[in_vars[i]] = 2;
  }
  done[0] = 2;
  auto lit_of = [&](uint64_t l) { return map[l >> 1] ^ static_cast<bool>(l & 1); };

  // ANDs may be listed in any order; emit them depth-first.
  for (const auto& start : raw) {
    if (done[start.lhs]) continue;
    std::vector<std::pair<uint64_t, int>> stack{{start.lhs, 0}};
    done[start.lhs] = 1;
    while (!stack.empty()) {
      auto& [var, next] = stack.back();
      const RawAnd& r = raw[and_slot[var]];
      if (next < 2) {
        uint64_t f = (next == 0 ? r.r0 : r.r1) >> 1;
        ++next;
        if (done[f] == 1) throw ParseError(r.line, "combinational cycle");
        if (done[f] == 0) {
          done[f] = 1;
          stack.push_back({f, 0});
        }
      } else {
        map[var] = aig.add_and(lit_of(r.r0), lit_of(r.r1));
        done[var] = 2;
        stack.pop_back();
      }
    }
  }
  for (auto o : out_lits) aig.add_output(lit_of(o));
  return aig;
}

std::string write_aiger(const Aig& aig) {
  std::ostringstream os;
  std::size_t I = aig.num_inputs(), A = aig.num_ands();
  os << "aag " << I + A << ' ' << I << " 0 " << aig.num_outputs() << ' ' << A << '\n';
  for (std::size_t i = 1; i <= I; ++i) os << 2 * i << '\n';
  for (auto o : aig.outputs()) os << o.code() << '\n';
  for (std::size_t i = 0; i < A; ++i) {
    const auto& g = aig.ands()[i];
    os << aig.and_node(i) * 2 << ' ' << g.lit0.code() << ' ' << g.lit1.code() << '\n';
  }
  return os.str();
}

// ------------------------------------------------------------- simulation

namespace {

void check_sim_capacity(const Aig& aig) {
  if (aig.num_inputs() > kMaxVars)
    throw CapacityError("simulation supports at most 16 inputs, got " +
                        std::to_string(aig.num_inputs()));
}

std::vector<TruthTable> leaf_tables(const Aig& aig) {
  std::vector<TruthTable> t;
  t.reserve(aig.num_nodes());
  int k = aig.num_inputs();
  t.emplace_back(k);
  for (int i = 1; i <= k; ++i) t.push_back(TruthTable::nth_var(k, i));
  t.resize(aig.num_nodes(), TruthTable(k));
  return t;
}

}  // namespace

std::vector<TruthTable> simulate_all_serial(const Aig& aig) {
  check_sim_capacity(aig);
  auto order = topological_ands(aig);
  auto t = leaf_tables(aig);
  for (NodeId n : order) {
    const auto& g = aig.gate(n);
    t[n] = literal_table(t, g.lit0) & literal_table(t, g.lit1);
  }
  return t;
}

std::vector<TruthTable> simulate_all(const Aig& aig) {
  check_sim_capacity(aig);
  auto order = topological_ands(aig);
  auto t = leaf_tables(aig);
  std::size_t words = t[0].num_words();
  if (words == 1) {
    uint64_t mask = t[0].tail_mask();
    for (NodeId n : order) {
      const auto& g = aig.gate(n);
      uint64_t a = t[g.lit0.node()].words()[0] ^ (g.lit0.complemented() ? ~uint64_t{0} : 0);
      uint64_t b = t[g.lit1.node()].words()[0] ^ (g.lit1.complemented() ? ~uint64_t{0} : 0);
      t[n].words()[0] = a & b & mask;
    }
    return t;
  }
  std::vector<uint64_t*> data(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) data[i] = t[i].words().data();
  struct Step {
    NodeId out, in0, in1;
    uint64_t c0, c1;
  };
  std::vector<Step> steps;
  steps.reserve(order.size());
  for (NodeId n : order) {
    const auto& g = aig.gate(n);
    steps.push_back({n, g.lit0.node(), g.lit1.node(),
                     g.lit0.complemented() ? ~uint64_t{0} : 0,
                     g.lit1.complemented() ? ~uint64_t{0} : 0});
  }
  constexpr std::size_t kChunk = 16;
  const long chunks = static_cast<long>((words + kChunk - 1) / kChunk);
#pragma omp parallel for schedule(static)
  for (long c = 0; c < chunks; ++c) {
    std::size_t lo = static_cast<std::size_t>(c) * kChunk;
    std::size_t hi = std::min(words, lo + kChunk);
    for (const auto& s : steps) {
      const uint64_t* a = data[s.in0];
      const uint64_t* b = data[s.in1];
      uint64_t* o = data[s.out];
      for (std::size_t w = lo; w < hi; ++w) o[w] = (a[w] ^ s.c0) & (b[w] ^ s.c1);
    }
  }
  return t;
}

std::vector<TruthTable> output_tables(const Aig& aig, std::span<const TruthTable> node_tables) {
  std::vector<TruthTable> out;
  out.reserve(aig.num_outputs());
  for (auto o : aig.outputs()) out.push_back(literal_table(node_tables, o));
  return out;
}

std::vector<TruthTable> output_tables(const Aig& aig) {
  auto t = simulate_all(aig);
  return output_tables(aig, t);
}

bool cec(const Aig& a, const Aig& b, CecCounterexample* cex) {
  if (a.num_inputs() != b.num_inputs() || a.num_outputs() != b.num_outputs())
    throw DomainError("cec: arity mismatch (" + std::to_string(a.num_inputs()) + "/" +
                      std::to_string(a.num_outputs()) + " vs " +
                      std::to_string(b.num_inputs()) + "/" + std::to_string(b.num_outputs()) + ")");
  auto ta = output_tables(a);
  auto tb = output_tables(b);
  for (std::size_t i = 0; i < ta.size(); ++i) {
    if (ta[i] == tb[i]) continue;
    if (cex) {
      TruthTable diff = ta[i] ^ tb[i];
      std::size_t p = 0;
      while (!diff.get(p)) ++p;
      *cex = {i, p};
    }
    return false;
  }
  return true;
}

bool cec(const Aig& a, const Aig& b) { return cec(a, b, nullptr); }

// ------------------------------------------------------------ references

int dereference_counts(const Aig& aig, std::vector<int>& refs, NodeId root,
                       std::vector<NodeId>* freed) {
  if (!aig.is_and(root))
    throw DomainError("dereference: node " + std::to_string(root) + " is not an AND");
  int count = 0;
  std::vector<NodeId> stack{root};
  while (!stack.empty()) {
    NodeId n = stack.back();
    stack.pop_back();
    ++count;
    if (freed) freed->push_back(n);
    const auto& g = aig.gate(n);
    for (Literal f : {g.lit0, g.lit1}) {
      NodeId m = f.node();
      if (--refs[m] == 0 && aig.is_and(m)) stack.push_back(m);
    }
  }
  return count;
}

int dereference(Aig& aig, NodeId root, bool mock) {
  auto& refs = aig.mutable_refcounts();
  if (!mock) return dereference_counts(aig, refs, root);
  std::vector<NodeId> freed;
  int count = dereference_counts(aig, refs, root, &freed);
  for (NodeId n : freed) {
    const auto& g = aig.gate(n);
    ++refs[g.lit0.node()];
    ++refs[g.lit1.node()];
  }
  return count;
}

bool detect_cycle(const Aig& aig) {
  std::vector<NodeId> all(aig.num_ands());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = aig.and_node(i);
  try {
    post_order(aig, all);
  } catch (const StructureError&) {
    return true;
  }
  return false;
}

std::vector<std::vector<NodeId>> fanouts(const Aig& aig) {
  std::vector<std::vector<NodeId>> fo(aig.num_nodes());
  for (std::size_t i = 0; i < aig.num_ands(); ++i) {
    NodeId n = aig.and_node(i);
    const auto& g = aig.ands()[i];
    fo[g.lit0.node()].push_back(n);
    if (g.lit1.node() != g.lit0.node()) fo[g.lit1.node()].push_back(n);
  }
  return fo;
}

}  // namespace ctrw
