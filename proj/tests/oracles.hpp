#pragma once
// Independent reference implementations used only by the tests. None of
// these share code paths with the library beyond the plain data types.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "ctrw/aig.hpp"
#include "ctrw/window.hpp"

namespace oracle {

using ctrw::Aig;
using ctrw::Literal;
using ctrw::NodeId;

// Evaluates every node for one input assignment by plain recursion.
inline std::vector<int> eval_pattern(const Aig& g, uint64_t pattern) {
  std::vector<int> val(g.num_nodes(), -1);
  val[0] = 0;
  for (int i = 1; i <= g.num_inputs(); ++i) val[i] = (pattern >> (i - 1)) & 1;
  std::function<int(NodeId)> ev = [&](NodeId n) -> int {
    if (val[n] >= 0) return val[n];
    const auto& a = g.gate(n);
    int x = ev(a.lit0.node()) ^ a.lit0.complemented();
    int y = ev(a.lit1.node()) ^ a.lit1.complemented();
    return val[n] = x & y;
  };
  for (NodeId n = 0; n < g.num_nodes(); ++n) ev(n);
  return val;
}

inline int eval_literal(const std::vector<int>& v, Literal l) { return v[l.node()] ^ l.complemented(); }

// Output bit vectors, one string of '0'/'1' per output, pattern 0 first.
inline std::vector<std::string> output_strings(const Aig& g) {
  std::vector<std::string> out(g.num_outputs());
  for (uint64_t p = 0; p < (uint64_t{1} << g.num_inputs()); ++p) {
    auto v = eval_pattern(g, p);
    for (std::size_t o = 0; o < g.num_outputs(); ++o) out[o] += eval_literal(v, g.output(o)) ? '1' : '0';
  }
  return out;
}

inline bool naive_equivalent(const Aig& a, const Aig& b) {
  return a.num_inputs() == b.num_inputs() && output_strings(a) == output_strings(b);
}

// Cycle test through a transitive-closure matrix.
inline bool has_cycle_matrix(const Aig& g) {
  const std::size_t n = g.num_nodes();
  std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < g.num_ands(); ++i) {
    NodeId v = g.and_node(i);
    reach[v][g.gate(v).lit0.node()] = 1;
    reach[v][g.gate(v).lit1.node()] = 1;
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (reach[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (reach[k][j]) reach[i][j] = 1;
  for (std::size_t i = 0; i < n; ++i)
    if (reach[i][i]) return true;
  return false;
}

// Window rules: every internal node is a live AND; boundary inputs are
// exactly the outside fanins; outputs are exactly the internal nodes with a
// reference from outside (AND or primary output); the window is a fanin
// closed region between inputs and outputs (every internal node reaches
// an output through internal nodes only) and respects the limits.
struct RuleReport {
  bool ok = true;
  std::string why;
};

inline RuleReport check_window_rules(const Aig& g, const ctrw::Window& w, int k, int max_outputs) {
  RuleReport r;
  auto fail = [&](const std::string& s) {
    if (r.ok) r.why = s;
    r.ok = false;
  };
  std::set<NodeId> in(w.internal.begin(), w.internal.end());
  if (in.empty()) fail("empty window");
  std::set<NodeId> inputs, outputs;
  for (NodeId n : in) {
    if (!g.is_and(n)) fail("internal node is not an AND");
    for (Literal f : {g.gate(n).lit0, g.gate(n).lit1})
      if (!in.count(f.node())) inputs.insert(f.node());
  }
  for (std::size_t i = 0; i < g.num_ands(); ++i) {
    NodeId v = g.and_node(i);
    if (in.count(v)) continue;
    for (Literal f : {g.gate(v).lit0, g.gate(v).lit1})
      if (in.count(f.node())) outputs.insert(f.node());
  }
  for (auto o : g.outputs())
    if (in.count(o.node())) outputs.insert(o.node());
  // Rule 2 by direct fanout enumeration
  std::set<NodeId> declared_out(w.outputs.begin(), w.outputs.end());
  for (NodeId v : in) {
    if (declared_out.count(v)) continue;
    for (std::size_t i = 0; i < g.num_ands(); ++i) {
      NodeId u = g.and_node(i);
      if ((g.gate(u).lit0.node() == v || g.gate(u).lit1.node() == v) && !in.count(u))
        fail("non-output node has an outside fanout");
    }
    for (auto o : g.outputs())
      if (o.node() == v) fail("non-output node drives a primary output");
  }
  for (NodeId i : w.inputs)
    if (in.count(i)) fail("input inside the window");
  if (w.outputs.empty()) fail("no outputs");
  if (std::vector<NodeId>(inputs.begin(), inputs.end()) != w.inputs) fail("input set mismatch");
  if (std::vector<NodeId>(outputs.begin(), outputs.end()) != w.outputs) fail("output set mismatch");
  if (static_cast<int>(inputs.size()) > k) fail("too many inputs");
  if (static_cast<int>(outputs.size()) > max_outputs) fail("too many outputs");
  // every internal node drives some window output inside the window
  std::set<NodeId> reaches(outputs.begin(), outputs.end());
  bool grew = true;
  while (grew) {
    grew = false;
    for (NodeId n : in)
      if (reaches.count(n))
        for (Literal f : {g.gate(n).lit0, g.gate(n).lit1})
          if (in.count(f.node()) && reaches.insert(f.node()).second) grew = true;
  }
  if (reaches.size() != in.size()) fail("internal node does not reach a window output");
  return r;
}

// Tables of the window outputs over the window inputs by direct cone
// evaluation on each input valuation that actually occurs globally.
// Returns care/val strings (pattern 0 first) per output; '-' marks unseen.
inline std::vector<std::string> window_care_strings(const Aig& g, const ctrw::Window& w) {
  const std::size_t m = w.inputs.size();
  std::vector<std::string> out(w.outputs.size(), std::string(std::size_t{1} << m, '-'));
  for (uint64_t p = 0; p < (uint64_t{1} << g.num_inputs()); ++p) {
    auto v = eval_pattern(g, p);
    std::size_t local = 0;
    for (std::size_t j = 0; j < m; ++j) local |= static_cast<std::size_t>(v[w.inputs[j]]) << j;
    for (std::size_t o = 0; o < w.outputs.size(); ++o) out[o][local] = v[w.outputs[o]] ? '1' : '0';
  }
  return out;
}

// Brute-force NPNP class representative for small functions: minimum over
// every input permutation, input negation and output negation of the
// sorted output bit strings.
inline std::string brute_canonical(const std::vector<std::string>& outs, int m) {
  std::vector<int> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  std::string best;
  bool have = false;
  const std::size_t bits = std::size_t{1} << m;
  do {
    for (uint32_t neg = 0; neg < (1u << m); ++neg)
      for (uint32_t on = 0; on < (1u << outs.size()); ++on) {
        std::vector<std::string> img;
        for (std::size_t o = 0; o < outs.size(); ++o) {
          std::string s(bits, '0');
          for (std::size_t q = 0; q < bits; ++q) {
            std::size_t p = 0;
            for (int j = 0; j < m; ++j) p |= (((q >> j) & 1u) ^ ((neg >> j) & 1u)) << perm[j];
            bool b = (outs[o][p] == '1') ^ ((on >> o) & 1u);
            s[q] = b ? '1' : '0';
          }
          img.push_back(s);
        }
        std::sort(img.begin(), img.end());
        std::string joined;
        for (auto& s : img) joined += s + "|";
        if (!have || joined < best) {
          best = joined;
          have = true;
        }
      }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace oracle
