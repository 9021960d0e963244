#include "ctrw/rewrite.hpp"

#include <algorithm>
#include <chrono>
#include <unordered_map>

#include "ctrw/errors.hpp"

namespace ctrw {

void RewriteConfig::validate() const {
  if (k < 2 || k > kMaxVars) throw ConfigError("window input cap must lie in 2..16");
  if (max_len < 4) throw ConfigError("max_len must be at least 4");
  if (max_passes < 1) throw ConfigError("pass limit must be at least 1");
  search.validate();
}

std::size_t RewriteStats::accepted() const {
  return static_cast<std::size_t>(
      std::count_if(windows.begin(), windows.end(), [](const WindowRecord& r) { return r.accepted; }));
}

std::size_t RewriteStats::cycle_reverts() const {
  return static_cast<std::size_t>(std::count_if(
      windows.begin(), windows.end(), [](const WindowRecord& r) { return r.cycle_reverted; }));
}

namespace {

std::vector<TruthTable> simulate_with(const Aig& aig, std::span<const TruthTable> inputs) {
  const int m = inputs.empty() ? 0 : inputs[0].num_vars();
  std::vector<TruthTable> t(aig.num_nodes(), TruthTable(m));
  for (int i = 1; i <= aig.num_inputs(); ++i) t[i] = inputs[i - 1];
  for (NodeId n : topological_ands(aig)) {
    const auto& g = aig.gate(n);
    t[n] = literal_table(t, g.lit0) & literal_table(t, g.lit1);
  }
  return t;
}

// Tables of `nodes` over the window variables; each must be a structural
// function of the window inputs.
std::vector<TruthTable> local_tables(const Aig& aig, const Window& w, std::span<const NodeId> nodes) {
  const int m = static_cast<int>(w.inputs.size());
  std::vector<TruthTable> table(aig.num_nodes());
  std::vector<char> known(aig.num_nodes(), 0);
  for (int j = 0; j < m; ++j) {
    table[w.inputs[j]] = TruthTable::nth_var(m, j + 1);
    known[w.inputs[j]] = 1;
  }
  for (NodeId n : topological_ands(aig)) {
    if (known[n]) continue;
    const auto& g = aig.gate(n);
    if (!known[g.lit0.node()] || !known[g.lit1.node()]) continue;
    table[n] = literal_table(table, g.lit0) & literal_table(table, g.lit1);
    known[n] = 1;
  }
  std::vector<TruthTable> out;
  for (NodeId n : nodes) {
    if (n >= aig.num_nodes() || !known[n])
      throw DomainError("binding " + std::to_string(n) + " is not a function of the window inputs");
    out.push_back(table[n]);
  }
  return out;
}

uint64_t pair_key(Literal a, Literal b) {
  if (b < a) std::swap(a, b);
  return (static_cast<uint64_t>(a.code()) << 32) | b.code();
}

ReplaceResult replace_impl(Aig& aig, const Window& w, const Aig& new_impl,
                           std::span<const NodeId> bindings, bool accept_zero_gain,
                           std::span<const TruthTable> tables) {
  const int m = static_cast<int>(w.inputs.size());
  if (new_impl.num_inputs() != m + static_cast<int>(bindings.size()))
    throw DomainError("replacement has " + std::to_string(new_impl.num_inputs()) +
                      " inputs, expected " + std::to_string(m + bindings.size()));
  if (new_impl.num_outputs() != w.outputs.size())
    throw DomainError("replacement output count differs from the window");

  // care-bit check over the window variables
  auto reqs = window_requirements(aig, w, tables);
  std::vector<TruthTable> leaf;
  for (int j = 1; j <= m; ++j) leaf.push_back(TruthTable::nth_var(m, j));
  for (auto& t : local_tables(aig, w, bindings)) leaf.push_back(std::move(t));
  auto impl_tables = simulate_with(new_impl, leaf);
  for (std::size_t o = 0; o < reqs.size(); ++o)
    if (!reqs[o].satisfied_by(literal_table(impl_tables, new_impl.output(o))))
      throw ContractViolation("replacement output " + std::to_string(o) +
                              " violates the window requirement");

  std::vector<char> internal(aig.num_nodes(), 0), blocked(aig.num_nodes(), 0);
  for (NodeId n : w.internal) internal[n] = blocked[n] = 1;
  auto fo = fanouts(aig);
  std::vector<NodeId> stack(w.outputs.begin(), w.outputs.end());
  while (!stack.empty()) {
    NodeId n = stack.back();
    stack.pop_back();
    for (NodeId s : fo[n])
      if (!blocked[s]) {
        blocked[s] = 1;
        stack.push_back(s);
      }
  }

  // structural and functional lookup over nodes that survive the splice
  std::unordered_map<uint64_t, NodeId> strash;
  std::unordered_map<TruthTable, Literal, TruthTableHash> func;
  auto add_func = [&](const TruthTable& t, Literal l) {
    bool phase = t.get(0);
    func.emplace(t.flip_if(phase), l ^ phase);
  };
  // The constant node is left out: the vocabulary has no constants, and a
  // globally constant window output keeps its single-AND form.
  for (NodeId n = 1; n < aig.num_nodes(); ++n) {
    if (blocked[n]) continue;
    if (aig.is_and(n)) {
      const auto& g = aig.gate(n);
      strash.emplace(pair_key(g.lit0, g.lit1), n);
    }
    add_func(tables[n], Literal(n, false));
  }

  Aig g = aig;
  std::vector<TruthTable> gt(tables.begin(), tables.end());
  std::vector<Literal> map(new_impl.num_nodes());
  for (int j = 0; j < m; ++j) map[j + 1] = Literal(w.inputs[j], false);
  for (std::size_t j = 0; j < bindings.size(); ++j) map[m + 1 + j] = Literal(bindings[j], false);
  auto remap = [&](Literal l) { return map[l.node()] ^ l.complemented(); };
  auto table_of = [&](Literal l) { return gt[l.node()].flip_if(l.complemented()); };
  for (NodeId n : topological_ands(new_impl)) {
    const auto& gate = new_impl.gate(n);
    Literal a = remap(gate.lit0), b = remap(gate.lit1);
    if (a == b) {
      map[n] = a;
      continue;
    }
    if (a == !b) {
      map[n] = Literal::const0();
      continue;
    }
    if (auto it = strash.find(pair_key(a, b)); it != strash.end()) {
      map[n] = Literal(it->second, false);
      continue;
    }
    TruthTable t = table_of(a) & table_of(b);
    bool phase = t.get(0);
    if (auto it = func.find(t.flip_if(phase)); it != func.end()) {
      map[n] = it->second ^ phase;
      continue;
    }
    Literal l = g.add_and(a, b);
    gt.push_back(t);
    strash.emplace(pair_key(a, b), l.node());
    add_func(t, l);
    map[n] = l;
  }

  // redirect external references of the window outputs
  std::vector<int> out_index(aig.num_nodes(), -1);
  for (std::size_t i = 0; i < w.outputs.size(); ++i) out_index[w.outputs[i]] = static_cast<int>(i);
  std::vector<Literal> repl(w.outputs.size());
  for (std::size_t i = 0; i < w.outputs.size(); ++i) repl[i] = remap(new_impl.output(i));
  for (std::size_t i = 0; i < aig.num_ands(); ++i) {
    NodeId n = aig.and_node(i);
    if (internal[n]) continue;
    const auto& gate = aig.gate(n);
    Literal fan[2] = {gate.lit0, gate.lit1};
    for (int which = 0; which < 2; ++which) {
      int o = out_index[fan[which].node()];
      if (o >= 0) g.set_fanin(n, which, repl[o] ^ fan[which].complemented());
    }
  }
  for (std::size_t i = 0; i < aig.num_outputs(); ++i) {
    int o = out_index[aig.output(i).node()];
    if (o >= 0) g.set_output(i, repl[o] ^ aig.output(i).complemented());
  }

  ReplaceResult res;
  if (detect_cycle(g)) {
    res.cycle_reverted = true;
    return res;
  }
  std::vector<NodeId> node_map;
  Aig compact = g.compacted(&node_map);
  res.gain = static_cast<long>(aig.live_ands()) - static_cast<long>(compact.num_ands());
  if (res.gain < 0 || (res.gain == 0 && !accept_zero_gain)) return res;

  auto before = output_tables(aig, tables);
  auto after = output_tables(compact);
  if (before != after) throw ContractViolation("splice changed a primary output function");
  res.accepted = true;
  res.node_map.assign(node_map.begin(), node_map.begin() + aig.num_nodes());
  aig = std::move(compact);
  return res;
}

uint64_t mix_seed(uint64_t seed, uint64_t a, uint64_t b) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (a * 1000003ULL + b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

bool within_limits(const Aig& aig, const Window& w, const RewriteConfig& cfg) {
  return static_cast<int>(w.inputs.size()) <= cfg.k && w.outputs.size() <= 4 &&
         !w.outputs.empty() && window_encoded_length(aig, w) <= cfg.max_len;
}

}  // namespace

ReplaceResult replace_window(Aig& aig, const Window& w, const Aig& new_impl,
                             std::span<const NodeId> bindings, bool accept_zero_gain) {
  for (NodeId n : w.internal)
    if (n >= aig.num_nodes() || !aig.is_and(n)) throw DomainError("window node is not an AND");
  if (make_window(aig, w.internal) != w) throw DomainError("window does not match the graph");
  for (NodeId b : bindings)
    if (b >= aig.num_nodes()) throw DomainError("binding references a missing node");
  auto tables = simulate_all(aig);
  return replace_impl(aig, w, new_impl, bindings, accept_zero_gain, tables);
}

RewriteStats ctrw_pass(Aig& aig, const PolicyPrior& prior, const RewriteConfig& cfg) {
  using clock = std::chrono::steady_clock;
  cfg.validate();
  if (aig.num_inputs() > kMaxVars) throw CapacityError("graph has more than 16 inputs");
  auto start = clock::now();
  const Aig initial = aig;
  aig = aig.compacted();

  RewriteStats stats;
  stats.initial_size = initial.live_ands();
  WindowLimits limits{cfg.k, cfg.max_len, 4};

  for (int pass = 0; pass < cfg.max_passes; ++pass) {
    ++stats.passes;
    auto windows = extract_ffws(aig, limits);
    auto tables = simulate_all(aig);
    std::size_t accepted = 0;
    for (std::size_t wi = 0; wi < windows.size(); ++wi) {
      Window& w = windows[wi];
      if (w.internal.empty()) continue;
      auto t0 = clock::now();
      WindowRecord rec;
      rec.pass = pass;
      rec.inputs = w.inputs.size();
      rec.outputs = w.outputs.size();
      rec.internal = w.internal.size();

      SearchConfig sc = cfg.search;
      sc.seed = mix_seed(cfg.search.seed, static_cast<uint64_t>(pass), wi);
      sc.gen.budget = std::max(sc.gen.budget, window_encoded_length(aig, w));
      auto reqs = window_requirements(aig, w, tables);
      SynthContext ctx;
      if (sc.dag_aware) ctx = make_context(aig, w);
      std::vector<NodeId> bindings;
      try {
        Aig impl = synthesize(std::move(reqs), sc.dag_aware ? &ctx : nullptr, prior, sc, &bindings);
        ReplaceResult r = replace_impl(aig, w, impl, bindings, cfg.accept_zero_gain, tables);
        rec.gain = r.gain;
        rec.accepted = r.accepted;
        rec.cycle_reverted = r.cycle_reverted;
        if (r.accepted) {
          ++accepted;
          tables = simulate_all(aig);
          // carry the remaining windows over to the renumbered graph
          for (std::size_t wj = wi + 1; wj < windows.size(); ++wj) {
            std::vector<NodeId> moved;
            bool alive = true;
            for (NodeId n : windows[wj].internal) {
              NodeId to = r.node_map[n];
              if (to == kNoNode || !aig.is_and(to)) {
                alive = false;
                break;
              }
              moved.push_back(to);
            }
            std::sort(moved.begin(), moved.end());
            bool distinct = std::adjacent_find(moved.begin(), moved.end()) == moved.end();
            if (alive && distinct) {
              windows[wj] = make_window(aig, std::move(moved));
              if (!within_limits(aig, windows[wj], cfg)) windows[wj].internal.clear();
            } else {
              windows[wj].internal.clear();
            }
          }
        }
      } catch (const SearchError&) {
        rec.synthesis_failed = true;
      }
      rec.seconds = std::chrono::duration<double>(clock::now() - t0).count();
      stats.windows.push_back(rec);
    }
    if (accepted == 0) break;
  }

  CecCounterexample cex{};
  if (!cec(initial, aig, &cex)) {
    aig = initial;
    throw ContractViolation("rewritten graph differs from the input on output " +
                            std::to_string(cex.output) + ", pattern " + std::to_string(cex.pattern));
  }
  stats.final_size = aig.num_ands();
  if (stats.final_size > stats.initial_size) {
    aig = initial;
    throw ContractViolation("rewriting increased the graph size");
  }
  stats.improvement = stats.initial_size == 0
                          ? 0.0
                          : static_cast<double>(stats.initial_size - stats.final_size) /
                                static_cast<double>(stats.initial_size);
  stats.wall_seconds = std::chrono::duration<double>(clock::now() - start).count();
  return stats;
}

}  // namespace ctrw
