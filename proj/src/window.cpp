#include "ctrw/window.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "ctrw/errors.hpp"

namespace ctrw {

namespace {

constexpr std::size_t kLenCap = std::numeric_limits<std::size_t>::max() / 4;

struct GraphView {
  const Aig& aig;
  std::vector<std::vector<NodeId>> fo;
  std::vector<int> po_refs;

  explicit GraphView(const Aig& a) : aig(a), fo(fanouts(a)), po_refs(a.num_nodes(), 0) {
    for (auto o : a.outputs()) ++po_refs[o.node()];
  }
};

// Inputs and outputs of the node set marked in `in_set`.
void boundary(const GraphView& g, const std::vector<NodeId>& internal,
              const std::vector<char>& in_set, std::vector<NodeId>& inputs,
              std::vector<NodeId>& outputs) {
  inputs.clear();
  outputs.clear();
  for (NodeId n : internal) {
    const auto& gate = g.aig.gate(n);
    for (Literal f : {gate.lit0, gate.lit1})
      if (!in_set[f.node()]) inputs.push_back(f.node());
    bool external = g.po_refs[n] > 0;
    for (NodeId s : g.fo[n])
      if (!in_set[s]) external = true;
    if (external) outputs.push_back(n);
  }
  std::sort(inputs.begin(), inputs.end());
  inputs.erase(std::unique(inputs.begin(), inputs.end()), inputs.end());
  std::sort(outputs.begin(), outputs.end());
}

std::size_t encoded_length_of(const Aig& aig, const std::vector<NodeId>& internal_sorted,
                              const std::vector<NodeId>& outputs, const std::vector<char>& in_set) {
  // internal_sorted ascending is topological for a clean graph
  std::vector<std::size_t> len(internal_sorted.size());
  auto index_of = [&](NodeId n) {
    return static_cast<std::size_t>(
        std::lower_bound(internal_sorted.begin(), internal_sorted.end(), n) - internal_sorted.begin());
  };
  for (std::size_t i = 0; i < internal_sorted.size(); ++i) {
    const auto& g = aig.gate(internal_sorted[i]);
    std::size_t l = 1;
    for (Literal f : {g.lit0, g.lit1})
      l += in_set[f.node()] ? len[index_of(f.node())] : 1;
    len[i] = std::min(l, kLenCap);
  }
  std::size_t total = 1;
  for (NodeId o : outputs) total = std::min(total + len[index_of(o)], kLenCap);
  return total;
}

}  // namespace

Window make_window(const Aig& aig, std::vector<NodeId> internal) {
  GraphView g(aig);
  std::sort(internal.begin(), internal.end());
  std::vector<char> in_set(aig.num_nodes(), 0);
  for (NodeId n : internal) {
    if (!aig.is_and(n)) throw DomainError("window internal node " + std::to_string(n) + " is not an AND");
    in_set[n] = 1;
  }
  Window w;
  boundary(g, internal, in_set, w.inputs, w.outputs);
  w.internal = std::move(internal);
  return w;
}

std::size_t window_encoded_length(const Aig& aig, const Window& w) {
  std::vector<char> in_set(aig.num_nodes(), 0);
  for (NodeId n : w.internal) in_set[n] = 1;
  return encoded_length_of(aig, w.internal, w.outputs, in_set);
}

std::vector<Window> extract_ffws(const Aig& aig, const WindowLimits& limits) {
  if (limits.k < 2) throw DomainError("window input cap must be at least 2");
  aig.check();
  GraphView g(aig);
  std::vector<char> claimed(aig.num_nodes(), 0);
  std::vector<char> in_set(aig.num_nodes(), 0);
  std::vector<Window> windows;

  std::vector<char> live(aig.num_nodes(), 0);
  for (auto o : aig.outputs()) live[o.node()] = 1;
  for (std::size_t i = aig.num_ands(); i-- > 0;) {
    NodeId n = aig.and_node(i);
    if (!live[n]) continue;
    live[aig.gate(n).lit0.node()] = 1;
    live[aig.gate(n).lit1.node()] = 1;
  }

  std::vector<NodeId> inputs, outputs;
  for (std::size_t i = aig.num_ands(); i-- > 0;) {
    NodeId seed = aig.and_node(i);
    if (claimed[seed] || !live[seed]) continue;
    std::vector<NodeId> internal{seed};
    in_set[seed] = 1;

    for (;;) {
      std::vector<NodeId> cand;
      for (NodeId n : internal) {
        const auto& gate = aig.gate(n);
        for (Literal f : {gate.lit0, gate.lit1}) {
          NodeId c = f.node();
          if (aig.is_and(c) && !in_set[c] && !claimed[c]) cand.push_back(c);
        }
      }
      std::sort(cand.begin(), cand.end());
      cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
      // Candidates absorbed without creating a new output go first, then
      // the latest node.
      auto fully_absorbed = [&](NodeId c) {
        if (g.po_refs[c]) return false;
        for (NodeId s : g.fo[c])
          if (!in_set[s]) return false;
        return true;
      };
      std::stable_sort(cand.begin(), cand.end(), [&](NodeId a, NodeId b) {
        bool fa = fully_absorbed(a), fb = fully_absorbed(b);
        if (fa != fb) return fa;
        return a > b;
      });

      bool grown = false;
      for (NodeId c : cand) {
        in_set[c] = 1;
        auto trial = internal;
        trial.insert(std::upper_bound(trial.begin(), trial.end(), c), c);
        boundary(g, trial, in_set, inputs, outputs);
        bool ok = static_cast<int>(inputs.size()) <= limits.k &&
                  static_cast<int>(outputs.size()) <= limits.max_outputs &&
                  encoded_length_of(aig, trial, outputs, in_set) <= limits.max_len;
        if (ok) {
          internal = std::move(trial);
          grown = true;
          break;
        }
        in_set[c] = 0;
      }
      if (!grown) break;
      std::sort(internal.begin(), internal.end());
    }

    std::sort(internal.begin(), internal.end());
    Window w;
    boundary(g, internal, in_set, w.inputs, w.outputs);
    bool fits = static_cast<int>(w.inputs.size()) <= limits.k &&
                static_cast<int>(w.outputs.size()) <= limits.max_outputs &&
                encoded_length_of(aig, internal, w.outputs, in_set) <= limits.max_len;
    for (NodeId n : internal) {
      in_set[n] = 0;
      claimed[n] = 1;
    }
    if (!fits) continue;
    w.internal = std::move(internal);
    windows.push_back(std::move(w));
  }
  return windows;
}

Aig window_to_aig(const Aig& aig, const Window& w) {
  Aig out(static_cast<int>(w.inputs.size()));
  std::vector<Literal> map(aig.num_nodes());
  std::vector<char> mapped(aig.num_nodes(), 0);
  for (std::size_t j = 0; j < w.inputs.size(); ++j) {
    map[w.inputs[j]] = Literal(static_cast<NodeId>(j + 1), false);
    mapped[w.inputs[j]] = 1;
  }
  auto internal = w.internal;
  std::sort(internal.begin(), internal.end());
  for (NodeId n : internal) {
    const auto& g = aig.gate(n);
    if (!mapped[g.lit0.node()] || !mapped[g.lit1.node()])
      throw StructureError("window node " + std::to_string(n) + " has a fanin outside the window");
    map[n] = out.add_and(map[g.lit0.node()] ^ g.lit0.complemented(),
                         map[g.lit1.node()] ^ g.lit1.complemented());
    mapped[n] = 1;
  }
  for (NodeId o : w.outputs) out.add_output(map[o]);
  return out;
}

std::vector<Requirement> window_requirements_serial(const Aig& aig, const Window& w,
                                                    std::span<const TruthTable> tables) {
  const int m = static_cast<int>(w.inputs.size());
  if (m > kMaxVars) throw CapacityError("window has more than 16 inputs");
  std::vector<Requirement> req(w.outputs.size(), Requirement(TruthTable(m), TruthTable(m)));
  const std::size_t patterns = tables[0].num_bits();
  (void)aig;
  for (std::size_t p = 0; p < patterns; ++p) {
    std::size_t v = 0;
    for (int j = 0; j < m; ++j) v |= static_cast<std::size_t>(tables[w.inputs[j]].get(p)) << j;
    for (std::size_t o = 0; o < w.outputs.size(); ++o) {
      bool value = tables[w.outputs[o]].get(p);
      auto& r = req[o];
      if (r.care.get(v)) {
        if (r.val.get(v) != value)
          throw ContractViolation("window output " + std::to_string(w.outputs[o]) +
                                  " is not a function of the window inputs");
      } else {
        r.care.set(v, true);
        r.val.set(v, value);
      }
    }
  }
  return req;
}

std::vector<Requirement> window_requirements(const Aig& aig, const Window& w,
                                             std::span<const TruthTable> tables) {
  const int m = static_cast<int>(w.inputs.size());
  if (m > kMaxVars) throw CapacityError("window has more than 16 inputs");
  const std::size_t outs = w.outputs.size();
  const std::size_t words = tables[0].num_words();
  const std::size_t patterns = tables[0].num_bits();
  (void)aig;

  // seen1/seen0 per output: window valuations observed with value 1 / 0.
  std::vector<TruthTable> seen1(outs, TruthTable(m)), seen0(outs, TruthTable(m));
#pragma omp parallel
  {
    std::vector<TruthTable> s1(outs, TruthTable(m)), s0(outs, TruthTable(m));
#pragma omp for schedule(static) nowait
    for (long wi = 0; wi < static_cast<long>(words); ++wi) {
      std::size_t base = static_cast<std::size_t>(wi) * 64;
      std::size_t hi = std::min<std::size_t>(64, patterns - base);
      for (std::size_t b = 0; b < hi; ++b) {
        std::size_t v = 0;
        for (int j = 0; j < m; ++j)
          v |= static_cast<std::size_t>((tables[w.inputs[j]].words()[wi] >> b) & 1u) << j;
        for (std::size_t o = 0; o < outs; ++o) {
          if ((tables[w.outputs[o]].words()[wi] >> b) & 1u)
            s1[o].set(v, true);
          else
            s0[o].set(v, true);
        }
      }
    }
#pragma omp critical
    for (std::size_t o = 0; o < outs; ++o) {
      seen1[o] |= s1[o];
      seen0[o] |= s0[o];
    }
  }
  std::vector<Requirement> req;
  req.reserve(outs);
  for (std::size_t o = 0; o < outs; ++o) {
    if (!(seen1[o] & seen0[o]).is_zero())
      throw ContractViolation("window output " + std::to_string(w.outputs[o]) +
                              " is not a function of the window inputs");
    req.emplace_back(seen1[o] | seen0[o], seen1[o]);
  }
  return req;
}

std::vector<Requirement> window_requirements(const Aig& aig, const Window& w) {
  auto tables = simulate_all(aig);
  return window_requirements(aig, w, tables);
}

std::string dump_window(const Aig& aig, const Window& w) {
  std::ostringstream os;
  os << write_aiger(window_to_aig(aig, w));
  os << "c\nwindow inputs";
  for (NodeId n : w.inputs) os << ' ' << n;
  os << "\nwindow outputs";
  for (NodeId n : w.outputs) os << ' ' << n;
  os << '\n';
  return os.str();
}

}  // namespace ctrw
