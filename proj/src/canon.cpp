#include "ctrw/canon.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <tuple>
#include <numeric>

#include "ctrw/errors.hpp"

namespace ctrw {

NpnpTransform NpnpTransform::identity(int num_vars) {
  NpnpTransform t;
  t.perm.resize(num_vars);
  std::iota(t.perm.begin(), t.perm.end(), 0);
  return t;
}

uint64_t uniform_below(std::mt19937_64& rng, uint64_t n) {
  if (n == 0) throw DomainError("uniform_below(0)");
  uint64_t limit = ~uint64_t{0} - (~uint64_t{0} % n);
  for (;;) {
    uint64_t x = rng();
    if (x < limit) return x % n;
  }
}

TruthTable apply_transform(const TruthTable& f, const NpnpTransform& t, bool negate_output) {
  const int m = f.num_vars();
  TruthTable g(m);
  for (std::size_t q = 0; q < f.num_bits(); ++q) {
    std::size_t p = 0;
    for (int j = 0; j < m; ++j) {
      std::size_t bit = ((q >> j) & 1u) ^ ((t.input_neg >> j) & 1u);
      p |= bit << t.perm[j];
    }
    g.set(q, f.get(p) ^ negate_output);
  }
  return g;
}

namespace {

// Pattern index remap for one candidate transform, reused across outputs.
void build_remap(int m, const std::vector<int>& perm, uint32_t input_neg,
                 std::vector<uint32_t>& remap) {
  std::size_t n = std::size_t{1} << m;
  remap.resize(n);
  // Incremental: remap[q] = XOR of contributions of each set bit of q.
  std::vector<uint32_t> contrib(m);
  uint32_t base = 0;
  for (int j = 0; j < m; ++j) {
    contrib[j] = 1u << perm[j];
    if ((input_neg >> j) & 1u) base |= 1u << perm[j];
  }
  remap[0] = base;
  for (std::size_t q = 1; q < n; ++q) {
    int low = std::countr_zero(q);
    remap[q] = remap[q & (q - 1)] ^ contrib[low];
  }
}

TruthTable remap_table(const TruthTable& f, const std::vector<uint32_t>& remap, bool neg) {
  TruthTable g(f.num_vars());
  auto gw = g.words();
  for (std::size_t q = 0; q < remap.size(); ++q)
    if (f.get(remap[q]) ^ neg) gw[q >> 6] |= uint64_t{1} << (q & 63);
  return g;
}

}  // namespace

namespace {

bool depends_on(const TruthTable& t, int var) {
  for (std::size_t p = 0; p < t.num_bits(); ++p)
    if (!((p >> var) & 1u) && t.get(p) != t.get(p | (std::size_t{1} << var))) return true;
  return false;
}

bool swap_symmetric(const std::vector<TruthTable>& outs, int a, int b) {
  for (const auto& t : outs)
    for (std::size_t p = 0; p < t.num_bits(); ++p) {
      std::size_t ba = (p >> a) & 1u, bb = (p >> b) & 1u;
      if (ba == bb) continue;
      std::size_t q = p ^ (std::size_t{1} << a) ^ (std::size_t{1} << b);
      if (t.get(p) != t.get(q)) return false;
    }
  return true;
}

// Per-variable invariant of the (output-phased) function. Equal keys are
// the only ties the enumeration has to resolve.
struct VarKey {
  bool relevant = false;
  std::size_t sig = 0;
  std::vector<std::pair<std::size_t, std::size_t>> per_output;
  std::vector<std::array<std::size_t, 4>> pairs;

  auto tie() const { return std::tie(relevant, sig, per_output, pairs); }
  bool operator==(const VarKey& o) const { return tie() == o.tie(); }
  bool operator>(const VarKey& o) const { return tie() > o.tie(); }
};

}  // namespace

CanonicalKey canonicalize(std::span<const TruthTable> outputs, int max_outputs) {
  if (outputs.empty()) throw DomainError("canonicalize: no outputs");
  if (static_cast<int>(outputs.size()) > max_outputs)
    throw CapacityError("canonicalize: " + std::to_string(outputs.size()) +
                        " outputs exceed the cap of " + std::to_string(max_outputs));
  const int m = outputs[0].num_vars();
  const std::size_t l = outputs.size();
  const std::size_t total_bits = outputs[0].num_bits();

  // The search only visits transforms whose image is "normalized": each
  // output has at most half ones, each relevant input's positive cofactor
  // carries at least as many ones as its negative one, variable keys are
  // non-increasing over positions, and irrelevant inputs sit last with no
  // negation. The normalized image set is identical for every member of an
  // NPNP class, so the minimum over it is a class invariant. Swapping two
  // symmetric inputs leaves the image unchanged, so only one order of each
  // symmetry class is tried.
  std::vector<std::vector<bool>> out_phase_choices(l);
  for (std::size_t o = 0; o < l; ++o) {
    std::size_t pc = outputs[o].popcount();
    if (2 * pc < total_bits)
      out_phase_choices[o] = {false};
    else if (2 * pc > total_bits)
      out_phase_choices[o] = {true};
    else
      out_phase_choices[o] = {false, true};
  }

  std::vector<std::string> best;
  bool have_best = false;
  std::vector<uint32_t> remap;
  std::vector<TruthTable> phased(outputs.begin(), outputs.end());
  std::vector<TruthTable> vars;
  for (int i = 1; i <= m; ++i) vars.push_back(TruthTable::nth_var(m, i));

  std::vector<char> relevant(m, 0);
  for (int i = 0; i < m; ++i)
    for (const auto& t : outputs)
      if (depends_on(t, i)) relevant[i] = 1;

  std::vector<std::size_t> phase_idx(l, 0);
  for (;;) {
    for (std::size_t o = 0; o < l; ++o)
      phased[o] = outputs[o].flip_if(out_phase_choices[o][phase_idx[o]]);

    std::size_t ones = 0;
    for (const auto& t : phased) ones += t.popcount();
    std::vector<VarKey> keys(m);
    std::vector<int> phase(m);  // 0 keep, 1 negate, 2 either
    for (int i = 0; i < m; ++i) {
      VarKey& k = keys[i];
      k.relevant = relevant[i];
      std::size_t s1 = 0;
      for (const auto& t : phased) {
        std::size_t a = (t & vars[i]).popcount(), b = t.popcount() - a;
        s1 += a;
        k.per_output.push_back({std::max(a, b), std::min(a, b)});
      }
      std::size_t s0 = ones - s1;
      k.sig = std::max(s1, s0);
      phase[i] = !relevant[i] ? 0 : (s1 > s0 ? 0 : (s1 < s0 ? 1 : 2));
      std::sort(k.per_output.begin(), k.per_output.end());
      for (int j = 0; j < m; ++j) {
        if (j == i) continue;
        std::array<std::size_t, 4> q{};
        for (const auto& t : phased) {
          q[0] += (t & ~vars[i] & ~vars[j]).popcount();
          q[1] += (t & ~vars[i] & vars[j]).popcount();
          q[2] += (t & vars[i] & ~vars[j]).popcount();
          q[3] += (t & vars[i] & vars[j]).popcount();
        }
        // invariant under negating either variable and swapping them
        std::sort(q.begin(), q.end());
        k.pairs.push_back(q);
      }
      std::sort(k.pairs.begin(), k.pairs.end());
    }

    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return keys[a] > keys[b]; });

    // groups of equal key; within a group, symmetry classes get labels
    struct Group {
      int lo, hi;
      std::vector<std::vector<int>> classes;
    };
    std::vector<Group> groups;
    for (int i = 0; i < m;) {
      int j = i;
      while (j < m && keys[order[j]] == keys[order[i]]) ++j;
      Group g{i, j, {}};
      for (int p = i; p < j; ++p) {
        int v = order[p];
        bool placed = false;
        for (auto& cls : g.classes)
          if (!relevant[v] || swap_symmetric(phased, cls[0], v)) {
            cls.push_back(v);
            placed = true;
            break;
          }
        if (!placed) g.classes.push_back({v});
      }
      groups.push_back(std::move(g));
      i = j;
    }
    std::vector<std::vector<int>> labels(groups.size());
    for (std::size_t gi = 0; gi < groups.size(); ++gi)
      for (std::size_t c = 0; c < groups[gi].classes.size(); ++c)
        for (std::size_t r = 0; r < groups[gi].classes[c].size(); ++r)
          labels[gi].push_back(static_cast<int>(c));

    std::vector<int> free_pos;  // positions whose variable phase is open
    std::vector<int> perm(m);
    auto emit = [&]() {
      free_pos.clear();
      uint32_t fixed_neg = 0;
      for (int j = 0; j < m; ++j) {
        if (phase[perm[j]] == 1) fixed_neg |= 1u << j;
        if (phase[perm[j]] == 2) free_pos.push_back(j);
      }
      for (uint32_t fm = 0; fm < (1u << free_pos.size()); ++fm) {
        uint32_t neg = fixed_neg;
        for (std::size_t b = 0; b < free_pos.size(); ++b)
          if ((fm >> b) & 1u) neg |= 1u << free_pos[b];
        build_remap(m, perm, neg, remap);
        std::vector<std::string> cand;
        cand.reserve(l);
        for (const auto& t : phased) cand.push_back(remap_table(t, remap, false).to_hex());
        std::sort(cand.begin(), cand.end());
        if (!have_best || cand < best) {
          best = std::move(cand);
          have_best = true;
        }
      }
    };
    auto recurse_groups = [&](auto&& self, std::size_t gi) -> void {
      if (gi == groups.size()) {
        emit();
        return;
      }
      const Group& g = groups[gi];
      auto& lab = labels[gi];
      std::sort(lab.begin(), lab.end());
      do {
        std::vector<std::size_t> used(g.classes.size(), 0);
        for (int p = g.lo; p < g.hi; ++p) {
          int c = lab[p - g.lo];
          perm[p] = g.classes[c][used[c]++];
        }
        self(self, gi + 1);
      } while (std::next_permutation(lab.begin(), lab.end()));
    };
    recurse_groups(recurse_groups, 0);

    std::size_t o = 0;
    while (o < l && ++phase_idx[o] == out_phase_choices[o].size()) phase_idx[o++] = 0;
    if (o == l) break;
  }

  CanonicalKey key = std::to_string(m) + ":" + std::to_string(l);
  for (const auto& h : best) key += ":" + h;
  return key;
}

CanonicalKey canonicalize(const Aig& aig, int max_outputs) {
  if (static_cast<int>(aig.num_outputs()) > max_outputs)
    throw CapacityError("canonicalize: too many outputs");
  auto t = output_tables(aig);
  return canonicalize(t, max_outputs);
}

CanonicalKey canonicalize(const Aig& aig, const Window& w, int max_outputs) {
  return canonicalize(window_to_aig(aig, w), max_outputs);
}

Aig npnp_transform(const Aig& aig, const NpnpTransform& t) {
  const int k = aig.num_inputs();
  std::vector<Literal> map(aig.num_nodes());
  map[0] = Literal::const0();
  for (int j = 0; j < k; ++j)
    map[t.perm[j] + 1] = Literal(static_cast<NodeId>(j + 1), (t.input_neg >> j) & 1u);
  Aig out(k);
  auto remap = [&](Literal l) { return map[l.node()] ^ l.complemented(); };
  for (std::size_t i = 0; i < aig.num_ands(); ++i) {
    const auto& g = aig.ands()[i];
    map[aig.and_node(i)] = out.add_and(remap(g.lit0), remap(g.lit1));
  }
  for (std::size_t o = 0; o < aig.num_outputs(); ++o)
    out.add_output(remap(aig.output(o)) ^ static_cast<bool>((t.output_neg >> o) & 1u));
  return out;
}

Aig npnp_transform(const Aig& aig, std::mt19937_64& rng) {
  const int k = aig.num_inputs();
  NpnpTransform t = NpnpTransform::identity(k);
  for (int i = k - 1; i > 0; --i)
    std::swap(t.perm[i], t.perm[uniform_below(rng, static_cast<uint64_t>(i) + 1)]);
  t.input_neg = k == 0 ? 0 : static_cast<uint32_t>(uniform_below(rng, uint64_t{1} << k));
  std::size_t l = aig.num_outputs();
  t.output_neg = l == 0 ? 0 : static_cast<uint32_t>(uniform_below(rng, uint64_t{1} << std::min<std::size_t>(l, 31)));
  return npnp_transform(aig, t);
}

}  // namespace ctrw
