#include "ctrw/oracle.hpp"

#include <algorithm>
#include <vector>

#include "ctrw/errors.hpp"

namespace ctrw {

namespace {

struct Step {
  uint32_t a, b;  // signed literals: 2 * signal + complement
};

struct Search {
  int n = 0;          // chain length being tried
  int base = 0;       // signals before the first step
  int outputs = 0;
  uint32_t full = 0;  // all-ones table
  std::vector<uint32_t> care, val;
  std::vector<uint32_t> sig;  // raw table per signal
  std::vector<int> refs;      // later references per signal (steps only)
  std::vector<Step> steps;
  uint64_t explored = 0;

  uint32_t lit_table(uint32_t lit) const { return (lit & 1u) ? (~sig[lit >> 1] & full) : sig[lit >> 1]; }

  bool matches(uint32_t t, int o) const { return ((t ^ val[o]) & care[o]) == 0; }

  bool output_covered(int o) const {
    for (uint32_t s = 0; s < sig.size(); ++s)
      if (matches(sig[s], o) || matches(~sig[s] & full, o)) return true;
    return false;
  }

  bool duplicate(uint32_t t) const {
    uint32_t c = ~t & full;
    for (uint32_t s : sig)
      if (s == t || s == c) return true;
    return false;
  }

  int unused() const {
    int u = 0;
    for (int s = base; s < static_cast<int>(sig.size()); ++s) u += refs[s] == 0;
    return u;
  }

  bool all_covered() const {
    for (int o = 0; o < outputs; ++o)
      if (!output_covered(o)) return false;
    return true;
  }

  // Places step `i`; `first` restricts the first step to one candidate.
  bool dfs(int i, long first) {
    ++explored;
    if (i == n) return all_covered();
    const uint32_t nsig = static_cast<uint32_t>(sig.size());
    const uint32_t prev_key = i > 0 ? steps[i - 1].a * 1024u + steps[i - 1].b : 0;
    const uint32_t prev_sig = nsig - 1;
    long index = -1;
    for (uint32_t a = 0; a < 2 * nsig; ++a) {
      for (uint32_t b = a + 1; b < 2 * nsig; ++b) {
        ++index;
        if (i == 0 && first >= 0 && index != first) continue;
        bool uses_prev = i > 0 && ((a >> 1) == prev_sig || (b >> 1) == prev_sig);
        if (i > 0 && !uses_prev && a * 1024u + b <= prev_key) continue;
        uint32_t t = lit_table(a) & lit_table(b);
        if (duplicate(t)) continue;
        sig.push_back(t);
        refs.push_back(0);
        ++refs[a >> 1];
        ++refs[b >> 1];
        steps.push_back({a, b});
        int after = unused();
        bool ok = after <= outputs + (n - 1 - i);
        if (ok && dfs(i + 1, -1)) return true;
        steps.pop_back();
        --refs[a >> 1];
        --refs[b >> 1];
        refs.pop_back();
        sig.pop_back();
      }
    }
    return false;
  }

  long first_step_count() const {
    long s = 2 * static_cast<long>(sig.size());
    return s * (s - 1) / 2;
  }
};

Aig build_witness(const Search& s, int m, bool constants) {
  Aig aig(m);
  std::vector<Literal> lit(s.sig.size());
  int offset = 0;
  if (constants) lit[offset++] = Literal::const0();
  for (int i = 0; i < m; ++i) lit[offset + i] = Literal(static_cast<NodeId>(i + 1), false);
  auto signed_lit = [&](uint32_t l) { return lit[l >> 1] ^ static_cast<bool>(l & 1u); };
  for (std::size_t i = 0; i < s.steps.size(); ++i)
    lit[s.base + i] = aig.add_and(signed_lit(s.steps[i].a), signed_lit(s.steps[i].b));
  for (int o = 0; o < s.outputs; ++o) {
    for (uint32_t l = 0; l < 2 * s.sig.size(); ++l)
      if (s.matches(s.lit_table(l), o)) {
        aig.add_output(signed_lit(l));
        break;
      }
  }
  return aig;
}

}  // namespace

std::optional<OracleResult> exact_min_ands(std::span<const Requirement> requirements, int bound,
                                           const OracleOptions& opts) {
  if (requirements.empty()) throw DomainError("oracle needs at least one requirement");
  const int m = requirements[0].num_vars();
  for (const auto& r : requirements)
    if (r.num_vars() != m) throw DomainError("requirements disagree on the variable count");
  if (m < 1 || m > kOracleMaxVars)
    throw CapacityError("oracle supports 1.." + std::to_string(kOracleMaxVars) + " variables");
  if (bound < 0 || bound > kOracleMaxBound)
    throw CapacityError("oracle bound must lie in 0.." + std::to_string(kOracleMaxBound));

  Search proto;
  proto.outputs = static_cast<int>(requirements.size());
  proto.full = static_cast<uint32_t>((uint64_t{1} << (1u << m)) - 1);
  for (const auto& r : requirements) {
    proto.care.push_back(static_cast<uint32_t>(r.care.words()[0]));
    proto.val.push_back(static_cast<uint32_t>(r.val.words()[0]));
  }
  if (opts.allow_constants) proto.sig.push_back(0);
  for (int i = 1; i <= m; ++i)
    proto.sig.push_back(static_cast<uint32_t>(TruthTable::nth_var(m, i).words()[0]));
  proto.base = static_cast<int>(proto.sig.size());
  proto.refs.assign(proto.sig.size(), 1);

  uint64_t explored = 0;
  for (int n = 0; n <= bound; ++n) {
    proto.n = n;
    if (n == 0) {
      ++explored;
      if (proto.all_covered()) {
        OracleResult r{0, build_witness(proto, m, opts.allow_constants), explored};
        return r;
      }
      continue;
    }
    const long firsts = proto.first_step_count();
    long winner = -1;
    Search found;
#pragma omp parallel for schedule(dynamic, 1) if (opts.parallel) reduction(+ : explored)
    for (long f = 0; f < firsts; ++f) {
      long current;
#pragma omp atomic read
      current = winner;
      if (current >= 0 && current < f) continue;
      Search s = proto;
      bool ok = s.dfs(0, f);
      explored += s.explored;
      if (ok) {
#pragma omp critical
        if (winner < 0 || f < winner) {
          winner = f;
          found = std::move(s);
        }
      }
    }
    if (winner >= 0) {
      OracleResult r{n, build_witness(found, m, opts.allow_constants), explored};
      return r;
    }
  }
  return std::nullopt;
}

}  // namespace ctrw
