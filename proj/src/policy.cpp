#include "ctrw/policy.hpp"

#include "ctrw/canon.hpp"
#include "ctrw/errors.hpp"

namespace ctrw {

namespace {

void require_mask(const GenState& state, TokenMask mask) {
  if (mask == 0) throw DomainError("prior requested for an empty mask");
  if (mask >> state.vocabulary())
    throw DomainError("mask has bits beyond the vocabulary");
}

void normalize(Distribution& p) {
  double total = 0;
  for (double x : p) total += x;
  for (double& x : p) x /= total;
}

}  // namespace

Distribution uniform_prior(const GenState& state, TokenMask mask) {
  require_mask(state, mask);
  Distribution p(state.vocabulary(), 0.0);
  double w = 1.0 / mask_count(mask);
  for (int t = 0; t < state.vocabulary(); ++t)
    if (mask_has(mask, t)) p[t] = w;
  return p;
}

Distribution heuristic_prior(const GenState& state, TokenMask mask, double boost) {
  require_mask(state, mask);
  if (!(boost >= 1.0)) throw DomainError("heuristic boost must be at least 1");
  const int m = state.num_vars();
  Distribution p(state.vocabulary(), 0.0);
  for (int id = 0; id < state.vocabulary(); ++id) {
    if (!mask_has(mask, id)) continue;
    Token t = Token::from_id(id, m);
    double w = 1.0;
    if (t.kind == TokenKind::Pi) {
      if (state.top_is_output() || state.pi_would_merge(t)) w = boost;
    } else if (t.kind == TokenKind::And) {
      TruthTable ones = state.and_required_ones(t.complemented);
      for (int i = 1; i <= m && w == 1.0; ++i)
        for (int c = 0; c < 2; ++c)
          if (matches_on(state.input_table(i, c), ones, ones)) {
            w = boost;
            break;
          }
    }
    p[id] = w;
  }
  normalize(p);
  return p;
}

Token greedy_token(const Distribution& p, TokenMask mask, int num_vars) {
  if (mask == 0) throw DomainError("greedy choice over an empty mask");
  int best = -1;
  auto rank = [&](int id) { return id == 2 || id == 3 ? 1 : 0; };
  for (int id = 0; id < static_cast<int>(p.size()); ++id) {
    if (!mask_has(mask, id)) continue;
    if (best < 0 || p[id] > p[best] || (p[id] == p[best] && rank(id) < rank(best))) best = id;
  }
  if (best < 0) throw DomainError("distribution does not cover the mask");
  return Token::from_id(best, num_vars);
}

Token sample_token(const Distribution& p, TokenMask mask, int num_vars, std::mt19937_64& rng) {
  if (mask == 0) throw DomainError("sampling over an empty mask");
  double total = 0;
  for (int id = 0; id < static_cast<int>(p.size()); ++id)
    if (mask_has(mask, id)) total += p[id];
  // 53-bit uniform in [0, 1) from the raw engine for portable results
  double u = static_cast<double>(rng() >> 11) * 0x1.0p-53 * total;
  int last = -1;
  for (int id = 0; id < static_cast<int>(p.size()); ++id) {
    if (!mask_has(mask, id)) continue;
    last = id;
    if (u < p[id]) return Token::from_id(id, num_vars);
    u -= p[id];
  }
  return Token::from_id(last, num_vars);
}

HeuristicPrior::HeuristicPrior(double boost) : boost_(boost) {
  if (!(boost >= 1.0)) throw DomainError("heuristic boost must be at least 1");
}

std::unique_ptr<PolicyPrior> make_prior(const std::string& spec, BridgeOptions opts) {
  if (spec == "uniform") return std::make_unique<UniformPrior>();
  if (spec == "heuristic") return std::make_unique<HeuristicPrior>();
  if (spec.rfind("bridge:", 0) == 0 && spec.size() > 7)
    return std::make_unique<ExternalPrior>(spec.substr(7), opts);
  throw ConfigError("unknown policy '" + spec + "'");
}

}  // namespace ctrw
