#include "ctrw/mcts.hpp"

#include <cmath>
#include <vector>

#include "ctrw/errors.hpp"

namespace ctrw {

void SearchConfig::validate() const {
  if (m_step < 0) throw ConfigError("m_step must be non-negative");
  if (m_playout < 1) throw ConfigError("m_playout must be at least 1");
  if (!(c_explore >= 0)) throw ConfigError("c_explore must be non-negative");
  if (gen.budget < 1) throw ConfigError("token budget must be at least 1");
}

int puct_child(const MctsNode& node, double c_explore) {
  if (node.children.empty()) throw SearchError("PUCT selection on a node without children");
  int best = -1;
  double best_score = 0;
  const double n = static_cast<double>(node.visited);
  for (const auto& [tok, child] : node.children) {
    double q = child->visited > 0 ? child->total_value / child->visited : 0.0;
    double s = q + c_explore * child->prob * std::sqrt(n / (1.0 + child->visited));
    if (best < 0 || s > best_score) {
      best = tok;
      best_score = s;
    }
  }
  return best;
}

namespace {

Token next_token(const GenState& s, TokenMask mask, const PolicyPrior& prior,
                 const SearchConfig& cfg, std::mt19937_64& rng) {
  Distribution p = prior(s, mask);
  if (cfg.stochastic_rollouts) return sample_token(p, mask, s.num_vars(), rng);
  return greedy_token(p, mask, s.num_vars());
}

}  // namespace

long rollout(GenState& state, const PolicyPrior& prior, const SearchConfig& cfg,
             std::mt19937_64& rng) {
  while (!state.terminal()) {
    TokenMask mask = state.valid_tokens();
    if (mask == 0) {
      if (cfg.mode == DeadEndMode::Strict) return -static_cast<long>(state.options().budget);
      shannon_complete(state);
      break;
    }
    state.apply(next_token(state, mask, prior, cfg, rng));
  }
  return state.cum_reward();
}

Token decide_token(const GenState& state, const PolicyPrior& prior, const SearchConfig& cfg,
                   std::mt19937_64& rng, MctsNode* root_out) {
  cfg.validate();
  if (state.terminal()) throw SearchError("search from a terminal state");
  if (state.valid_tokens() == 0) throw SearchError("dead end at the search root");

  MctsNode local;
  MctsNode& root = root_out ? *root_out : local;
  root = MctsNode{};
  root.state.emplace(state);
  root.prob = 1.0;

  std::vector<MctsNode*> path;
  for (int playout = 0; playout < cfg.m_playout; ++playout) {
    path.assign(1, &root);
    MctsNode* node = &root;
    double value;
    for (;;) {
      const GenState& s = *node->state;
      if (s.terminal()) {
        value = static_cast<double>(s.cum_reward());
        break;
      }
      if (node->dead_end) {
        GenState copy = s;
        value = static_cast<double>(rollout(copy, prior, cfg, rng));
        break;
      }
      if (!node->expanded) {
        TokenMask mask = s.valid_tokens();
        node->expanded = true;
        if (mask == 0) {
          node->dead_end = true;
          GenState copy = s;
          value = static_cast<double>(rollout(copy, prior, cfg, rng));
          break;
        }
        Distribution p = prior(s, mask);
        for (int id = 0; id < s.vocabulary(); ++id) {
          if (!mask_has(mask, id)) continue;
          auto child = std::make_unique<MctsNode>();
          child->prob = p[id];
          node->children.emplace(id, std::move(child));
        }
      }
      int tok = puct_child(*node, cfg.c_explore);
      MctsNode* child = node->children.at(tok).get();
      path.push_back(child);
      if (!child->state) {
        child->state.emplace(s);
        child->state->apply(Token::from_id(tok, s.num_vars()));
        GenState sim = *child->state;
        value = static_cast<double>(rollout(sim, prior, cfg, rng));
        break;
      }
      node = child;
    }
    for (MctsNode* n : path) {
      ++n->visited;
      n->total_value += value;
      if (value > n->best_value) n->best_value = value;
    }
  }

  // Ties on best_value go to leaf tokens, as in greedy_token, then to the
  // more visited branch, then to the lowest id.
  auto is_and = [](int tok) {
    return tok == Token::and_gate(false).id() || tok == Token::and_gate(true).id();
  };
  int best = -1;
  const MctsNode* best_node = nullptr;
  for (const auto& [tok, child] : root.children) {
    if (child->visited == 0) continue;
    bool better = !best_node || child->best_value > best_node->best_value;
    if (!better && child->best_value == best_node->best_value) {
      if (is_and(best) != is_and(tok))
        better = is_and(best);
      else
        better = child->visited > best_node->visited;
    }
    if (better) {
      best = tok;
      best_node = child.get();
    }
  }
  if (best < 0) throw SearchError("no playout reached a root child");
  return Token::from_id(best, state.num_vars());
}

Token decide_token(const GenState& state, const PolicyPrior& prior, const SearchConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  return decide_token(state, prior, cfg, rng);
}

GenState synthesize_state(std::vector<Requirement> requirements, const SynthContext* context,
                          const PolicyPrior& prior, const SearchConfig& cfg) {
  cfg.validate();
  GenState s(std::move(requirements), cfg.dag_aware ? context : nullptr, cfg.gen);
  std::mt19937_64 rng(cfg.seed);
  int step = 0;
  while (!s.terminal()) {
    TokenMask mask = s.valid_tokens();
    if (mask == 0) {
      if (cfg.mode == DeadEndMode::Strict)
        throw SearchError("generation reached a dead end in strict mode");
      shannon_complete(s);
      break;
    }
    Token t = step < cfg.m_step ? decide_token(s, prior, cfg, rng)
                                : greedy_token(prior(s, mask), mask, s.num_vars());
    s.apply(t);
    ++step;
  }
  return s;
}

Aig synthesize(std::vector<Requirement> requirements, const SynthContext* context,
               const PolicyPrior& prior, const SearchConfig& cfg, std::vector<NodeId>* bindings) {
  GenState s = synthesize_state(std::move(requirements), context, prior, cfg);
  return finalize(s, bindings);
}

}  // namespace ctrw
