#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <random>

#include "ctrw/policy.hpp"
#include "ctrw/synthgen.hpp"

namespace ctrw {

struct MctsNode {
  long visited = 0;
  double total_value = 0;
  double prob = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  std::map<int, std::unique_ptr<MctsNode>> children;  // token id -> child

  std::optional<GenState> state;  // materialized on first visit
  bool expanded = false;
  bool dead_end = false;
};

struct SearchConfig {
  int m_step = 10;
  int m_playout = 10;
  double c_explore = 1.0;
  DeadEndMode mode = DeadEndMode::Guaranteed;
  bool dag_aware = false;
  bool stochastic_rollouts = false;
  uint64_t seed = 0;
  GenOptions gen;

  void validate() const;
};

/// PUCT selection: argmax of Q + c * prob * sqrt(N / (1 + n)), with Q = 0
/// for unvisited children and ties going to the lowest token id.
int puct_child(const MctsNode& node, double c_explore = 1.0);

/// Runs `m_playout` playouts from a fresh root at `state` and returns the
/// root action whose branch saw the best cumulative reward.
Token decide_token(const GenState& state, const PolicyPrior& prior, const SearchConfig& cfg,
                   std::mt19937_64& rng, MctsNode* root_out = nullptr);
Token decide_token(const GenState& state, const PolicyPrior& prior, const SearchConfig& cfg);

/// Greedy (or sampled) completion to a terminal state. Returns the final
/// cumulative reward, or -budget when strict mode hits a dead end.
long rollout(GenState& state, const PolicyPrior& prior, const SearchConfig& cfg,
             std::mt19937_64& rng);

/// Drives a whole generation: the first m_step tokens by search, the rest
/// greedily. Returns the terminal state.
GenState synthesize_state(std::vector<Requirement> requirements, const SynthContext* context,
                          const PolicyPrior& prior, const SearchConfig& cfg);

Aig synthesize(std::vector<Requirement> requirements, const SynthContext* context,
               const PolicyPrior& prior, const SearchConfig& cfg,
               std::vector<NodeId>* bindings = nullptr);

}  // namespace ctrw
