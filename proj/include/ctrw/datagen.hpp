#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ctrw/aig.hpp"
#include "ctrw/canon.hpp"
#include "ctrw/mcts.hpp"
#include "ctrw/policy.hpp"

namespace ctrw {

struct DatasetConfig {
  int k = 8;
  int l = 2;
  int m_node = 30;
  std::size_t count = 100;
  std::size_t max_len = 200;
  bool require_all_inputs = true;
  bool dedup = true;

  void validate() const;
};

/// Random graph: every AND picks two distinct earlier signals
/// with random polarities; the outputs are the last `l` ANDs.
Aig random_aig(int k, int l, int m_node, std::mt19937_64& rng);

struct DatasetRecord {
  Aig aig;
  std::vector<Token> tokens;
  CanonicalKey key;  // empty when dedup is off
  uint64_t attempt = 0;  // index of the draw that produced it
};

/// Draws until `count` graphs pass the length, input-coverage and
/// duplicate filters. Emitted graphs are compacted.
std::vector<DatasetRecord> make_dataset(const DatasetConfig& cfg, std::mt19937_64& rng);

/// True when every input feeds some AND reachable from an output.
bool uses_all_inputs(const Aig& aig);

struct PairRecord {
  Aig original;
  Aig improved;
  std::size_t greedy_size = 0;
  std::size_t mcts_size = 0;
  uint64_t seed = 0;
  std::size_t source = 0;  // dataset index
};

/// For each dataset graph: random NPNP transform, greedy and searched
/// synthesis under full care, emit (transformed graph, searched result).
/// With `filter_on` only pairs where search beat greedy are kept.
std::vector<PairRecord> self_improve_pairs(const std::vector<DatasetRecord>& dataset,
                                           const PolicyPrior& prior, const SearchConfig& cfg,
                                           bool filter_on, uint64_t seed);

std::string dataset_line(const DatasetRecord& r, const DatasetConfig& cfg, uint64_t seed);
std::string pair_line(const PairRecord& r, const SearchConfig& cfg);

/// Reads the graph back from a dataset line.
DatasetRecord parse_dataset_line(const std::string& line);

}  // namespace ctrw
