#include "ctrw/datagen.hpp"

#include <json.hpp>
#include <unordered_set>

#include "ctrw/errors.hpp"

namespace ctrw {

using nlohmann::json;

void DatasetConfig::validate() const {
  if (k < 2 || k > kMaxVars) throw ConfigError("k must lie in 2..16");
  if (l < 1) throw ConfigError("l must be at least 1");
  if (m_node < l) throw ConfigError("m_node must be at least l");
  if (count < 1) throw ConfigError("count must be at least 1");
  if (max_len < 4) throw ConfigError("max_len must be at least 4");
  if (dedup && l > kDefaultMaxCanonOutputs)
    throw ConfigError("deduplication supports at most " + std::to_string(kDefaultMaxCanonOutputs) +
                      " outputs");
}

Aig random_aig(int k, int l, int m_node, std::mt19937_64& rng) {
  if (k < 2) throw DomainError("random_aig needs k >= 2");
  if (l < 1 || m_node < l) throw DomainError("random_aig needs m_node >= l >= 1");
  Aig aig(k);
  std::vector<Literal> s;
  for (int i = 1; i <= k; ++i) s.push_back(aig.input(i));
  for (int i = 0; i < m_node; ++i) {
    uint64_t n = s.size();
    uint64_t a = uniform_below(rng, n);
    uint64_t b = uniform_below(rng, n - 1);
    if (b >= a) ++b;
    uint64_t pol = uniform_below(rng, 4);
    s.push_back(aig.add_and(s[a] ^ static_cast<bool>(pol & 1u), s[b] ^ static_cast<bool>(pol >> 1)));
  }
  for (int o = m_node - l; o < m_node; ++o) aig.add_output(s[k + o]);
  return aig;
}

bool uses_all_inputs(const Aig& aig) {
  std::vector<char> live(aig.num_nodes(), 0);
  for (auto o : aig.outputs()) live[o.node()] = 1;
  for (std::size_t i = aig.num_ands(); i-- > 0;) {
    NodeId n = aig.and_node(i);
    if (!live[n]) continue;
    live[aig.gate(n).lit0.node()] = 1;
    live[aig.gate(n).lit1.node()] = 1;
  }
  for (int i = 1; i <= aig.num_inputs(); ++i)
    if (!live[i]) return false;
  return true;
}

std::vector<DatasetRecord> make_dataset(const DatasetConfig& cfg, std::mt19937_64& rng) {
  cfg.validate();
  constexpr uint64_t kProbe = 10000;
  std::vector<DatasetRecord> out;
  std::unordered_set<CanonicalKey> seen;
  uint64_t attempts = 0, window_hits = 0;
  while (out.size() < cfg.count) {
    Aig g = random_aig(cfg.k, cfg.l, cfg.m_node, rng).compacted();
    uint64_t attempt = attempts++;
    bool ok = encoded_length(g) <= cfg.max_len && (!cfg.require_all_inputs || uses_all_inputs(g));
    CanonicalKey key;
    if (ok && cfg.dedup) {
      key = canonicalize(g);
      ok = seen.insert(key).second;
    }
    if (ok) {
      ++window_hits;
      DatasetRecord r{std::move(g), {}, std::move(key), attempt};
      r.tokens = encode_aig(r.aig);
      out.push_back(std::move(r));
    }
    if (attempts % kProbe == 0) {
      if (window_hits * 1000 < kProbe)
        throw ConfigError("dataset filters rejected more than 99.9% of " + std::to_string(kProbe) +
                          " draws");
      window_hits = 0;
    }
  }
  return out;
}

std::vector<PairRecord> self_improve_pairs(const std::vector<DatasetRecord>& dataset,
                                           const PolicyPrior& prior, const SearchConfig& cfg,
                                           bool filter_on, uint64_t seed) {
  cfg.validate();
  std::vector<PairRecord> out;
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    Aig g = npnp_transform(dataset[i].aig, rng);
    auto reqs = exact_requirements(output_tables(g));
    SearchConfig greedy = cfg;
    greedy.m_step = 0;
    SearchConfig searched = cfg;
    searched.seed = rng();
    Aig g1 = synthesize(reqs, nullptr, prior, greedy);
    Aig g2 = synthesize(reqs, nullptr, prior, searched);
    if (!cec(g, g1) || !cec(g, g2))
      throw ContractViolation("synthesized pair member is not equivalent to graph " +
                              std::to_string(i));
    if (filter_on && !(g2.num_ands() < g1.num_ands())) continue;
    PairRecord p;
    p.greedy_size = g1.num_ands();
    p.mcts_size = g2.num_ands();
    p.seed = searched.seed;
    p.source = i;
    p.improved = g2.num_ands() <= g.num_ands() ? std::move(g2) : g;
    p.original = std::move(g);
    out.push_back(std::move(p));
  }
  return out;
}

namespace {

json token_ids(const std::vector<Token>& t) {
  json a = json::array();
  for (const auto& x : t) a.push_back(x.id());
  return a;
}

}  // namespace

std::string dataset_line(const DatasetRecord& r, const DatasetConfig& cfg, uint64_t seed) {
  json j;
  j["aag"] = write_aiger(r.aig);
  j["tokens"] = token_ids(r.tokens);
  j["key"] = r.key;
  j["ands"] = r.aig.num_ands();
  j["inputs"] = r.aig.num_inputs();
  j["outputs"] = r.aig.num_outputs();
  j["provenance"] = {{"seed", seed},
                     {"attempt", r.attempt},
                     {"k", cfg.k},
                     {"l", cfg.l},
                     {"nodes", cfg.m_node},
                     {"max_len", cfg.max_len}};
  return j.dump();
}

std::string pair_line(const PairRecord& r, const SearchConfig& cfg) {
  json j;
  j["original"] = write_aiger(r.original);
  j["improved"] = write_aiger(r.improved);
  j["original_tokens"] = token_ids(encode_aig(r.original));
  j["improved_tokens"] = token_ids(encode_aig(r.improved));
  j["sizes"] = {r.original.num_ands(), r.improved.num_ands()};
  j["greedy_size"] = r.greedy_size;
  j["mcts_size"] = r.mcts_size;
  j["provenance"] = {{"seed", r.seed},
                     {"source", r.source},
                     {"m_step", cfg.m_step},
                     {"m_playout", cfg.m_playout}};
  return j.dump();
}

DatasetRecord parse_dataset_line(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw ParseError(1, std::string("dataset record: ") + e.what());
  }
  DatasetRecord r;
  r.aig = parse_aiger(j.at("aag").get<std::string>());
  for (int id : j.at("tokens")) r.tokens.push_back(Token::from_id(id, r.aig.num_inputs()));
  r.key = j.value("key", "");
  return r;
}

}  // namespace ctrw
