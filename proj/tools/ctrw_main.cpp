// ctrw: random AIG datasets, window rewriting and equivalence checks.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ctrw/datagen.hpp"
#include "ctrw/errors.hpp"
#include "ctrw/report.hpp"
#include "ctrw/rewrite.hpp"

namespace fs = std::filesystem;
using namespace ctrw;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDiffer = 1;
constexpr int kExitConfig = 2;
constexpr int kExitCec = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
}

struct RewriteFlags {
  int k = 8;
  std::size_t max_len = 200;
  int mstep = 10;
  int mplayout = 10;
  double c_explore = 1.0;
  bool dag_aware = false;
  bool accept_zero_gain = false;
  bool strict = false;
  int passes = 4;
  std::string policy = "uniform";
  int bridge_timeout_ms = 5000;
  bool bridge_fallback = false;
  uint64_t seed = 0;

  void add_to(CLI::App* app) {
    app->add_option("--k", k, "window input cap")->capture_default_str();
    app->add_option("--max-len", max_len, "window encoded-length cap")->capture_default_str();
    app->add_option("--mstep", mstep, "search-decided tokens per window")->capture_default_str();
    app->add_option("--mplayout", mplayout, "playouts per decision")->capture_default_str();
    app->add_option("--c-explore", c_explore, "PUCT exploration scale")->capture_default_str();
    app->add_flag("--dag-aware", dag_aware, "merge with surviving logic outside the window");
    app->add_flag("--accept-zero-gain", accept_zero_gain, "take replacements that save nothing");
    app->add_flag("--strict", strict, "abort dead-end generations instead of completing them");
    app->add_option("--passes", passes, "pass limit")->capture_default_str();
    app->add_option("--policy", policy, "uniform | heuristic | bridge:<command>")
        ->capture_default_str();
    app->add_option("--bridge-timeout-ms", bridge_timeout_ms)->capture_default_str();
    app->add_flag("--bridge-fallback", bridge_fallback, "use uniform priors when the bridge fails");
    app->add_option("--seed", seed, "search seed")->envname("CTRW_SEED")->capture_default_str();
  }

  RewriteConfig config() const {
    RewriteConfig c;
    c.k = k;
    c.max_len = max_len;
    c.search.m_step = mstep;
    c.search.m_playout = mplayout;
    c.search.c_explore = c_explore;
    c.search.dag_aware = dag_aware;
    c.search.mode = strict ? DeadEndMode::Strict : DeadEndMode::Guaranteed;
    c.search.seed = seed;
    c.accept_zero_gain = accept_zero_gain;
    c.max_passes = passes;
    c.validate();
    return c;
  }

  std::unique_ptr<PolicyPrior> prior() const {
    BridgeOptions b;
    b.timeout = std::chrono::milliseconds(bridge_timeout_ms);
    b.fallback_uniform = bridge_fallback;
    return make_prior(policy, b);
  }
};

struct Rewritten {
  Aig aig;
  RunReport report;
};

// Returns an exit code; `out` is filled only on success.
int rewrite_one(const std::string& path, const RewriteFlags& flags, Rewritten& out) {
  Aig input = parse_aiger(read_file(path));
  if (input.num_inputs() > kMaxVars) throw ConfigError(path + ": more than 16 inputs");
  RewriteConfig cfg = flags.config();
  auto prior = flags.prior();
  Aig work = input;
  RewriteStats stats;
  try {
    stats = ctrw_pass(work, *prior, cfg);
  } catch (const ContractViolation& e) {
    std::cerr << path << ": " << e.what() << "\n";
    return kExitCec;
  }
  CecCounterexample cex{};
  if (!cec(input, work, &cex)) {
    std::cerr << path << ": equivalence check failed on output " << cex.output << ", pattern "
              << cex.pattern << "\n";
    return kExitCec;
  }
  out.aig = std::move(work);
  out.report = RunReport{fs::path(path).stem().string(), std::move(stats), cfg, prior->name(),
                         flags.seed};
  return kExitOk;
}

int cmd_rewrite(const std::string& in, const std::string& out_path, const std::string& report_path,
                const RewriteFlags& flags) {
  Rewritten r;
  if (int code = rewrite_one(in, flags, r); code != kExitOk) return code;
  write_file(out_path, write_aiger(r.aig));
  std::string report = report_json(r.report);
  if (report_path.empty())
    std::cerr << report;
  else
    write_file(report_path, report);
  return kExitOk;
}

int cmd_bench(const std::string& dir, const std::string& report_path, const RewriteFlags& flags) {
  std::vector<fs::path> cases;
  if (!fs::is_directory(dir)) throw ConfigError(dir + " is not a directory");
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".aag") cases.push_back(e.path());
  std::sort(cases.begin(), cases.end());
  std::ostringstream docs;
  double sum = 0;
  int worst = kExitOk;
  std::printf("%-24s %8s %8s %12s %10s\n", "name", "initial", "size", "improvement", "time");
  for (const auto& p : cases) {
    Rewritten r;
    int code = rewrite_one(p.string(), flags, r);
    if (code != kExitOk) {
      worst = code;
      continue;
    }
    const auto& s = r.report.stats;
    std::printf("%-24s %8zu %8zu %11.2f%% %10.3f\n", r.report.name.c_str(), s.initial_size,
                s.final_size, 100.0 * s.improvement, s.wall_seconds);
    sum += s.improvement;
    docs << report_json(r.report);
  }
  if (!cases.empty()) std::printf("%-24s %29.2f%%\n", "average", 100.0 * sum / cases.size());
  if (!report_path.empty()) write_file(report_path, docs.str());
  return worst;
}

int cmd_cec(const std::string& a, const std::string& b) {
  Aig ga = parse_aiger(read_file(a));
  Aig gb = parse_aiger(read_file(b));
  if (ga.num_inputs() > kMaxVars || gb.num_inputs() > kMaxVars)
    throw ConfigError("equivalence checking supports at most 16 inputs");
  CecCounterexample cex{};
  if (cec(ga, gb, &cex)) {
    std::cout << "equivalent\n";
    return kExitOk;
  }
  std::string bits;
  for (int i = 0; i < ga.num_inputs(); ++i) bits += ((cex.pattern >> i) & 1u) ? '1' : '0';
  std::cout << "not equivalent: output " << cex.output << " differs at inputs " << bits
            << " (x1 first)\n";
  return kExitDiffer;
}

int cmd_gen(const DatasetConfig& cfg, uint64_t seed, const std::string& out) {
  std::mt19937_64 rng(seed);
  auto records = make_dataset(cfg, rng);
  std::ostringstream ss;
  for (const auto& r : records) ss << dataset_line(r, cfg, seed) << "\n";
  write_file(out, ss.str());
  return kExitOk;
}

int cmd_pairs(const std::string& dataset, const std::string& out, const RewriteFlags& flags,
              bool no_filter) {
  std::istringstream in(read_file(dataset));
  std::vector<DatasetRecord> records;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) records.push_back(parse_dataset_line(line));
  RewriteConfig cfg = flags.config();
  auto prior = flags.prior();
  auto pairs = self_improve_pairs(records, *prior, cfg.search, !no_filter, flags.seed);
  std::ostringstream ss;
  for (const auto& p : pairs) ss << pair_line(p, cfg.search) << "\n";
  write_file(out, ss.str());
  std::cerr << pairs.size() << " pairs from " << records.size() << " graphs\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Window rewriting for And-Inverter Graphs"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "generate a filtered random AIG dataset");
  DatasetConfig dcfg;
  uint64_t gen_seed = 0;
  std::string gen_out;
  bool allow_missing = false, no_dedup = false;
  gen->add_option("--k", dcfg.k, "inputs")->capture_default_str();
  gen->add_option("--l", dcfg.l, "outputs")->capture_default_str();
  gen->add_option("--nodes", dcfg.m_node, "AND steps per graph")->capture_default_str();
  gen->add_option("--count", dcfg.count, "graphs to emit")->capture_default_str();
  gen->add_option("--max-len", dcfg.max_len)->capture_default_str();
  gen->add_flag("--allow-missing-inputs", allow_missing);
  gen->add_flag("--no-dedup", no_dedup);
  gen->add_option("--seed", gen_seed)->envname("CTRW_SEED")->capture_default_str();
  gen->add_option("--out", gen_out, "output JSONL file")->required();

  auto* rw = app.add_subcommand("rewrite", "rewrite fanout-free windows of an AIGER file");
  RewriteFlags rflags;
  std::string rw_in, rw_out = "-", rw_report;
  rw->add_option("input", rw_in, "input .aag")->required();
  rw->add_option("-o,--out", rw_out, "output .aag, '-' for stdout")->capture_default_str();
  rw->add_option("--report", rw_report, "report file (stderr when omitted)");
  rflags.add_to(rw);

  auto* bench = app.add_subcommand("bench", "rewrite every .aag in a directory and tabulate");
  RewriteFlags bflags;
  std::string bench_dir, bench_report;
  bench->add_option("dir", bench_dir)->required();
  bench->add_option("--report", bench_report, "file receiving one report per case");
  bflags.add_to(bench);

  auto* cecc = app.add_subcommand("cec", "combinational equivalence check");
  std::string cec_a, cec_b;
  cecc->add_option("a", cec_a)->required();
  cecc->add_option("b", cec_b)->required();

  auto* pairs = app.add_subcommand("pairs", "self-improvement pairs from a dataset");
  RewriteFlags pflags;
  std::string pairs_in, pairs_out;
  bool no_filter = false;
  pairs->add_option("--dataset", pairs_in)->required();
  pairs->add_option("--out", pairs_out)->required();
  pairs->add_flag("--no-filter", no_filter, "emit a pair for every graph");
  pflags.add_to(pairs);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*gen) {
      dcfg.require_all_inputs = !allow_missing;
      dcfg.dedup = !no_dedup;
      return cmd_gen(dcfg, gen_seed, gen_out);
    }
    if (*rw) return cmd_rewrite(rw_in, rw_out, rw_report, rflags);
    if (*bench) return cmd_bench(bench_dir, bench_report, bflags);
    if (*cecc) return cmd_cec(cec_a, cec_b);
    if (*pairs) return cmd_pairs(pairs_in, pairs_out, pflags, no_filter);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const CapacityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const BridgeError& e) {
    std::cerr << "bridge error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
