#include <doctest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "ctrw/datagen.hpp"
#include "ctrw/report.hpp"

namespace fs = std::filesystem;
using namespace ctrw;

namespace {

fs::path scratch(const std::string& name) {
  fs::path d = fs::path(TEST_SCRATCH) / "cli";
  fs::create_directories(d);
  return d / name;
}

int run(const std::string& args) {
  std::string cmd = std::string(CTRW_BIN) + " " + args + " >/dev/null 2>&1";
  int st = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(st));
  return WEXITSTATUS(st);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::size_t line_count(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

fs::path random_case(const std::string& name, uint64_t seed) {
  std::mt19937_64 rng(seed);
  fs::path p = scratch(name);
  spit(p, write_aiger(random_aig(8, 2, 30, rng)));
  return p;
}

}  // namespace

TEST_CASE("gen writes the requested records and is repeatable") {
  auto a = scratch("d1.jsonl"), b = scratch("d2.jsonl");
  const std::string flags = "gen --k 8 --l 2 --nodes 30 --count 100 --seed 1 --out ";
  CHECK(run(flags + a.string()) == 0);
  CHECK(run(flags + b.string()) == 0);
  CHECK(line_count(slurp(a)) == 100);
  CHECK(slurp(a) == slurp(b));
  CHECK(run("gen --k 8 --count 3") == 2);
  CHECK(run("gen --k 8 --l 1 --nodes 2 --count 1 --out " + scratch("bad.jsonl").string()) == 2);
}

TEST_CASE("CTRW_SEED supplies the default seed") {
  auto a = scratch("env.jsonl"), b = scratch("flag.jsonl");
  CHECK(run("gen --count 5 --seed 7 --out " + a.string()) == 0);
  std::string cmd = "CTRW_SEED=7 " + std::string(CTRW_BIN) + " gen --count 5 --out " + b.string();
  CHECK(std::system(cmd.c_str()) == 0);
  CHECK(slurp(a) == slurp(b));
}

TEST_CASE("rewrite keeps function and writes a consistent report") {
  auto in = random_case("in.aag", 3);
  auto out = scratch("out.aag"), rep = scratch("out.json");
  CHECK(run("rewrite " + in.string() + " -o " + out.string() + " --report " + rep.string()) == 0);
  CHECK(run("cec " + in.string() + " " + out.string()) == 0);
  auto s = parse_report(slurp(rep));
  CHECK(s.name == "in");
  CHECK(s.size == parse_aiger(slurp(out)).num_ands());
  CHECK(s.size <= s.initial_size);

  auto greedy = scratch("greedy.aag");
  CHECK(run("rewrite " + in.string() + " --mstep 0 --mplayout 1 -o " + greedy.string()) == 0);
  CHECK(run("cec " + in.string() + " " + greedy.string()) == 0);
  auto dag = scratch("dag.aag");
  CHECK(run("rewrite " + in.string() + " --dag-aware --policy heuristic -o " + dag.string()) == 0);
  CHECK(run("cec " + in.string() + " " + dag.string()) == 0);
}

TEST_CASE("cec reports differences with exit code 1") {
  auto x = scratch("xor.aag"), a = scratch("and.aag");
  Aig g(2);
  Literal p = g.add_and(g.input(1), !g.input(2));
  Literal q = g.add_and(!g.input(1), g.input(2));
  g.add_output(!g.add_and(!p, !q));
  spit(x, write_aiger(g));
  Aig h(2);
  h.add_output(h.add_and(h.input(1), !h.input(2)));
  spit(a, write_aiger(h));
  CHECK(run("cec " + x.string() + " " + x.string()) == 0);
  CHECK(run("cec " + x.string() + " " + a.string()) == 1);
  std::string cmd = std::string(CTRW_BIN) + " cec " + x.string() + " " + a.string();
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe);
  char buf[256] = {};
  std::string text;
  while (fgets(buf, sizeof buf, pipe)) text += buf;
  pclose(pipe);
  CHECK(text.find("differs at inputs 01") != std::string::npos);
}

TEST_CASE("bad input is a usage error") {
  CHECK(run("rewrite /nonexistent/in.aag") == 2);
  auto junk = scratch("junk.aag");
  spit(junk, "aag 1 2 3\n");
  CHECK(run("rewrite " + junk.string()) == 2);
  CHECK(run("cec " + junk.string() + " " + junk.string()) == 2);
  auto in = random_case("k.aag", 4);
  CHECK(run("rewrite " + in.string() + " --k 17") == 2);
  CHECK(run("rewrite " + in.string() + " --policy nonsense") == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("") == 2);
}

TEST_CASE("bench tabulates a directory") {
  fs::path dir = fs::path(TEST_SCRATCH) / "cli-bench";
  fs::remove_all(dir);
  fs::create_directories(dir);
  for (int i = 0; i < 3; ++i) {
    std::mt19937_64 rng(30 + i);
    spit(dir / ("case" + std::to_string(i) + ".aag"), write_aiger(random_aig(6, 2, 20, rng)));
  }
  auto rep = scratch("bench.json");
  CHECK(run("bench " + dir.string() + " --report " + rep.string()) == 0);
  std::string text = slurp(rep);
  std::size_t docs = 0;
  for (std::size_t p = text.find("\"time-seconds\""); p != std::string::npos;
       p = text.find("\"time-seconds\"", p + 1))
    ++docs;
  CHECK(docs == 3);
  CHECK(run("bench /nonexistent") == 2);
}

TEST_CASE("pairs come out of a generated dataset") {
  auto d = scratch("pd.jsonl"), p = scratch("pairs.jsonl");
  CHECK(run("gen --count 20 --seed 2 --out " + d.string()) == 0);
  CHECK(run("pairs --dataset " + d.string() + " --out " + p.string() + " --no-filter") == 0);
  CHECK(line_count(slurp(p)) == 20);
}
