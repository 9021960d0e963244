#include <doctest.h>

#include <map>
#include <random>

#include "ctrw/canon.hpp"
#include "ctrw/datagen.hpp"
#include "ctrw/errors.hpp"
#include "oracles.hpp"

using namespace ctrw;

namespace {

TruthTable var(int n, int i) { return TruthTable::nth_var(n, i); }

std::vector<std::string> bit_strings(std::span<const TruthTable> ts) {
  std::vector<std::string> out;
  for (const auto& t : ts) {
    std::string s;
    for (std::size_t p = 0; p < t.num_bits(); ++p) s += t.get(p) ? '1' : '0';
    out.push_back(s);
  }
  return out;
}

TruthTable random_table(int n, std::mt19937_64& rng) {
  TruthTable t(n);
  for (std::size_t p = 0; p < t.num_bits(); ++p) t.set(p, rng() & 1u);
  return t;
}

}  // namespace

TEST_CASE("AND commutes and output negation is free") {
  std::vector<TruthTable> f{var(2, 1) & var(2, 2)};
  std::vector<TruthTable> g{var(2, 2) & var(2, 1)};
  std::vector<TruthTable> nf{~f[0]};
  CHECK(canonicalize(f) == canonicalize(g));
  CHECK(canonicalize(f) == canonicalize(nf));
}

TEST_CASE("AND and XOR are in different classes") {
  std::vector<TruthTable> a{var(2, 1) & var(2, 2)};
  std::vector<TruthTable> x{var(2, 1) ^ var(2, 2)};
  CHECK(canonicalize(a) != canonicalize(x));
}

TEST_CASE("keys agree with brute-force class representatives") {
  std::mt19937_64 rng(17);
  for (int m = 1; m <= 3; ++m)
    for (int l = 1; l <= 2; ++l) {
      std::map<std::string, std::string> brute_of_key, key_of_brute;
      for (int rep = 0; rep < 150; ++rep) {
        std::vector<TruthTable> ts;
        for (int o = 0; o < l; ++o) ts.push_back(random_table(m, rng));
        auto key = canonicalize(ts);
        auto brute = oracle::brute_canonical(bit_strings(ts), m);
        auto [it, fresh] = brute_of_key.emplace(key, brute);
        CHECK(it->second == brute);
        auto [jt, fresh2] = key_of_brute.emplace(brute, key);
        CHECK(jt->second == key);
      }
    }
}

TEST_CASE("all 16 two-input functions fall into the brute-force classes") {
  std::map<std::string, std::set<std::string>> classes;
  for (int f = 0; f < 16; ++f) {
    TruthTable t(2);
    for (int p = 0; p < 4; ++p) t.set(p, (f >> p) & 1);
    std::vector<TruthTable> ts{t};
    classes[oracle::brute_canonical(bit_strings(ts), 2)].insert(canonicalize(ts));
  }
  CHECK(classes.size() == 4);  // constants, literals, AND-type, XOR-type
  for (auto& [rep, keys] : classes) CHECK(keys.size() == 1);
}

TEST_CASE("NPNP transforms keep the key and the size") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 1000; ++i) {
    Aig g = random_aig(6, 2, 15, rng).compacted();
    Aig h = npnp_transform(g, rng);
    CHECK(h.num_ands() == g.num_ands());
    CHECK(canonicalize(h) == canonicalize(g));
  }
}

TEST_CASE("identity transform and the single AND") {
  std::mt19937_64 rng(5);
  Aig g = random_aig(5, 2, 12, rng);
  CHECK(npnp_transform(g, NpnpTransform::identity(5)) == g);

  Aig a(2);
  a.add_output(a.add_and(a.input(1), a.input(2)));
  for (int i = 0; i < 20; ++i) CHECK(npnp_transform(a, rng).num_ands() == 1);
}

TEST_CASE("apply_transform matches pattern remapping") {
  std::mt19937_64 rng(29);
  for (int rep = 0; rep < 50; ++rep) {
    TruthTable f = random_table(4, rng);
    NpnpTransform t = NpnpTransform::identity(4);
    std::shuffle(t.perm.begin(), t.perm.end(), rng);
    t.input_neg = static_cast<uint32_t>(rng() % 16);
    TruthTable g = apply_transform(f, t, false);
    for (std::size_t q = 0; q < 16; ++q) {
      std::size_t p = 0;
      for (int j = 0; j < 4; ++j) p |= (((q >> j) & 1u) ^ ((t.input_neg >> j) & 1u)) << t.perm[j];
      CHECK(g.get(q) == f.get(p));
    }
  }
}

TEST_CASE("too many outputs is a capacity error") {
  std::vector<TruthTable> ts(5, var(2, 1));
  CHECK_THROWS_AS(canonicalize(ts), CapacityError);
}

TEST_CASE("canonicalization is stable on symmetric eight-input functions") {
  // majority-like symmetric functions used to explode the search
  TruthTable t(8);
  for (std::size_t p = 0; p < t.num_bits(); ++p) t.set(p, std::popcount(p) >= 4);
  std::vector<TruthTable> ts{t, var(8, 3)};
  auto k1 = canonicalize(ts);
  std::vector<TruthTable> swapped{var(8, 5), ~t};
  CHECK(canonicalize(swapped) == k1);
}
