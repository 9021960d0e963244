#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "ctrw/errors.hpp"
#include "ctrw/mcts.hpp"
#include "ctrw/oracle.hpp"
#include "ctrw/policy.hpp"

using namespace ctrw;

namespace {

Requirement full(const char* h, int n) { return Requirement::exactly(parse_truth_hex(h, n)); }

// Random reachable state: a few random valid tokens from a random requirement.
GenState random_state(std::mt19937_64& rng) {
  int m = 2 + static_cast<int>(rng() % 3);
  TruthTable care(m), val(m);
  for (std::size_t p = 0; p < care.num_bits(); ++p) {
    care.set(p, rng() & 1u);
    val.set(p, rng() & 1u);
  }
  GenState s({Requirement(care, val)}, nullptr, {});
  int steps = static_cast<int>(rng() % 6);
  for (int i = 0; i < steps && !s.terminal(); ++i) {
    TokenMask mask = s.valid_tokens();
    if (mask == 0 || mask == (TokenMask{1} << 1)) break;
    std::vector<int> ids;
    for (int id = 0; id < s.vocabulary(); ++id)
      if (mask_has(mask, id)) ids.push_back(id);
    s.apply(Token::from_id(ids[rng() % ids.size()], m));
  }
  return s;
}

void check_distribution(const Distribution& p, TokenMask mask) {
  double sum = 0;
  for (std::size_t id = 0; id < p.size(); ++id) {
    CHECK(p[id] >= 0);
    if (!mask_has(mask, static_cast<int>(id))) CHECK(p[id] == 0);
    sum += p[id];
  }
  CHECK(std::abs(sum - 1.0) < 1e-9);
}

}  // namespace

TEST_CASE("uniform prior spreads mass evenly") {
  GenState s({full("8", 2)}, nullptr, {});
  auto p = uniform_prior(s, s.valid_tokens());  // AND+ and AND- only
  CHECK(p[2] == doctest::Approx(0.5));
  CHECK(p[3] == doctest::Approx(0.5));
  auto one = uniform_prior(s, TokenMask{1} << 2);
  CHECK(one[2] == 1.0);
  CHECK_THROWS_AS(uniform_prior(s, 0), DomainError);
}

TEST_CASE("priors are distributions over the mask on random states") {
  std::mt19937_64 rng(3);
  UniformPrior u;
  HeuristicPrior h;
  for (int i = 0; i < 1000; ++i) {
    GenState s = random_state(rng);
    if (s.terminal()) continue;
    TokenMask mask = s.valid_tokens();
    if (mask == 0) continue;
    check_distribution(u(s, mask), mask);
    check_distribution(h(s, mask), mask);
  }
}

TEST_CASE("heuristic weights on a first-child obligation") {
  // after AND+ on x1 & x2 the child must be 1 on p3: x1 and x2 fit
  GenState s({full("8", 2)}, nullptr, {});
  s.apply(Token::and_gate(false));
  TokenMask mask = s.valid_tokens();
  REQUIRE(mask == ((TokenMask{1} << 2) | (TokenMask{1} << 3) | (TokenMask{1} << 4) | (TokenMask{1} << 6)));
  auto p = heuristic_prior(s, mask, 4.0);
  CHECK(p[2] == doctest::Approx(0.4));
  CHECK(p[3] == doctest::Approx(0.4));
  CHECK(p[4] == doctest::Approx(0.1));
  CHECK(p[6] == doctest::Approx(0.1));
}

TEST_CASE("heuristic equals uniform when every token ties") {
  // output root: the only literal closes it, and both ANDs qualify
  GenState s({Requirement(parse_truth_hex("a", 2), parse_truth_hex("a", 2))}, nullptr, {});
  TokenMask mask = s.valid_tokens();
  auto h = heuristic_prior(s, mask);
  auto u = uniform_prior(s, mask);
  for (std::size_t i = 0; i < h.size(); ++i) CHECK(h[i] == doctest::Approx(u[i]));
  CHECK(heuristic_prior(s, mask, 1.0) == uniform_prior(s, mask));
}

TEST_CASE("input that completes a duplicate node is flagged as merging") {
  GenState s({full("8", 2), full("8", 2)}, nullptr, {});
  for (auto t : {Token::and_gate(false), Token::pi(1, false), Token::pi(2, false)}) s.apply(t);
  s.apply(Token::and_gate(false));
  s.apply(Token::pi(1, false));
  CHECK(s.pi_would_merge(Token::pi(2, false)));
  auto p = heuristic_prior(s, s.valid_tokens());
  CHECK(p[Token::pi(2, false).id()] == doctest::Approx(p[2]));
}

TEST_CASE("greedy picks the maximum and breaks ties toward leaves") {
  Distribution p(8, 0.0);
  p[2] = 0.5;
  p[5] = 0.5;
  TokenMask m = (TokenMask{1} << 2) | (TokenMask{1} << 5);
  CHECK(greedy_token(p, m, 2).id() == 5);
  p[2] = 0.6;
  p[5] = 0.4;
  CHECK(greedy_token(p, m, 2).id() == 2);
  p[2] = 0.3;
  p[3] = 0.3;
  p[5] = 0.0;
  CHECK(greedy_token(p, (TokenMask{1} << 2) | (TokenMask{1} << 3), 2).id() == 2);
}

TEST_CASE("sampling follows the distribution") {
  Distribution p(8, 0.0);
  p[4] = 0.25;
  p[6] = 0.75;
  TokenMask m = (TokenMask{1} << 4) | (TokenMask{1} << 6);
  std::mt19937_64 rng(9);
  int hits = 0;
  for (int i = 0; i < 20000; ++i) hits += sample_token(p, m, 2, rng).id() == 6;
  CHECK(hits / 20000.0 == doctest::Approx(0.75).epsilon(0.03));
}

TEST_CASE("heuristic greedy reaches the optimum at least as often as uniform") {
  SearchConfig cfg;
  cfg.m_step = 0;
  UniformPrior u;
  HeuristicPrior h;
  int hu = 0, hh = 0;
  for (int f = 0; f < 16; ++f) {
    TruthTable t(2);
    for (int q = 0; q < 4; ++q) t.set(q, (f >> q) & 1);
    std::vector<Requirement> r{Requirement::exactly(t)};
    auto best = exact_min_ands(r, 4);
    REQUIRE(best);
    hu += static_cast<int>(synthesize(r, nullptr, u, cfg).num_ands()) == best->min_ands;
    hh += static_cast<int>(synthesize(r, nullptr, h, cfg).num_ands()) == best->min_ands;
  }
  MESSAGE("uniform ", hu, "/16, heuristic ", hh, "/16");
  CHECK(hh >= hu);
}

TEST_CASE("make_prior specs") {
  CHECK(make_prior("uniform")->name() == "uniform");
  CHECK(make_prior("heuristic")->name() == "heuristic");
  CHECK_THROWS_AS(make_prior("neural"), ConfigError);
  CHECK_THROWS_AS(make_prior("bridge:"), ConfigError);
}
