#pragma once
// Hand-built graphs shared by the unit and acceptance tests.

#include <sstream>
#include <string>
#include <vector>

#include "ctrw/aig.hpp"
#include "ctrw/synthgen.hpp"
#include "ctrw/window.hpp"

namespace fixtures {

using namespace ctrw;

// Tokens from a compact string: "A+" / "A-" for AND, "3+" / "3-" for input 3.
inline std::vector<Token> tokens(const std::string& s) {
  std::istringstream in(s);
  std::vector<Token> out;
  std::string w;
  while (in >> w) {
    bool c = w.back() == '-';
    if (w == "E")
      out.push_back(Token::eos());
    else if (w[0] == 'A')
      out.push_back(Token::and_gate(c));
    else
      out.push_back(Token::pi(std::stoi(w.substr(0, w.size() - 1)), c));
  }
  return out;
}

// Window whose two inputs always carry the same value: u = y1 & y2 and
// v = y1 & u. The window computes XOR(u, v) with three ANDs, so only (0,0)
// and (1,1) reach it and both require 0.
struct EqualInputs {
  Aig g{2};
  Literal u, v, out;
  Window w;
};

inline EqualInputs equal_inputs() {
  EqualInputs f;
  Aig& g = f.g;
  f.u = g.add_and(g.input(1), g.input(2));
  f.v = g.add_and(g.input(1), f.u);
  Literal a = g.add_and(f.u, f.v);
  Literal b = g.add_and(!f.u, !f.v);
  f.out = g.add_and(!a, !b);
  g.add_output(f.out);
  f.w = make_window(g, {a.node(), b.node(), f.out.node()});
  return f;
}

// Full-care target x1 x2 (x3 | x4). The trace below builds x1 x2 twice; the
// second copy merges with the first at step 10.
inline const char* kMergeTrace = "A- A- A+ 1+ 2+ 3+ A- A+ 1+ 2+ 4+ E";

inline TruthTable merge_target() {
  auto x = [](int i) { return TruthTable::nth_var(4, i); };
  return x(1) & x(2) & (x(3) | x(4));
}

// Surrounding graph keeps g = x1 & (x2 & x3) alive through a primary output.
// The window implements o1 = (x1 x2)(x3 x4) and o2 = (x1 x3) & !x4 with five
// ANDs over x1..x4.
struct SharedContext {
  Aig g{4};
  Literal shared;
  Window w;
};

inline SharedContext shared_context() {
  SharedContext f;
  Aig& g = f.g;
  auto x = [&](int i) { return g.input(i); };
  Literal g1 = g.add_and(x(2), x(3));
  f.shared = g.add_and(x(1), g1);
  Literal a = g.add_and(x(1), x(2));
  Literal b = g.add_and(x(3), x(4));
  Literal o1 = g.add_and(a, b);
  Literal c = g.add_and(x(1), x(3));
  Literal o2 = g.add_and(c, !x(4));
  g.add_output(o1);
  g.add_output(o2);
  g.add_output(f.shared);
  f.w = make_window(g, {a.node(), b.node(), o1.node(), c.node(), o2.node()});
  return f;
}

// Rebuilds x1 x2 x3 under the first output, which the context already has.
inline const char* kContextTrace = "A+ A+ A+ 1+ 2+ 3+ 4+ A+ A+ 1+ 3+ 4- E";

// o1 = y1 & y2 is read by e = o1 & y1 (equal to o1), and e feeds
// o2 = e & y3. Window {o1, o2} has inputs y1, y2, y3, e. Implementing o1 as
// the window input e is valid on every reachable pattern but closes a loop
// through e.
struct CycleTrap {
  Aig g{3};
  Literal e;
  Window w;
  Aig impl{4};
};

inline CycleTrap cycle_trap() {
  CycleTrap f;
  Aig& g = f.g;
  Literal o1 = g.add_and(g.input(1), g.input(2));
  f.e = g.add_and(o1, g.input(1));
  Literal o2 = g.add_and(f.e, g.input(3));
  g.add_output(o2);
  g.add_output(f.e);
  f.w = make_window(g, {o1.node(), o2.node()});
  f.impl.add_output(f.impl.input(4));
  f.impl.add_output(f.impl.add_and(f.impl.input(4), f.impl.input(3)));
  return f;
}

}  // namespace fixtures
