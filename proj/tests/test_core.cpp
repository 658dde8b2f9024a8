#include <doctest.h>

#include <fstream>
#include <sstream>

#include "quantsafe/eval.hpp"
#include "quantsafe/format.hpp"
#include "quantsafe/gen.hpp"
#include "quantsafe/limitedness.hpp"
#include "quantsafe/omega.hpp"

using namespace quantsafe;

namespace {

std::string fixture(const std::string& name) { return std::string(QS_FIXTURES) + "/" + name; }

}  // namespace

TEST_CASE("parse fig1a") {
  Automaton a = load_automaton(fixture("fig1a.qa"));
  CHECK(a.num_states() == 4);
  CHECK(a.valfn().tag == ValFn::LimSup);
  // 12 live-part transitions plus the four-letter sink loop
  CHECK(a.transitions().size() == 16);
  CHECK(a.deterministic());
  CHECK(a.alphabet() == std::vector<std::string>{"on", "eco", "off", "err"});
}

TEST_CASE("parse minimal automaton") {
  Automaton a = parse_automaton_string(
      "valfn: inf\n"
      "alphabet: a\n"
      "initial: q\n"
      "q -- a:0 --> q\n");
  CHECK(a.num_states() == 1);
  CHECK(a.transitions().size() == 1);
}

TEST_CASE("totality violation names the state and letter") {
  try {
    parse_automaton_string(
        "valfn: inf\n"
        "alphabet: a b\n"
        "initial: q\n"
        "q -- a:0 --> q\n");
    FAIL("expected a totality error");
  } catch (const ValidationError& e) {
    std::string msg = e.what();
    CHECK(msg.find("'q'") != std::string::npos);
    CHECK(msg.find("'b'") != std::string::npos);
  }
}

TEST_CASE("parse errors carry positions") {
  CHECK_THROWS_AS(parse_automaton_string("valfn: nope\nalphabet: a\ninitial: q\nq -- a:0 --> q\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_automaton_string("valfn: inf\nalphabet: a\ninitial: q\nq -- b:0 --> q\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_automaton_string("valfn: inf\nalphabet: a\ninitial: q\nq -- a --> q\n"),
                  ParseError);
}

TEST_CASE("discount handling") {
  CHECK_THROWS_AS(
      parse_automaton_string("valfn: dsum\nalphabet: a\ninitial: q\nq -- a:0 --> q\n"),
      ParseError);
  CHECK_THROWS_AS(parse_automaton_string(
                      "valfn: inf\ndiscount: 1/2\nalphabet: a\ninitial: q\nq -- a:0 --> q\n"),
                  ParseError);
  Automaton a = parse_automaton_string(
      "valfn: dsum\ndiscount: 1/2\nalphabet: a\ninitial: q\nq -- a:0 --> q\n");
  CHECK(*a.valfn().discount == Rational(1, 2));
  Automaton b = parse_automaton_string(serialize_automaton(a));
  CHECK(*b.valfn().discount == Rational(1, 2));
}

TEST_CASE("round trip is the identity up to state naming") {
  for (uint64_t seed = 1; seed <= 40; seed++) {
    GenParams p;
    p.seed = seed;
    p.states = 1 + (int)(seed % 4);
    p.letters = 1 + (int)(seed % 2);
    p.valfn = seed % 2 ? ValFn::LimSup : ValFn::Sup;
    Automaton a = gen_random_automaton(p);
    Automaton b = parse_automaton_string(serialize_automaton(a));
    CHECK(a.num_states() == b.num_states());
    CHECK(a.alphabet() == b.alphabet());
    CHECK(serialize_automaton(a) == serialize_automaton(b));
  }
}

TEST_CASE("serialize preserves parallel transitions") {
  Automaton a = parse_automaton_string(
      "valfn: sup\n"
      "alphabet: a\n"
      "initial: q\n"
      "q -- a:1 --> q\n"
      "q -- a:2 --> q\n");
  CHECK(a.transitions().size() == 2);
  CHECK_FALSE(a.deterministic());
  Automaton b = parse_automaton_string(serialize_automaton(a));
  CHECK(b.transitions().size() == 2);
}

TEST_CASE("reroot") {
  Automaton a = load_automaton(fixture("fig1a.qa"));
  // p3 absorbs everything at weight zero
  Automaton a3 = reroot(a, 3);
  LassoWord on_loop({}, {0});
  CHECK(evaluate_lasso(a3, on_loop) == Rational(0));
  CHECK(evaluate_lasso(reroot(a, a.initial()), on_loop) == evaluate_lasso(a, on_loop));
  CHECK_THROWS_AS(reroot(a, 9), ValidationError);

  Automaton f2 = load_automaton(fixture("fig2.qa"));
  Automaton f2q2 = reroot(f2, 2);
  for (int s = 0; s < 3; s++) CHECK(evaluate_lasso(f2q2, LassoWord({}, {s})) == Rational(0));
}

TEST_CASE("lasso words validate") {
  CHECK_THROWS_AS(LassoWord({0}, {}), ValidationError);
  Automaton a = load_automaton(fixture("fig2.qa"));
  CHECK_THROWS_AS(evaluate_lasso(a, LassoWord({}, {7})), ValidationError);
}

TEST_CASE("distance automaton format round trip") {
  DistanceAutomaton d = load_distance_automaton(fixture("dist_a1.qa"));
  CHECK(d.num_states() == 1);
  CHECK(d.trans.size() == 1);
  CHECK(d.trans[0].weight == 1);
  DistanceAutomaton d2 = parse_distance_automaton_string(serialize_distance_automaton(d));
  CHECK(d2.trans.size() == 1);
}

TEST_CASE("nfa format") {
  Nfa n = load_nfa(fixture("rejects_b.nfa"));
  CHECK(n.state_names.size() == 3);
  CHECK(n.initials.size() == 1);
  CHECK(n.accepting.size() == 2);
  Nfa n2 = parse_nfa_string(serialize_nfa(n));
  CHECK(n2.trans.size() == n.trans.size());
}
