#include "quantsafe/gen.hpp"

#include <algorithm>
#include <set>

namespace quantsafe {

Automaton gen_random_automaton(const GenParams& p) {
  if (p.states < 1 || p.states > 64) throw ValidationError("gen: states must be in 1..64");
  if (p.letters < 1 || p.letters > 26) throw ValidationError("gen: letters must be in 1..26");
  std::vector<Rational> weights = p.weights;
  if (weights.empty()) weights = {Rational(0), Rational(1), Rational(2)};

  SplitMix64 rng(p.seed);
  std::vector<std::string> alphabet;
  for (int s = 0; s < p.letters; s++) alphabet.push_back(std::string(1, (char)('a' + s)));
  std::vector<std::string> names;
  for (int q = 0; q < p.states; q++) names.push_back("q" + std::to_string(q));

  std::vector<Transition> ts;
  for (int q = 0; q < p.states; q++)
    for (int s = 0; s < p.letters; s++) {
      ts.push_back({q, s, weights[rng.below(weights.size())], (int)rng.below(p.states)});
      if (!p.deterministic) {
        while (rng.chance(p.extra_percent, 100))
          ts.push_back({q, s, weights[rng.below(weights.size())], (int)rng.below(p.states)});
      }
    }

  ValueFunction vf;
  vf.tag = p.valfn;
  if (p.valfn == ValFn::DSum) vf.discount = p.discount ? *p.discount : Rational(1, 2);
  return Automaton(std::move(alphabet), std::move(names), 0, std::move(ts), vf);
}

Automaton build_gadget(const Nfa& nfa, ValFn valfn, std::optional<Rational> discount) {
  if (nfa.alphabet != std::vector<std::string>{"a", "b"})
    throw ValidationError("gadget: the NFA must be over the alphabet {a b}");
  if (nfa.initials.size() != 1)
    throw ValidationError("gadget: the NFA must have a single initial state");

  int n = (int)nfa.state_names.size();
  std::set<int> accepting(nfa.accepting.begin(), nfa.accepting.end());
  std::vector<std::vector<char>> has(n, std::vector<char>(2, 0));
  for (const auto& t : nfa.trans) has[t.src][t.letter] = 1;
  bool incomplete = false;
  for (int q = 0; q < n; q++)
    for (int s = 0; s < 2; s++)
      if (!has[q][s]) incomplete = true;

  // completion sink (rejecting), then the two weighted sinks
  int sink = incomplete ? n : -1;
  int total = n + (incomplete ? 1 : 0);
  int q0 = total, q1 = total + 1;

  std::vector<std::string> names = nfa.state_names;
  if (incomplete) names.push_back("_sink");
  names.push_back("_zero");
  names.push_back("_one");

  std::vector<std::string> alphabet{"a", "b", "#"};
  std::vector<Transition> ts;
  for (const auto& t : nfa.trans) ts.push_back({t.src, t.letter, Rational(1), t.dst});
  if (incomplete)
    for (int q = 0; q < n; q++)
      for (int s = 0; s < 2; s++)
        if (!has[q][s]) ts.push_back({q, s, Rational(1), sink});
  if (incomplete)
    for (int s = 0; s < 2; s++) ts.push_back({sink, s, Rational(1), sink});

  auto hash_edge = [&](int q) {
    bool acc = accepting.count(q) > 0;
    ts.push_back({q, 2, Rational(acc ? 1 : 0), acc ? q1 : q0});
  };
  for (int q = 0; q < n; q++) hash_edge(q);
  if (incomplete) hash_edge(sink);

  for (int s = 0; s < 3; s++) {
    ts.push_back({q0, s, Rational(0), q0});
    ts.push_back({q1, s, Rational(1), q1});
  }

  ValueFunction vf;
  vf.tag = valfn;
  if (valfn == ValFn::DSum) vf.discount = discount ? *discount : Rational(1, 2);
  return Automaton(std::move(alphabet), std::move(names), nfa.initials[0], std::move(ts), vf);
}

}  // namespace quantsafe
