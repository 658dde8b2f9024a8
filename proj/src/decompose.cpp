#include "quantsafe/decompose.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include "quantsafe/closure.hpp"
#include "quantsafe/eval.hpp"
#include "quantsafe/omega.hpp"

namespace quantsafe {

namespace {

Automaton constant_automaton(const std::vector<std::string>& alphabet, const ValueFunction& vf,
                             const Rational& value) {
  Rational loop_weight = value;
  if (vf.tag == ValFn::DSum) loop_weight = value * (Rational(1) - *vf.discount);
  std::vector<Transition> ts;
  for (int s = 0; s < (int)alphabet.size(); s++) ts.push_back({0, s, loop_weight, 0});
  return Automaton(alphabet, {"t"}, 0, std::move(ts), vf);
}

}  // namespace

Decomposition decompose(const Automaton& a) {
  ValFn tag = a.valfn().tag;
  if (is_limit_average(tag))
    throw ValidationError(
        "decomposition of limit-average automata is not supported (open whether they are "
        "closed under safety-liveness decomposition)");
  if (!a.deterministic())
    throw ValidationError(
        "decompose expects a deterministic automaton; apply determinize_sup / "
        "determinize_liminf / determinize_inf first");

  if (tag == ValFn::Inf || tag == ValFn::DSum) {
    Rational top = top_value(a).value;
    return {a, constant_automaton(a.alphabet(), a.valfn(), top), a};
  }

  // source form: monotone conversion for Sup, the automaton itself otherwise
  Automaton source = tag == ValFn::Sup ? monotone_form(a, ValFn::Sup) : collapse_parallel_max(a);
  TopValueTable tops = state_top_values(source);
  Rational top = tops.theta[source.initial()];

  std::vector<Transition> bts, cts;
  for (const Transition& t : source.transitions()) {
    const Rational& theta = tops.theta[t.dst];
    bts.push_back({t.src, t.letter, theta, t.dst});
    cts.push_back({t.src, t.letter, t.weight == theta ? top : t.weight, t.dst});
  }
  ValueFunction bvf;
  bvf.tag = tag == ValFn::Sup ? ValFn::Inf : tag;
  Automaton b(source.alphabet(), source.state_names(), source.initial(), std::move(bts), bvf);
  Automaton c(source.alphabet(), source.state_names(), source.initial(), std::move(cts),
              source.valfn());
  return {std::move(b), std::move(c), std::move(source)};
}

Automaton determinize_sup(const Automaton& a) {
  if (a.valfn().tag != ValFn::Sup) throw ValidationError("determinize_sup expects a Sup automaton");
  MonotoneGrid grid = monotone_grid(collapse_parallel_max(a), ValFn::Sup);
  const Automaton& m = grid.aut;

  std::map<std::vector<int>, int> id;
  std::vector<std::vector<int>> nodes;
  auto intern = [&](std::vector<int> s) {
    auto it = id.find(s);
    if (it != id.end()) return it->second;
    int v = (int)nodes.size();
    id.emplace(s, v);
    nodes.push_back(std::move(s));
    return v;
  };
  int start = intern({m.initial()});
  std::deque<int> queue{start};
  std::vector<Transition> ts;
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (int s = 0; s < m.num_letters(); s++) {
      std::set<int> nxt;
      for (int q : nodes[v])
        for (int ti : m.out(q, s)) nxt.insert(m.transitions()[ti].dst);
      std::vector<int> key(nxt.begin(), nxt.end());
      // emitted weight: the best running max reached by any tracked run
      Rational w = grid.memory[key[0]];
      for (int q : key) w = max(w, grid.memory[q]);
      size_t before = nodes.size();
      int u = intern(std::move(key));
      if ((size_t)u == before) queue.push_back(u);
      ts.push_back({v, s, w, u});
    }
  }
  std::vector<std::string> names;
  for (size_t i = 0; i < nodes.size(); i++) names.push_back("d" + std::to_string(i));
  ValueFunction vf;
  vf.tag = ValFn::Sup;
  return Automaton(m.alphabet(), std::move(names), start, std::move(ts), vf);
}

Automaton determinize_liminf(const Automaton& a) {
  if (a.valfn().tag != ValFn::LimInf)
    throw ValidationError("determinize_liminf expects a LimInf automaton");
  Automaton c = collapse_parallel_max(a);
  std::vector<Rational> weights = c.weight_values();  // ascending thresholds

  std::vector<OmegaAutomaton> comps;
  std::vector<std::vector<std::vector<int>>> outs;  // per comp: (q,letter) -> tids
  for (const Rational& v : weights) {
    comps.push_back(determinize_cobuchi(threshold_automaton(c, v)));
    outs.push_back(comps.back().out_index());
  }
  int k = c.num_letters();

  std::map<std::vector<int>, int> id;
  std::vector<std::vector<int>> nodes;
  auto intern = [&](std::vector<int> s) {
    auto it = id.find(s);
    if (it != id.end()) return it->second;
    int v = (int)nodes.size();
    id.emplace(s, v);
    nodes.push_back(std::move(s));
    return v;
  };
  std::vector<int> start_tuple;
  for (const auto& comp : comps) start_tuple.push_back(comp.initial);
  int start = intern(start_tuple);
  std::deque<int> queue{start};
  std::vector<Transition> ts;
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (int s = 0; s < k; s++) {
      std::vector<int> nxt(comps.size());
      int best = -1;  // deepest threshold level whose components all accept
      bool chain = true;
      for (size_t i = 0; i < comps.size(); i++) {
        const auto& tids = outs[i][(size_t)nodes[v][i] * k + s];
        if (tids.size() != 1) throw ValidationError("internal: breakpoint automaton not deterministic");
        const OTransition& t = comps[i].trans[tids[0]];
        nxt[i] = t.dst;
        if (chain && t.acc)
          best = (int)i;
        else
          chain = false;
      }
      if (best < 0) throw ValidationError("internal: lowest threshold component broke");
      size_t before = nodes.size();
      int u = intern(std::move(nxt));
      if ((size_t)u == before) queue.push_back(u);
      ts.push_back({v, s, weights[best], u});
    }
  }
  std::vector<std::string> names;
  for (size_t i = 0; i < nodes.size(); i++) names.push_back("d" + std::to_string(i));
  ValueFunction vf;
  vf.tag = ValFn::LimInf;
  return Automaton(c.alphabet(), std::move(names), start, std::move(ts), vf);
}

}  // namespace quantsafe
