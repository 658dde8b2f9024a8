#include "quantsafe/decide.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include "quantsafe/closure.hpp"
#include "quantsafe/eval.hpp"
#include "quantsafe/limitedness.hpp"
#include "quantsafe/omega.hpp"

namespace quantsafe {

const char* question_name(Question q) {
  switch (q) {
    case Question::Constant: return "constant";
    case Question::Safe: return "safe";
    case Question::Live: return "live";
  }
  return "?";
}

namespace {

struct InternalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Automaton restrict_reachable(const Automaton& a) {
  std::vector<int> map(a.num_states(), -1);
  std::vector<int> order{a.initial()};
  map[a.initial()] = 0;
  std::deque<int> queue{a.initial()};
  while (!queue.empty()) {
    int q = queue.front();
    queue.pop_front();
    for (int s = 0; s < a.num_letters(); s++)
      for (int ti : a.out(q, s)) {
        int dst = a.transitions()[ti].dst;
        if (map[dst] == -1) {
          map[dst] = (int)order.size();
          order.push_back(dst);
          queue.push_back(dst);
        }
      }
  }
  std::vector<std::string> names;
  for (int q : order) names.push_back(a.state_names()[q]);
  std::vector<Transition> ts;
  for (const Transition& t : a.transitions())
    if (map[t.src] != -1) ts.push_back({map[t.src], t.letter, t.weight, map[t.dst]});
  return Automaton(a.alphabet(), std::move(names), 0, std::move(ts), a.valfn());
}

// maximal accumulated discounted value of a run on `word`, per end state
std::vector<std::optional<Rational>> dsum_prefix_values(const Automaton& a,
                                                        const std::vector<int>& word) {
  const Rational& lambda = *a.valfn().discount;
  std::vector<std::optional<Rational>> cur(a.num_states());
  cur[a.initial()] = Rational(0);
  Rational pw(1);
  for (int letter : word) {
    std::vector<std::optional<Rational>> nxt(a.num_states());
    for (int q = 0; q < a.num_states(); q++) {
      if (!cur[q]) continue;
      for (int ti : a.out(q, letter)) {
        const Transition& t = a.transitions()[ti];
        Rational v = *cur[q] + pw * t.weight;
        if (!nxt[t.dst] || v > *nxt[t.dst]) nxt[t.dst] = v;
      }
    }
    cur = std::move(nxt);
    pw = pw * lambda;
  }
  return cur;
}

// best running min per state after reading `word` (Inf semantics)
std::vector<std::optional<Rational>> inf_prefix_mins(const Automaton& a,
                                                     const std::vector<int>& word) {
  std::vector<std::optional<Rational>> cur(a.num_states());
  std::vector<char> sentinel(a.num_states(), 0);  // "no weight read yet"
  cur[a.initial()] = Rational(0);
  sentinel[a.initial()] = 1;
  for (int letter : word) {
    std::vector<std::optional<Rational>> nxt(a.num_states());
    std::vector<char> nsent(a.num_states(), 0);
    for (int q = 0; q < a.num_states(); q++) {
      if (!cur[q]) continue;
      for (int ti : a.out(q, letter)) {
        const Transition& t = a.transitions()[ti];
        Rational v = sentinel[q] ? t.weight : min(*cur[q], t.weight);
        if (!nxt[t.dst] || v > *nxt[t.dst]) nxt[t.dst] = v;
      }
    }
    cur = std::move(nxt);
    sentinel = std::move(nsent);
  }
  return cur;
}

std::vector<char> reach_set_on_word(const Automaton& a, const std::vector<int>& word) {
  std::vector<char> cur(a.num_states(), 0);
  cur[a.initial()] = 1;
  for (int letter : word) {
    std::vector<char> nxt(a.num_states(), 0);
    for (int q = 0; q < a.num_states(); q++) {
      if (!cur[q]) continue;
      for (int ti : a.out(q, letter)) nxt[a.transitions()[ti].dst] = 1;
    }
    cur = std::move(nxt);
  }
  return cur;
}

}  // namespace

Verdict is_constant_dsum(const Automaton& a) {
  if (a.valfn().tag != ValFn::DSum)
    throw ValidationError("is_constant_dsum expects a DSum automaton");
  Verdict v;
  v.question = Question::Constant;
  const Rational& lambda = *a.valfn().discount;

  Automaton c = collapse_parallel_max(a);
  TopValueTable tops = state_top_values(c);
  Rational top = tops.theta[c.initial()];
  v.value = top;
  v.method.push_back("per-state discounted tops by exact policy iteration");

  // keep only optimal transitions: x + lambda*T(dst) == T(src)
  Nfa pruned;
  pruned.alphabet = c.alphabet();
  pruned.state_names = c.state_names();
  pruned.initials = {c.initial()};
  for (int q = 0; q < c.num_states(); q++) pruned.accepting.push_back(q);
  for (const Transition& t : c.transitions())
    if (t.weight + lambda * tops.theta[t.dst] == tops.theta[t.src])
      pruned.trans.push_back({t.src, t.letter, t.dst});
  v.method.push_back("pruned non-optimal transitions; NFA universality with antichains");

  NfaUniversalResult u = nfa_universal(pruned);
  if (u.universal) {
    v.answer = true;
    return v;
  }
  v.answer = false;
  v.prefix_witness = u.witness;
  LassoWord w(u.witness, {0});
  if (!(evaluate_lasso(a, w) < top))
    throw InternalError("dsum constant-check witness failed re-evaluation");
  v.lasso_witness = std::move(w);
  return v;
}

Verdict is_constant_limavg(const Automaton& a) {
  if (!is_limit_average(a.valfn().tag))
    throw ValidationError("is_constant_limavg expects a limit-average automaton");
  Verdict v;
  v.question = Question::Constant;

  Automaton c = restrict_reachable(collapse_parallel_max(a));
  TopResult top = top_value(c);
  v.value = top.value;
  v.method.push_back("top value = maximal reachable mean cycle");

  // opposite automaton of (weights - top): weight becomes top - x, resolved by inf
  WeightedGraph g = automaton_graph(c);
  for (auto& e : g.edges) e.weight = top.value - e.weight;
  if (detect_negative_cycle(g))
    throw InternalError("limit-average pipeline: negative cycle after normalization");
  ReweightResult rw = johnson_reweight(g);
  v.method.push_back("subtract top, negate, Johnson reweighting");

  DistanceAutomaton dist;
  dist.alphabet = c.alphabet();
  dist.state_names = c.state_names();
  dist.initials = {c.initial()};
  for (int q = 0; q < c.num_states(); q++) dist.accepting.push_back(q);
  for (size_t i = 0; i < g.edges.size(); i++) {
    const Transition& t = c.transitions()[g.edges[i].tag];
    dist.trans.push_back({t.src, t.letter, t.dst, rw.gamma_prime[i] > Rational(0) ? 1 : 0});
  }
  v.method.push_back("binarized distance automaton; stabilization-monoid limitedness");

  if (is_limited(dist)) {
    v.answer = true;
    return v;
  }
  UnlimitedWitness uw = unlimited_witness(dist);
  if (!(evaluate_lasso(a, uw.word) < top.value))
    throw InternalError("limit-average constant-check witness failed re-evaluation");
  v.answer = false;
  v.lasso_witness = uw.word;
  return v;
}

Verdict is_constant(const Automaton& a) {
  ValFn tag = a.valfn().tag;
  if (tag == ValFn::DSum) return is_constant_dsum(a);
  if (is_limit_average(tag)) return is_constant_limavg(a);

  Verdict v;
  v.question = Question::Constant;
  TopResult top = top_value(a);
  v.value = top.value;
  v.method.push_back("constant iff the top-threshold language is universal");

  OmegaAutomaton thr = threshold_automaton(a, top.value);
  ContainResult r = contains(thr, universal_omega(a.alphabet()));
  if (r.contained) {
    v.answer = true;
    return v;
  }
  if (!(evaluate_lasso(a, *r.counterexample) < top.value))
    throw InternalError("constant-check witness failed re-evaluation");
  v.answer = false;
  v.lasso_witness = r.counterexample;
  return v;
}

Verdict is_safe(const Automaton& a) {
  ValFn tag = a.valfn().tag;
  Verdict v;
  v.question = Question::Safe;

  if (tag == ValFn::Inf || tag == ValFn::DSum) {
    v.answer = true;
    v.method.push_back("the value function is safe; closure equals the automaton");
    return v;
  }

  ClosureArtifact art = safety_closure_inf(a);

  if (tag == ValFn::Sup || tag == ValFn::LimInf || tag == ValFn::LimSup) {
    std::vector<Rational> thresholds = a.weight_values();
    for (const Rational& w : art.closure.weight_values()) thresholds.push_back(w);
    std::sort(thresholds.begin(), thresholds.end());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
    std::reverse(thresholds.begin(), thresholds.end());
    v.method.push_back("per-threshold containment of the closure in the automaton");
    for (const Rational& t : thresholds) {
      OmegaAutomaton outer = threshold_automaton(a, t);
      OmegaAutomaton inner = threshold_automaton(art.closure, t);
      ContainResult r = contains(outer, inner);
      if (r.contained) continue;
      const LassoWord& w = *r.counterexample;
      if (!(evaluate_lasso(art.closure, w) > evaluate_lasso(a, w)))
        throw InternalError("safety counterexample failed re-evaluation");
      v.answer = false;
      v.lasso_witness = w;
      return v;
    }
    v.answer = true;
    return v;
  }

  // limit average: compare against the determinized closure via a difference
  // automaton that must express the constant 0
  Automaton det = determinize_inf(art.closure);
  Automaton b = det.with_valfn(a.valfn().tag == ValFn::LimInfAvg
                                   ? ValueFunction{ValFn::LimInfAvg, std::nullopt}
                                   : ValueFunction{ValFn::LimSupAvg, std::nullopt});
  v.method.push_back("determinized Inf-closure reinterpreted under the value function");

  Automaton c = collapse_parallel_max(a);
  auto bout = b.transitions();
  std::vector<std::vector<int>> bindex((size_t)b.num_states() * b.num_letters());
  for (int i = 0; i < (int)bout.size(); i++)
    bindex[(size_t)bout[i].src * b.num_letters() + bout[i].letter].push_back(i);

  std::map<std::pair<int, int>, int> id;
  std::vector<std::pair<int, int>> nodes;
  auto intern = [&](int qa, int qb) {
    auto it = id.find({qa, qb});
    if (it != id.end()) return it->second;
    int x = (int)nodes.size();
    id.emplace(std::make_pair(qa, qb), x);
    nodes.emplace_back(qa, qb);
    return x;
  };
  int start = intern(c.initial(), b.initial());
  std::deque<int> queue{start};
  std::vector<Transition> ts;
  while (!queue.empty()) {
    int x = queue.front();
    queue.pop_front();
    auto [qa, qb] = nodes[x];
    for (int s = 0; s < c.num_letters(); s++) {
      const auto& bts = bindex[(size_t)qb * b.num_letters() + s];
      if (bts.size() != 1) throw InternalError("determinized closure is not deterministic");
      const Transition& tb = bout[bts[0]];
      for (int ti : c.out(qa, s)) {
        const Transition& ta = c.transitions()[ti];
        size_t before = nodes.size();
        int y = intern(ta.dst, tb.dst);
        if ((size_t)y == before) queue.push_back(y);
        ts.push_back({x, s, ta.weight - tb.weight, y});
      }
    }
  }
  std::vector<std::string> names;
  for (auto& [qa, qb] : nodes)
    names.push_back(c.state_names()[qa] + "*" + b.state_names()[qb]);
  Automaton diff(c.alphabet(), std::move(names), start, std::move(ts), b.valfn());
  v.method.push_back("difference automaton against the closure");

  if (top_value(diff).value != Rational(0))
    throw InternalError("difference automaton has nonzero top value");

  Verdict inner = is_constant_limavg(diff);
  if (inner.answer) {
    v.answer = true;
    return v;
  }
  const LassoWord& w = *inner.lasso_witness;
  if (!(evaluate_lasso(art.closure, w) > evaluate_lasso(a, w)))
    throw InternalError("limit-average safety counterexample failed re-evaluation");
  v.answer = false;
  v.lasso_witness = w;
  return v;
}

Verdict is_live(const Automaton& a) {
  ValFn tag = a.valfn().tag;
  Verdict v;
  v.question = Question::Live;

  if (tag == ValFn::DSum) {
    Verdict c = is_constant_dsum(a);
    v.value = c.value;
    v.method = c.method;
    v.method.push_back("dsum liveness = constancy at the top value");
    v.answer = c.answer;
    if (!c.answer) {
      const std::vector<int>& u = *c.prefix_witness;
      // sup over continuations after u must sit strictly below the top
      Automaton col = collapse_parallel_max(a);
      TopValueTable tops = state_top_values(col);
      auto pref = dsum_prefix_values(col, u);
      Rational lp = a.valfn().discount->pow((unsigned long)u.size());
      std::optional<Rational> best;
      for (int q = 0; q < col.num_states(); q++) {
        if (!pref[q]) continue;
        Rational val = *pref[q] + lp * tops.theta[q];
        if (!best || val > *best) best = val;
      }
      if (!best || !(*best < *c.value))
        throw InternalError("dsum liveness witness failed re-evaluation");
      v.prefix_witness = u;
    }
    return v;
  }

  // Inf: the closure is the automaton itself; otherwise work on the
  // Inf-form closure. Either way, live iff the top-restricted safety
  // automaton is universal (subset construction).
  std::optional<ClosureArtifact> art;
  Automaton base = collapse_parallel_max(a);
  TopValueTable tops;
  if (tag == ValFn::Inf) {
    tops = state_top_values(base);
  } else {
    art = safety_closure_inf(a);
    base = *art->base;
    tops = art->tops;
  }
  Rational top_v = tops.theta[base.initial()];
  v.value = top_v;
  v.method.push_back("subset universality of the top-restricted safety closure");

  // restricted graph: transitions whose (closure) weight reaches the top
  const Automaton& wsrc = tag == ValFn::Inf ? base : art->closure;
  std::vector<std::vector<std::pair<int, int>>> restricted(
      (size_t)base.num_states() * base.num_letters());
  for (const Transition& t : wsrc.transitions())
    if (t.weight >= top_v)
      restricted[(size_t)t.src * base.num_letters() + t.letter].push_back({t.dst, 0});

  std::set<std::vector<int>> seen;
  struct Node {
    std::vector<int> set;
    int parent;
    int letter;
  };
  std::vector<Node> nodes{{{base.initial()}, -1, -1}};
  seen.insert(nodes[0].set);
  std::deque<int> queue{0};
  std::optional<std::vector<int>> witness;
  while (!queue.empty() && !witness) {
    int ni = queue.front();
    queue.pop_front();
    for (int s = 0; s < base.num_letters() && !witness; s++) {
      std::set<int> nxt;
      for (int q : nodes[ni].set)
        for (auto [dst, _] : restricted[(size_t)q * base.num_letters() + s]) nxt.insert(dst);
      if (nxt.empty()) {
        std::vector<int> word{s};
        for (int cur = ni; nodes[cur].parent != -1; cur = nodes[cur].parent)
          word.push_back(nodes[cur].letter);
        std::reverse(word.begin(), word.end());
        witness = std::move(word);
        break;
      }
      std::vector<int> key(nxt.begin(), nxt.end());
      if (seen.insert(key).second) {
        nodes.push_back({std::move(key), ni, s});
        queue.push_back((int)nodes.size() - 1);
      }
    }
  }

  if (!witness) {
    v.answer = true;
    return v;
  }
  v.answer = false;
  v.prefix_witness = witness;
  // re-verify: after the prefix, the best reachable continuation stays low
  if (tag == ValFn::Inf) {
    auto mins = inf_prefix_mins(base, *witness);
    std::optional<Rational> best;
    for (int q = 0; q < base.num_states(); q++) {
      if (!mins[q]) continue;
      Rational val = min(*mins[q], tops.theta[q]);
      if (!best || val > *best) best = val;
    }
    if (!best || !(*best < top_v))
      throw InternalError("liveness witness failed re-evaluation (inf)");
  } else {
    std::vector<char> reach = reach_set_on_word(base, *witness);
    std::optional<Rational> best;
    for (int q = 0; q < base.num_states(); q++) {
      if (!reach[q]) continue;
      if (!best || tops.theta[q] > *best) best = tops.theta[q];
    }
    if (!best || !(*best < top_v))
      throw InternalError("liveness witness failed re-evaluation");
  }
  return v;
}

bool crosscheck_safety_thresholds(const Automaton& a) {
  if (!is_finite_valued(a.valfn().tag))
    throw ValidationError("threshold cross-check requires a finite-valued value function");
  for (const Rational& w : a.weight_values()) {
    SafetyLanguageResult r = is_safety_language(threshold_automaton(a, w));
    if (!r.is_safety) return false;
  }
  return true;
}

bool crosscheck_liveness_thresholds(const Automaton& a) {
  if (!is_finite_valued(a.valfn().tag))
    throw ValidationError("threshold cross-check requires a finite-valued value function");
  Rational top = top_value(a).value;
  for (const Rational& w : a.weight_values()) {
    if (w > top) continue;
    if (!boolean_live(threshold_automaton(a, w))) return false;
  }
  return true;
}

}  // namespace quantsafe
