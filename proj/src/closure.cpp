#include "quantsafe/closure.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

namespace quantsafe {

Rational ClosureArtifact::top() const {
  if (kind == ClosureKind::Identity) return top_value(closure).value;
  return tops.theta[base->initial()];
}

ClosureArtifact safety_closure_inf(const Automaton& a) {
  ValFn tag = a.valfn().tag;
  if (tag == ValFn::Inf || tag == ValFn::DSum)
    return {a, ClosureKind::Identity, std::nullopt, {}};

  Automaton base = tag == ValFn::Sup ? monotone_form(a, ValFn::LimSup) : collapse_parallel_max(a);
  TopValueTable tops = state_top_values(base);

  std::set<std::tuple<int, int, int>> seen;
  std::vector<Transition> ts;
  for (const Transition& t : base.transitions()) {
    auto key = std::make_tuple(t.src, t.letter, t.dst);
    if (!seen.insert(key).second) continue;
    ts.push_back({t.src, t.letter, tops.theta[t.dst], t.dst});
  }
  ValueFunction vf;
  vf.tag = ValFn::Inf;
  Automaton closure(base.alphabet(), base.state_names(), base.initial(), std::move(ts), vf);
  return {std::move(closure), ClosureKind::InfForm, std::move(base), std::move(tops)};
}

ClosureArtifact safety_closure_val(const Automaton& a) {
  ValFn tag = a.valfn().tag;
  if (tag != ValFn::LimInf && tag != ValFn::LimSup && !is_limit_average(tag))
    throw ValidationError("safety_closure_val expects LimInf/LimSup/LimInfAvg/LimSupAvg");
  ClosureArtifact art = safety_closure_inf(a);
  ValueFunction vf;
  vf.tag = tag;
  art.closure = art.closure.with_valfn(vf);
  art.kind = ClosureKind::ValForm;
  return art;
}

namespace {

// mapping state -> best running min; -1 entry = absent, top sentinel = "no
// weight read yet" (only in the initial mapping)
struct InfMapping {
  std::vector<int> entry;  // index into the weight table, -1 absent, W = sentinel

  bool operator<(const InfMapping& o) const { return entry < o.entry; }
};

}  // namespace

Automaton determinize_inf(const Automaton& a_in) {
  if (a_in.valfn().tag != ValFn::Inf)
    throw ValidationError("determinize_inf expects an Inf automaton");
  Automaton a = collapse_parallel_max(a_in);
  std::vector<Rational> weights = a.weight_values();
  int wcount = (int)weights.size();
  int sentinel = wcount;  // greater than every weight
  int n = a.num_states();
  int k = a.num_letters();

  std::map<InfMapping, int> id;
  std::vector<InfMapping> nodes;
  auto intern = [&](InfMapping m) {
    auto it = id.find(m);
    if (it != id.end()) return it->second;
    int v = (int)nodes.size();
    id.emplace(m, v);
    nodes.push_back(std::move(m));
    return v;
  };

  InfMapping start;
  start.entry.assign(n, -1);
  start.entry[a.initial()] = sentinel;
  int start_id = intern(start);

  std::vector<Transition> ts;
  std::vector<std::string> names;
  std::deque<int> queue{start_id};
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (int s = 0; s < k; s++) {
      InfMapping nxt;
      nxt.entry.assign(n, -1);
      for (int q = 0; q < n; q++) {
        int e = nodes[v].entry[q];
        if (e == -1) continue;
        for (int ti : a.out(q, s)) {
          const Transition& t = a.transitions()[ti];
          int wi = (int)(std::lower_bound(weights.begin(), weights.end(), t.weight) -
                         weights.begin());
          int run_min = std::min(e, wi);
          if (run_min > nxt.entry[t.dst]) nxt.entry[t.dst] = run_min;
        }
      }
      int best = -1;
      for (int q = 0; q < n; q++) best = std::max(best, nxt.entry[q]);
      if (best < 0) throw ValidationError("internal: total automaton produced an empty mapping");
      // the sentinel never survives a transition: weights are real after one step
      size_t before = nodes.size();
      int u = intern(std::move(nxt));
      if ((size_t)u == before) queue.push_back(u);
      ts.push_back({v, s, weights[best], u});
    }
  }
  for (size_t i = 0; i < nodes.size(); i++) names.push_back("m" + std::to_string(i));
  ValueFunction vf;
  vf.tag = ValFn::Inf;
  return Automaton(a.alphabet(), std::move(names), start_id, std::move(ts), vf);
}

}  // namespace quantsafe
