#include "quantsafe/eval.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <map>
#include <optional>

namespace quantsafe {

namespace {

struct EvalError : ValidationError {
  using ValidationError::ValidationError;
};

}  // namespace

Automaton collapse_parallel_max(const Automaton& a) {
  std::map<std::tuple<int, int, int>, Rational> best;
  for (const Transition& t : a.transitions()) {
    auto key = std::make_tuple(t.src, t.letter, t.dst);
    auto it = best.find(key);
    if (it == best.end() || t.weight > it->second)
      best.insert_or_assign(key, t.weight);
  }
  std::vector<Transition> ts;
  ts.reserve(best.size());
  for (const auto& [key, w] : best)
    ts.push_back({std::get<0>(key), std::get<1>(key), w, std::get<2>(key)});
  return a.with_transitions(std::move(ts));
}

WeightedGraph automaton_graph(const Automaton& a) {
  WeightedGraph g;
  g.n = a.num_states();
  g.edges.reserve(a.transitions().size());
  for (int i = 0; i < (int)a.transitions().size(); i++) {
    const Transition& t = a.transitions()[i];
    g.edges.push_back({t.src, t.dst, t.weight, i});
  }
  return g;
}

namespace {

Automaton restrict_to_reachable(const Automaton& a) {
  std::vector<int> map(a.num_states(), -1);
  std::vector<int> order;
  std::deque<int> queue{a.initial()};
  map[a.initial()] = 0;
  order.push_back(a.initial());
  while (!queue.empty()) {
    int q = queue.front();
    queue.pop_front();
    for (int s = 0; s < a.num_letters(); s++)
      for (int ti : a.out(q, s)) {
        int d = a.transitions()[ti].dst;
        if (map[d] == -1) {
          map[d] = (int)order.size();
          order.push_back(d);
          queue.push_back(d);
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

}  // namespace

MonotoneGrid monotone_grid(const Automaton& a_in, ValFn target) {
  ValFn src = a_in.valfn().tag;
  if (src != ValFn::Inf && src != ValFn::Sup)
    throw ValidationError("monotone_form expects an Inf or Sup automaton");
  bool ok = (src == ValFn::Sup && (target == ValFn::Sup || target == ValFn::LimInf ||
                                   target == ValFn::LimSup)) ||
            (src == ValFn::Inf && (target == ValFn::Inf || target == ValFn::LimInf ||
                                   target == ValFn::LimSup));
  if (!ok) throw ValidationError("monotone_form target must keep the extremal direction");

  Automaton a = collapse_parallel_max(a_in);
  bool maxdir = src == ValFn::Sup;
  std::vector<Rational> mem = a.weight_values();
  int mc = (int)mem.size();
  int neutral = maxdir ? 0 : mc - 1;

  std::vector<std::string> names;
  names.reserve((size_t)a.num_states() * mc);
  for (int q = 0; q < a.num_states(); q++)
    for (int m = 0; m < mc; m++) names.push_back(a.state_names()[q] + "@" + mem[m].str());

  std::vector<Transition> ts;
  for (const Transition& t : a.transitions()) {
    int wi = (int)(std::lower_bound(mem.begin(), mem.end(), t.weight) - mem.begin());
    for (int m = 0; m < mc; m++) {
      int nm = maxdir ? std::max(m, wi) : std::min(m, wi);
      ts.push_back({t.src * mc + m, t.letter, mem[nm], t.dst * mc + nm});
    }
  }
  ValueFunction vf;
  vf.tag = target;
  std::vector<Rational> memory;
  memory.reserve((size_t)a.num_states() * mc);
  for (int q = 0; q < a.num_states(); q++)
    for (int m = 0; m < mc; m++) memory.push_back(mem[m]);
  return MonotoneGrid{
      Automaton(a.alphabet(), std::move(names), a.initial() * mc + neutral, std::move(ts), vf),
      std::move(memory), mc, neutral};
}

Automaton monotone_form(const Automaton& a, ValFn target) {
  return restrict_to_reachable(monotone_grid(a, target).aut);
}

namespace {

// ---- lasso product ------------------------------------------------------

struct LassoProduct {
  int total = 0;           // positions
  std::vector<int> qof, posof;  // dense node -> (state, position)
  WeightedGraph g;         // edges among dense nodes, tag = transition index
  int start = 0;
};

LassoProduct build_lasso_product(const Automaton& a, const LassoWord& w) {
  LassoProduct p;
  p.total = w.total_len();
  std::map<std::pair<int, int>, int> id;
  auto intern = [&](int q, int pos) {
    auto it = id.find({q, pos});
    if (it != id.end()) return it->second;
    int v = (int)p.qof.size();
    id.emplace(std::make_pair(q, pos), v);
    p.qof.push_back(q);
    p.posof.push_back(pos);
    return v;
  };
  p.start = intern(a.initial(), 0);
  std::deque<int> queue{p.start};
  std::vector<char> seen{1};
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    int q = p.qof[v], pos = p.posof[v];
    int letter = w.letter_at(pos);
    int npos = w.next_pos(pos);
    for (int ti : a.out(q, letter)) {
      const Transition& t = a.transitions()[ti];
      size_t before = p.qof.size();
      int u = intern(t.dst, npos);
      if ((size_t)u == before) {
        seen.push_back(1);
        queue.push_back(u);
      }
      p.g.edges.push_back({v, u, t.weight, ti});
    }
  }
  p.g.n = (int)p.qof.size();
  return p;
}

Rational limsup_best(const WeightedGraph& g) {
  SccResult s = sccs(g);
  std::optional<Rational> best;
  for (const auto& e : g.edges)
    if (s.comp_of[e.src] == s.comp_of[e.dst] && !s.trivial[s.comp_of[e.src]])
      if (!best || e.weight > *best) best = e.weight;
  if (!best) throw EvalError("internal: no cycle in a total product");
  return *best;
}

bool has_cycle(const WeightedGraph& g) {
  SccResult s = sccs(g);
  for (bool t : s.trivial)
    if (!t) return true;
  return false;
}

Rational liminf_best(const WeightedGraph& g, const std::vector<Rational>& weights_desc) {
  for (const Rational& v : weights_desc) {
    WeightedGraph sub;
    sub.n = g.n;
    for (const auto& e : g.edges)
      if (e.weight >= v) sub.edges.push_back(e);
    if (has_cycle(sub)) return v;
  }
  throw EvalError("internal: no cycle in a total product");
}

}  // namespace

DsumSolution dsum_policy_iteration(const WeightedGraph& g, const Rational& lambda) {
  int n = g.n;
  std::vector<std::vector<int>> adj(n);
  for (int i = 0; i < (int)g.edges.size(); i++) adj[g.edges[i].src].push_back(i);
  for (int v = 0; v < n; v++)
    if (adj[v].empty()) throw EvalError("internal: dsum policy iteration on a non-total graph");

  DsumSolution sol;
  sol.policy_edge.assign(n, -1);
  for (int v = 0; v < n; v++) {
    int best = adj[v][0];
    for (int ei : adj[v])
      if (g.edges[ei].weight > g.edges[best].weight) best = ei;
    sol.policy_edge[v] = best;
  }

  auto evaluate = [&]() {
    sol.value.assign(n, Rational(0));
    std::vector<int> state(n, 0);  // 0 new, 1 on walk, 2 done
    for (int v0 = 0; v0 < n; v0++) {
      if (state[v0] == 2) continue;
      std::vector<int> walk;
      int v = v0;
      while (state[v] == 0) {
        state[v] = 1;
        walk.push_back(v);
        v = g.edges[sol.policy_edge[v]].dst;
      }
      if (state[v] == 1) {
        // closed a fresh cycle at v: solve it exactly
        size_t k = 0;
        while (walk[k] != v) k++;
        Rational num(0), pw(1);
        int len = 0;
        for (size_t i = k; i < walk.size(); i++) {
          num += pw * g.edges[sol.policy_edge[walk[i]]].weight;
          pw = pw * lambda;
          len++;
        }
        Rational cycle_val = num / (Rational(1) - lambda.pow((unsigned long)len));
        sol.value[v] = cycle_val;
        state[v] = 2;
        // remaining cycle nodes, walking backwards
        for (size_t i = walk.size(); i-- > k + 1;) {
          int u = walk[i];
          sol.value[u] = g.edges[sol.policy_edge[u]].weight + lambda * sol.value[g.edges[sol.policy_edge[u]].dst];
          state[u] = 2;
        }
        // recompute v from its successor for consistency of the tail below
        for (size_t i = k + 1; i-- > 0;) {
          int u = walk[i];
          if (state[u] == 2) continue;
          sol.value[u] = g.edges[sol.policy_edge[u]].weight + lambda * sol.value[g.edges[sol.policy_edge[u]].dst];
          state[u] = 2;
        }
      } else {
        for (size_t i = walk.size(); i-- > 0;) {
          int u = walk[i];
          sol.value[u] = g.edges[sol.policy_edge[u]].weight + lambda * sol.value[g.edges[sol.policy_edge[u]].dst];
          state[u] = 2;
        }
      }
    }
  };

  long guard = (long)(g.edges.size() + 2) * (n + 2) * 4 + 64;
  while (guard-- > 0) {
    evaluate();
    bool improved = false;
    for (int v = 0; v < n; v++) {
      int best = sol.policy_edge[v];
      Rational bestval = g.edges[best].weight + lambda * sol.value[g.edges[best].dst];
      for (int ei : adj[v]) {
        Rational cand = g.edges[ei].weight + lambda * sol.value[g.edges[ei].dst];
        if (cand > bestval) {
          best = ei;
          bestval = cand;
        }
      }
      if (bestval > sol.value[v]) {
        sol.policy_edge[v] = best;
        improved = true;
      }
    }
    if (!improved) {
      // optimality equations hold exactly
      for (int v = 0; v < n; v++) {
        Rational m = sol.value[v];
        for (int ei : adj[v]) {
          Rational cand = g.edges[ei].weight + lambda * sol.value[g.edges[ei].dst];
          assert(cand <= m);
        }
        assert(g.edges[sol.policy_edge[v]].weight + lambda * sol.value[g.edges[sol.policy_edge[v]].dst] == m);
      }
      return sol;
    }
  }
  throw EvalError("internal: policy iteration failed to converge");
}

Rational evaluate_lasso(const Automaton& a, const LassoWord& w) {
  check_lasso_alphabet(a, w);
  switch (a.valfn().tag) {
    case ValFn::Inf:
      return evaluate_lasso(monotone_form(a, ValFn::LimInf), w);
    case ValFn::Sup:
      return evaluate_lasso(monotone_form(a, ValFn::LimSup), w);
    default:
      break;
  }
  Automaton c = collapse_parallel_max(a);
  LassoProduct p = build_lasso_product(c, w);
  switch (c.valfn().tag) {
    case ValFn::LimSup:
      return limsup_best(p.g);
    case ValFn::LimInf: {
      std::vector<Rational> ws = c.weight_values();
      std::reverse(ws.begin(), ws.end());
      return liminf_best(p.g, ws);
    }
    case ValFn::LimInfAvg:
    case ValFn::LimSupAvg: {
      auto mc = max_mean_cycle(p.g);
      if (!mc) throw EvalError("internal: no cycle in a total product");
      return mc->mean;
    }
    case ValFn::DSum:
      return dsum_policy_iteration(p.g, *c.valfn().discount).value[p.start];
    default:
      throw EvalError("unreachable");
  }
}

// ---- per-state top values ------------------------------------------------

namespace {

// Deterministic BFS path (edge ids) from src to dst, preferring small letters.
// `allowed` filters edges; empty path when src == dst and allow_empty.
std::optional<std::vector<int>> bfs_path(const Automaton& a, const WeightedGraph& g, int src,
                                         int dst, const std::vector<char>& edge_ok,
                                         bool want_cycle) {
  std::vector<std::vector<int>> adj(g.n);
  std::vector<int> order((size_t)g.edges.size());
  for (size_t i = 0; i < g.edges.size(); i++) order[i] = (int)i;
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
    int lx = a.transitions()[g.edges[x].tag].letter;
    int ly = a.transitions()[g.edges[y].tag].letter;
    if (lx != ly) return lx < ly;
    return g.edges[x].dst < g.edges[y].dst;
  });
  for (int ei : order)
    if (edge_ok.empty() || edge_ok[ei]) adj[g.edges[ei].src].push_back(ei);

  if (src == dst && !want_cycle) return std::vector<int>{};
  std::vector<int> via(g.n, -1);
  std::vector<char> seen(g.n, 0);
  std::deque<int> queue;
  // expand src's edges first so cycles back to src are found
  for (int ei : adj[src]) {
    int v = g.edges[ei].dst;
    if (v == dst) return std::vector<int>{ei};
    if (!seen[v]) {
      seen[v] = 1;
      via[v] = ei;
      queue.push_back(v);
    }
  }
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (int ei : adj[v]) {
      int u = g.edges[ei].dst;
      if (u == dst) {
        std::vector<int> path{ei};
        int x = v;
        while (x != src) {
          path.push_back(via[x]);
          x = g.edges[via[x]].src;
        }
        std::reverse(path.begin(), path.end());
        return path;
      }
      if (!seen[u]) {
        seen[u] = 1;
        via[u] = ei;
        queue.push_back(u);
      }
    }
  }
  return std::nullopt;
}

std::vector<int> letters_of(const Automaton& a, const WeightedGraph& g,
                            const std::vector<int>& edge_ids) {
  std::vector<int> ls;
  ls.reserve(edge_ids.size());
  for (int ei : edge_ids) ls.push_back(a.transitions()[g.edges[ei].tag].letter);
  return ls;
}

struct CompDp {
  std::vector<std::optional<Rational>> own;    // per component: best cycle value inside
  std::vector<std::optional<Rational>> best;   // including reachable components
  std::vector<int> choice;                     // -1: realized here; else successor comp
};

// Reverse-topological DP over the condensation: best value reachable from
// each component, combining per-component cycle values.
CompDp condensation_dp(const WeightedGraph& g, const SccResult& scc,
                       const std::vector<std::optional<Rational>>& own) {
  CompDp dp;
  dp.own = own;
  size_t k = scc.components.size();
  dp.best.assign(k, std::nullopt);
  dp.choice.assign(k, -1);
  for (size_t c = 0; c < k; c++) {
    dp.best[c] = own[c];
    dp.choice[c] = -1;
  }
  for (size_t c = 0; c < k; c++) {
    for (const auto& e : g.edges) {
      if (scc.comp_of[e.src] != (int)c) continue;
      int c2 = scc.comp_of[e.dst];
      if (c2 == (int)c) continue;
      if (dp.best[c2] && (!dp.best[c] || *dp.best[c2] > *dp.best[c])) {
        dp.best[c] = dp.best[c2];
        dp.choice[c] = c2;
      }
    }
  }
  return dp;
}

struct TopAnalysis {
  const Automaton& a;   // collapsed
  WeightedGraph g;
  SccResult scc;

  explicit TopAnalysis(const Automaton& a) : a(a), g(automaton_graph(a)), scc(sccs(g)) {}

  // follow DP choices to the component realizing best[comp_of[q]]
  int realizing_comp(const CompDp& dp, int q) const {
    int c = scc.comp_of[q];
    while (dp.choice[c] != -1) c = dp.choice[c];
    return c;
  }
};

}  // namespace

TopValueTable state_top_values(const Automaton& a_in) {
  ValFn tag = a_in.valfn().tag;

  if (tag == ValFn::Inf || tag == ValFn::Sup) {
    // One grid product shared by all source states; theta_q is the grid top
    // at (q, neutral memory).
    ValFn target = tag == ValFn::Sup ? ValFn::LimSup : ValFn::LimInf;
    MonotoneGrid grid = monotone_grid(a_in, target);
    TopValueTable inner = state_top_values(grid.aut);
    TopValueTable out;
    for (int q = 0; q < a_in.num_states(); q++) {
      int node = grid.node(q, grid.neutral);
      out.theta.push_back(inner.theta[node]);
      out.witness.push_back(inner.witness[node]);
      Rational check = evaluate_lasso(reroot(a_in, q), out.witness.back());
      if (check != out.theta.back())
        throw EvalError("internal: monotone top witness failed re-evaluation");
    }
    return out;
  }

  Automaton a = collapse_parallel_max(a_in);
  TopAnalysis t(a);
  TopValueTable out;
  int n = a.num_states();

  if (tag == ValFn::DSum) {
    DsumSolution sol = dsum_policy_iteration(t.g, *a.valfn().discount);
    for (int q = 0; q < n; q++) {
      // follow the optimal policy until it closes its cycle
      std::vector<int> tail;
      std::vector<int> seen(n, -1);
      int v = q;
      while (seen[v] == -1) {
        seen[v] = (int)tail.size();
        tail.push_back(sol.policy_edge[v]);
        v = t.g.edges[sol.policy_edge[v]].dst;
      }
      int cut = seen[v];
      std::vector<int> prefix_edges(tail.begin(), tail.begin() + cut);
      std::vector<int> loop_edges(tail.begin() + cut, tail.end());
      LassoWord w(letters_of(a, t.g, prefix_edges), letters_of(a, t.g, loop_edges));
      out.theta.push_back(sol.value[q]);
      out.witness.push_back(w);
      if (evaluate_lasso(reroot(a_in, q), w) != sol.value[q])
        throw EvalError("internal: dsum top witness failed re-evaluation");
    }
    return out;
  }

  if (tag == ValFn::LimSup) {
    size_t k = t.scc.components.size();
    std::vector<std::optional<Rational>> own(k);
    std::vector<int> own_edge(k, -1);
    for (int ei = 0; ei < (int)t.g.edges.size(); ei++) {
      const auto& e = t.g.edges[ei];
      int c = t.scc.comp_of[e.src];
      if (t.scc.comp_of[e.dst] != c || t.scc.trivial[c]) continue;
      if (!own[c] || e.weight > *own[c]) {
        own[c] = e.weight;
        own_edge[c] = ei;
      }
    }
    CompDp dp = condensation_dp(t.g, t.scc, own);
    for (int q = 0; q < n; q++) {
      if (!dp.best[t.scc.comp_of[q]]) throw EvalError("internal: no reachable cycle");
      int c = t.realizing_comp(dp, q);
      int e_star = own_edge[c];
      std::vector<char> comp_only(t.g.edges.size(), 0);
      for (int ei = 0; ei < (int)t.g.edges.size(); ei++)
        comp_only[ei] = t.scc.comp_of[t.g.edges[ei].src] == c && t.scc.comp_of[t.g.edges[ei].dst] == c;
      auto pre = bfs_path(a, t.g, q, t.g.edges[e_star].src, {}, false);
      auto back = bfs_path(a, t.g, t.g.edges[e_star].dst, t.g.edges[e_star].src, comp_only, true);
      if (!pre || !back) throw EvalError("internal: witness path extraction failed");
      std::vector<int> loop_edges{e_star};
      loop_edges.insert(loop_edges.end(), back->begin(), back->end());
      LassoWord w(letters_of(a, t.g, *pre), letters_of(a, t.g, loop_edges));
      out.theta.push_back(*dp.best[t.scc.comp_of[q]]);
      out.witness.push_back(w);
      if (evaluate_lasso(reroot(a_in, q), w) != out.theta.back())
        throw EvalError("internal: limsup top witness failed re-evaluation");
    }
    return out;
  }

  if (tag == ValFn::LimInf) {
    std::vector<Rational> ws = a.weight_values();
    std::reverse(ws.begin(), ws.end());  // descending
    std::vector<std::optional<Rational>> theta(n);
    std::vector<LassoWord> wit(n);
    for (const Rational& v : ws) {
      WeightedGraph sub;
      sub.n = t.g.n;
      std::vector<int> sub_edge_ids;
      for (int ei = 0; ei < (int)t.g.edges.size(); ei++)
        if (t.g.edges[ei].weight >= v) {
          sub.edges.push_back(t.g.edges[ei]);
          sub_edge_ids.push_back(ei);
        }
      SccResult ss = sccs(sub);
      std::vector<char> cyc_node(t.g.n, 0);
      for (size_t c = 0; c < ss.components.size(); c++)
        if (!ss.trivial[c])
          for (int u : ss.components[c]) cyc_node[u] = 1;
      // reverse reachability over the full graph
      std::vector<std::vector<int>> radj(t.g.n);
      for (const auto& e : t.g.edges) radj[e.dst].push_back(e.src);
      std::deque<int> queue;
      std::vector<char> can(t.g.n, 0);
      for (int u = 0; u < t.g.n; u++)
        if (cyc_node[u]) {
          can[u] = 1;
          queue.push_back(u);
        }
      while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        for (int p : radj[u])
          if (!can[p]) {
            can[p] = 1;
            queue.push_back(p);
          }
      }
      std::vector<char> restricted(t.g.edges.size(), 0);
      for (int ei : sub_edge_ids) restricted[ei] = 1;
      for (int q = 0; q < n; q++) {
        if (theta[q] || !can[q]) continue;
        theta[q] = v;
        // prefix: any path to a restricted-cycle node; loop: restricted cycle
        int target = -1;
        std::optional<std::vector<int>> pre;
        for (int u = 0; u < t.g.n && target == -1; u++) {
          if (!cyc_node[u]) continue;
          auto p = bfs_path(a, t.g, q, u, {}, false);
          if (p) {
            target = u;
            pre = p;
          }
        }
        auto loop = bfs_path(a, t.g, target, target, restricted, true);
        if (!pre || !loop) throw EvalError("internal: liminf witness extraction failed");
        wit[q] = LassoWord(letters_of(a, t.g, *pre), letters_of(a, t.g, *loop));
      }
    }
    for (int q = 0; q < n; q++) {
      if (!theta[q]) throw EvalError("internal: no reachable cycle");
      out.theta.push_back(*theta[q]);
      out.witness.push_back(wit[q]);
      if (evaluate_lasso(reroot(a_in, q), wit[q]) != *theta[q])
        throw EvalError("internal: liminf top witness failed re-evaluation");
    }
    return out;
  }

  // limit average
  size_t k = t.scc.components.size();
  std::vector<std::optional<Rational>> own(k);
  std::vector<std::vector<int>> own_cycle(k);
  for (size_t c = 0; c < k; c++) {
    if (t.scc.trivial[c]) continue;
    WeightedGraph sub;
    sub.n = t.g.n;
    std::vector<int> ids;
    for (int ei = 0; ei < (int)t.g.edges.size(); ei++)
      if (t.scc.comp_of[t.g.edges[ei].src] == (int)c && t.scc.comp_of[t.g.edges[ei].dst] == (int)c) {
        sub.edges.push_back(t.g.edges[ei]);
        ids.push_back(ei);
      }
    auto mc = max_mean_cycle(sub);
    if (!mc) continue;
    own[c] = mc->mean;
    for (int ei : mc->edge_ids) own_cycle[c].push_back(ids[ei]);
  }
  CompDp dp = condensation_dp(t.g, t.scc, own);
  for (int q = 0; q < n; q++) {
    if (!dp.best[t.scc.comp_of[q]]) throw EvalError("internal: no reachable cycle");
    int c = t.realizing_comp(dp, q);
    const std::vector<int>& cyc = own_cycle[c];
    int entry = t.g.edges[cyc[0]].src;
    auto pre = bfs_path(a, t.g, q, entry, {}, false);
    if (!pre) throw EvalError("internal: witness path extraction failed");
    LassoWord w(letters_of(a, t.g, *pre), letters_of(a, t.g, cyc));
    out.theta.push_back(*dp.best[t.scc.comp_of[q]]);
    out.witness.push_back(w);
    if (evaluate_lasso(reroot(a_in, q), w) != out.theta.back())
      throw EvalError("internal: mean-payoff top witness failed re-evaluation");
  }
  return out;
}

TopResult top_value(const Automaton& a) {
  TopValueTable t = state_top_values(a);
  return {t.theta[a.initial()], t.witness[a.initial()]};
}

}  // namespace quantsafe
