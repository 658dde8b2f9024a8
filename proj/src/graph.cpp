#include "quantsafe/graph.hpp"

#include <algorithm>
#include <cassert>

namespace quantsafe {

namespace {

struct TarjanState {
  const WeightedGraph& g;
  std::vector<std::vector<int>> adj;  // vertex -> outgoing edge ids
  std::vector<int> index, low, comp;
  std::vector<bool> on_stack;
  std::vector<int> stack;
  int counter = 0;
  std::vector<std::vector<int>> components;

  explicit TarjanState(const WeightedGraph& g) : g(g) {
    adj.resize(g.n);
    for (int i = 0; i < (int)g.edges.size(); i++) adj[g.edges[i].src].push_back(i);
    index.assign(g.n, -1);
    low.assign(g.n, 0);
    comp.assign(g.n, -1);
    on_stack.assign(g.n, false);
  }

  // Iterative Tarjan; components are emitted sinks-first, i.e. in reverse
  // topological order of the condensation.
  void run() {
    struct Frame {
      int v;
      size_t next_edge;
    };
    for (int root = 0; root < g.n; root++) {
      if (index[root] != -1) continue;
      std::vector<Frame> frames{{root, 0}};
      index[root] = low[root] = counter++;
      stack.push_back(root);
      on_stack[root] = true;
      while (!frames.empty()) {
        Frame& f = frames.back();
        if (f.next_edge < adj[f.v].size()) {
          int w = g.edges[adj[f.v][f.next_edge++]].dst;
          if (index[w] == -1) {
            index[w] = low[w] = counter++;
            stack.push_back(w);
            on_stack[w] = true;
            frames.push_back({w, 0});
          } else if (on_stack[w]) {
            low[f.v] = std::min(low[f.v], index[w]);
          }
        } else {
          int v = f.v;
          frames.pop_back();
          if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
          if (low[v] == index[v]) {
            std::vector<int> c;
            while (true) {
              int w = stack.back();
              stack.pop_back();
              on_stack[w] = false;
              comp[w] = (int)components.size();
              c.push_back(w);
              if (w == v) break;
            }
            std::reverse(c.begin(), c.end());
            components.push_back(std::move(c));
          }
        }
      }
    }
  }
};

// Clears rational weights to integers: returns (scaled integer weights, L)
// with w_int = w * L.
std::pair<std::vector<mpz_class>, mpz_class> clear_denominators(const WeightedGraph& g) {
  mpz_class l = 1;
  for (const auto& e : g.edges) {
    mpz_class d = e.weight.den();
    mpz_class gcd;
    mpz_gcd(gcd.get_mpz_t(), l.get_mpz_t(), d.get_mpz_t());
    l = l / gcd * d;
  }
  std::vector<mpz_class> w;
  w.reserve(g.edges.size());
  for (const auto& e : g.edges) w.push_back(e.weight.num() * (l / e.weight.den()));
  return {std::move(w), std::move(l)};
}

}  // namespace

SccResult sccs(const WeightedGraph& g) {
  TarjanState t(g);
  t.run();
  SccResult r;
  r.components = std::move(t.components);
  r.comp_of = std::move(t.comp);
  r.trivial.assign(r.components.size(), false);
  std::vector<bool> self_loop(g.n, false);
  for (const auto& e : g.edges)
    if (e.src == e.dst) self_loop[e.src] = true;
  for (size_t c = 0; c < r.components.size(); c++)
    r.trivial[c] = r.components[c].size() == 1 && !self_loop[r.components[c][0]];
  return r;
}

std::optional<MeanCycle> max_mean_cycle(const WeightedGraph& g) {
  SccResult scc = sccs(g);
  auto [wint, scale] = clear_denominators(g);

  std::optional<Rational> best;
  int best_comp = -1;
  for (size_t c = 0; c < scc.components.size(); c++) {
    if (scc.trivial[c]) continue;
    const auto& verts = scc.components[c];
    int m = (int)verts.size();
    std::vector<int> local(g.n, -1);
    for (int i = 0; i < m; i++) local[verts[i]] = i;
    std::vector<int> comp_edges;
    for (int i = 0; i < (int)g.edges.size(); i++)
      if (scc.comp_of[g.edges[i].src] == (int)c && scc.comp_of[g.edges[i].dst] == (int)c)
        comp_edges.push_back(i);

    // Karp: d[k][v] = max weight of a length-k walk from the source.
    std::vector<std::vector<mpz_class>> d(m + 1, std::vector<mpz_class>(m));
    std::vector<std::vector<bool>> has(m + 1, std::vector<bool>(m, false));
    has[0][0] = true;  // source = verts[0]
    for (int k = 1; k <= m; k++)
      for (int ei : comp_edges) {
        int u = local[g.edges[ei].src], v = local[g.edges[ei].dst];
        if (!has[k - 1][u]) continue;
        mpz_class cand = d[k - 1][u] + wint[ei];
        if (!has[k][v] || cand > d[k][v]) {
          d[k][v] = cand;
          has[k][v] = true;
        }
      }
    for (int v = 0; v < m; v++) {
      if (!has[m][v]) continue;
      std::optional<Rational> vmin;
      for (int k = 0; k < m; k++) {
        if (!has[k][v]) continue;
        Rational cand(d[m][v] - d[k][v], mpz_class(m - k));
        if (!vmin || cand < *vmin) vmin = cand;
      }
      if (vmin) {
        Rational mu = *vmin / Rational(scale);
        if (!best || mu > *best) {
          best = mu;
          best_comp = (int)c;
        }
      }
    }
  }
  if (!best) return std::nullopt;

  // Witness: with w' = w - mu*, cycle totals are <= 0 and the optimum is 0.
  // Longest-walk potentials make optimal cycles exactly the tight ones.
  const auto& verts = scc.components[best_comp];
  int m = (int)verts.size();
  std::vector<int> local(g.n, -1);
  for (int i = 0; i < m; i++) local[verts[i]] = i;
  std::vector<int> comp_edges;
  for (int i = 0; i < (int)g.edges.size(); i++)
    if (scc.comp_of[g.edges[i].src] == best_comp && scc.comp_of[g.edges[i].dst] == best_comp)
      comp_edges.push_back(i);
  std::vector<Rational> dist(m, Rational(0));
  for (int round = 0; round < m; round++) {
    bool changed = false;
    for (int ei : comp_edges) {
      int u = local[g.edges[ei].src], v = local[g.edges[ei].dst];
      Rational cand = dist[u] + g.edges[ei].weight - *best;
      if (cand > dist[v]) {
        dist[v] = cand;
        changed = true;
      }
    }
    if (!changed) break;
  }
  // Tight subgraph; any cycle in it attains the optimum.
  std::vector<std::vector<int>> tight(m);
  for (int ei : comp_edges) {
    int u = local[g.edges[ei].src], v = local[g.edges[ei].dst];
    if (dist[u] + g.edges[ei].weight - *best == dist[v]) tight[u].push_back(ei);
  }
  std::vector<int> color(m, 0);  // 0 unseen, 1 on path, 2 done
  std::vector<int> via(m, -1);
  std::vector<int> cyc;
  for (int s = 0; s < m && cyc.empty(); s++) {
    if (color[s]) continue;
    std::vector<std::pair<int, size_t>> st{{s, 0}};
    color[s] = 1;
    while (!st.empty() && cyc.empty()) {
      auto& [v, i] = st.back();
      if (i < tight[v].size()) {
        int ei = tight[v][i++];
        int w = local[g.edges[ei].dst];
        if (color[w] == 1) {
          // back edge closes a tight cycle
          cyc.push_back(ei);
          for (auto it = st.rbegin(); it != st.rend() && it->first != w; ++it)
            cyc.push_back(via[it->first]);
          std::reverse(cyc.begin(), cyc.end());
        } else if (color[w] == 0) {
          color[w] = 1;
          via[w] = ei;
          st.push_back({w, 0});
        }
      } else {
        color[v] = 2;
        st.pop_back();
      }
    }
  }
  assert(!cyc.empty());
  MeanCycle out;
  out.mean = *best;
  out.edge_ids = std::move(cyc);
  return out;
}

namespace {

// Bellman-Ford from a virtual source with 0-edges to every vertex.
// Returns (dist, relaxable edge id or -1, predecessor edge per vertex).
struct BellmanFord {
  std::vector<Rational> dist;
  std::vector<int> pred;
  int relaxable = -1;
};

BellmanFord bellman_ford(const WeightedGraph& g) {
  BellmanFord bf;
  bf.dist.assign(g.n, Rational(0));
  bf.pred.assign(g.n, -1);
  for (int round = 0; round < g.n; round++) {
    bool changed = false;
    for (int ei = 0; ei < (int)g.edges.size(); ei++) {
      const auto& e = g.edges[ei];
      Rational cand = bf.dist[e.src] + e.weight;
      if (cand < bf.dist[e.dst]) {
        bf.dist[e.dst] = cand;
        bf.pred[e.dst] = ei;
        changed = true;
      }
    }
    if (!changed) return bf;
  }
  for (int ei = 0; ei < (int)g.edges.size(); ei++) {
    const auto& e = g.edges[ei];
    if (bf.dist[e.src] + e.weight < bf.dist[e.dst]) {
      bf.relaxable = ei;
      break;
    }
  }
  return bf;
}

std::vector<int> extract_negative_cycle(const WeightedGraph& g, const BellmanFord& bf) {
  // Walk predecessors n times to land inside the cycle, then collect it.
  int v = g.edges[bf.relaxable].src;
  for (int i = 0; i < g.n; i++) v = g.edges[bf.pred[v]].src;
  std::vector<int> cyc;
  int u = v;
  do {
    int ei = bf.pred[u];
    cyc.push_back(ei);
    u = g.edges[ei].src;
  } while (u != v);
  std::reverse(cyc.begin(), cyc.end());
  return cyc;
}

}  // namespace

std::optional<std::vector<int>> detect_negative_cycle(const WeightedGraph& g) {
  BellmanFord bf = bellman_ford(g);
  if (bf.relaxable == -1) return std::nullopt;
  return extract_negative_cycle(g, bf);
}

ReweightResult johnson_reweight(const WeightedGraph& g) {
  BellmanFord bf = bellman_ford(g);
  if (bf.relaxable != -1) throw NegativeCycleError(extract_negative_cycle(g, bf));
  ReweightResult r;
  r.h = bf.dist;
  r.gamma_prime.reserve(g.edges.size());
  for (const auto& e : g.edges) {
    Rational w = e.weight + r.h[e.src] - r.h[e.dst];
    assert(w >= Rational(0));
    r.gamma_prime.push_back(std::move(w));
  }
  return r;
}

}  // namespace quantsafe
