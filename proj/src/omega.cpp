#include "quantsafe/omega.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <unordered_map>

#include "quantsafe/eval.hpp"
#include "quantsafe/graph.hpp"

namespace quantsafe {

const char* acceptance_name(Acceptance a) {
  switch (a) {
    case Acceptance::Safety: return "safety";
    case Acceptance::Reachability: return "reachability";
    case Acceptance::Buchi: return "buchi";
    case Acceptance::CoBuchi: return "cobuchi";
  }
  return "?";
}

std::vector<std::vector<int>> OmegaAutomaton::out_index() const {
  std::vector<std::vector<int>> out((size_t)num_states * alphabet.size());
  for (int i = 0; i < (int)trans.size(); i++)
    out[(size_t)trans[i].src * alphabet.size() + trans[i].letter].push_back(i);
  return out;
}

bool OmegaAutomaton::is_complete() const {
  auto out = out_index();
  for (const auto& o : out)
    if (o.empty()) return false;
  return true;
}

bool OmegaAutomaton::is_deterministic() const {
  auto out = out_index();
  for (const auto& o : out)
    if (o.size() > 1) return false;
  return true;
}

OmegaAutomaton universal_omega(std::vector<std::string> alphabet) {
  OmegaAutomaton b;
  b.alphabet = std::move(alphabet);
  b.num_states = 1;
  b.initial = 0;
  b.acceptance = Acceptance::Safety;
  for (int s = 0; s < (int)b.alphabet.size(); s++) b.trans.push_back({0, s, 0, true});
  return b;
}

OmegaAutomaton threshold_automaton(const Automaton& a_in, const Rational& v) {
  ValFn tag = a_in.valfn().tag;
  if (!is_finite_valued(tag))
    throw ValidationError("threshold automata exist only for Inf/Sup/LimInf/LimSup");
  Automaton a = collapse_parallel_max(a_in);
  OmegaAutomaton b;
  b.alphabet = a.alphabet();
  b.num_states = a.num_states();
  b.initial = a.initial();
  switch (tag) {
    case ValFn::Inf: b.acceptance = Acceptance::Safety; break;
    case ValFn::Sup: b.acceptance = Acceptance::Reachability; break;
    case ValFn::LimSup: b.acceptance = Acceptance::Buchi; break;
    case ValFn::LimInf: b.acceptance = Acceptance::CoBuchi; break;
    default: break;
  }
  for (const Transition& t : a.transitions()) {
    bool good = t.weight >= v;
    if (tag == ValFn::Inf) {
      if (good) b.trans.push_back({t.src, t.letter, t.dst, true});
    } else {
      b.trans.push_back({t.src, t.letter, t.dst, good});
    }
  }
  return b;
}

namespace {

struct OGraph {
  // adjacency by source, sorted by (letter, dst) for deterministic witnesses
  std::vector<std::vector<int>> adj;
  explicit OGraph(const OmegaAutomaton& b) : adj(b.num_states) {
    std::vector<int> order(b.trans.size());
    for (size_t i = 0; i < b.trans.size(); i++) order[i] = (int)i;
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
      if (b.trans[x].letter != b.trans[y].letter) return b.trans[x].letter < b.trans[y].letter;
      return b.trans[x].dst < b.trans[y].dst;
    });
    for (int i : order) adj[b.trans[i].src].push_back(i);
  }
};

WeightedGraph plain_graph(const OmegaAutomaton& b, const std::vector<char>& edge_ok = {}) {
  WeightedGraph g;
  g.n = b.num_states;
  for (int i = 0; i < (int)b.trans.size(); i++)
    if (edge_ok.empty() || edge_ok[i])
      g.edges.push_back({b.trans[i].src, b.trans[i].dst, Rational(0), i});
  return g;
}

std::vector<char> reachable_states(const OmegaAutomaton& b) {
  std::vector<char> seen(b.num_states, 0);
  std::vector<std::vector<int>> adj(b.num_states);
  for (const auto& t : b.trans) adj[t.src].push_back(t.dst);
  std::deque<int> queue{b.initial};
  seen[b.initial] = 1;
  while (!queue.empty()) {
    int q = queue.front();
    queue.pop_front();
    for (int d : adj[q])
      if (!seen[d]) {
        seen[d] = 1;
        queue.push_back(d);
      }
  }
  return seen;
}

std::optional<std::vector<int>> obfs(const OmegaAutomaton& b, const OGraph& g, int src, int dst,
                                     const std::vector<char>& edge_ok, bool want_cycle) {
  if (src == dst && !want_cycle) return std::vector<int>{};
  std::vector<int> via(b.num_states, -1);
  std::vector<char> seen(b.num_states, 0);
  std::deque<int> queue;
  auto relax = [&](int v) -> std::optional<std::vector<int>> {
    for (int ei : g.adj[v]) {
      if (!edge_ok.empty() && !edge_ok[ei]) continue;
      int u = b.trans[ei].dst;
      if (u == dst) {
        std::vector<int> path{ei};
        int x = v;
        while (x != src) {
          path.push_back(via[x]);
          x = b.trans[via[x]].src;
        }
        std::reverse(path.begin(), path.end());
        return path;
      }
      if (!seen[u] && u != src) {
        seen[u] = 1;
        via[u] = ei;
        queue.push_back(u);
      }
    }
    return std::nullopt;
  };
  if (auto p = relax(src)) return p;
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    if (auto p = relax(v)) return p;
  }
  return std::nullopt;
}

std::vector<int> oletters(const OmegaAutomaton& b, const std::vector<int>& edge_ids) {
  std::vector<int> ls;
  ls.reserve(edge_ids.size());
  for (int ei : edge_ids) ls.push_back(b.trans[ei].letter);
  return ls;
}

// States that can start an infinite run using only the allowed edges.
std::vector<char> can_cycle_states(const OmegaAutomaton& b, const std::vector<char>& edge_ok) {
  WeightedGraph g = plain_graph(b, edge_ok);
  SccResult s = sccs(g);
  std::vector<char> on(b.num_states, 0);
  for (size_t c = 0; c < s.components.size(); c++)
    if (!s.trivial[c])
      for (int q : s.components[c]) on[q] = 1;
  std::vector<std::vector<int>> radj(b.num_states);
  for (int i = 0; i < (int)b.trans.size(); i++)
    if (edge_ok.empty() || edge_ok[i]) radj[b.trans[i].dst].push_back(b.trans[i].src);
  std::deque<int> queue;
  for (int q = 0; q < b.num_states; q++)
    if (on[q]) queue.push_back(q);
  while (!queue.empty()) {
    int q = queue.front();
    queue.pop_front();
    for (int p : radj[q])
      if (!on[p]) {
        on[p] = 1;
        queue.push_back(p);
      }
  }
  return on;
}

std::vector<char> backward_closure(const OmegaAutomaton& b, std::vector<char> on) {
  std::vector<std::vector<int>> radj(b.num_states);
  for (const auto& t : b.trans) radj[t.dst].push_back(t.src);
  std::deque<int> queue;
  for (int q = 0; q < b.num_states; q++)
    if (on[q]) queue.push_back(q);
  while (!queue.empty()) {
    int q = queue.front();
    queue.pop_front();
    for (int p : radj[q])
      if (!on[p]) {
        on[p] = 1;
        queue.push_back(p);
      }
  }
  return on;
}

// States with a nonempty residual language.
std::vector<char> live_states(const OmegaAutomaton& b) {
  int n = b.num_states;
  switch (b.acceptance) {
    case Acceptance::Safety:
      return can_cycle_states(b, {});
    case Acceptance::CoBuchi: {
      std::vector<char> acc_ok(b.trans.size(), 0);
      for (size_t i = 0; i < b.trans.size(); i++) acc_ok[i] = b.trans[i].acc;
      return backward_closure(b, can_cycle_states(b, acc_ok));
    }
    case Acceptance::Reachability: {
      std::vector<char> cont = can_cycle_states(b, {});
      std::vector<char> target(n, 0);
      for (const auto& t : b.trans)
        if (t.acc && cont[t.dst]) target[t.src] = 1;
      return backward_closure(b, std::move(target));
    }
    case Acceptance::Buchi: {
      WeightedGraph g = plain_graph(b);
      SccResult s = sccs(g);
      std::vector<char> target(n, 0);
      for (const auto& t : b.trans)
        if (t.acc && s.comp_of[t.src] == s.comp_of[t.dst] && !s.trivial[s.comp_of[t.src]])
          target[t.src] = 1;
      return backward_closure(b, std::move(target));
    }
  }
  return std::vector<char>(n, 0);
}

}  // namespace

bool lasso_member(const OmegaAutomaton& b, const LassoWord& w) {
  for (int s : w.prefix)
    if (s < 0 || s >= (int)b.alphabet.size()) throw ValidationError("lasso letter out of alphabet");
  for (int s : w.loop)
    if (s < 0 || s >= (int)b.alphabet.size()) throw ValidationError("lasso letter out of alphabet");
  if (w.loop.empty()) throw ValidationError("lasso word: empty loop");

  auto out = b.out_index();
  std::map<std::pair<int, int>, int> id;
  std::vector<std::pair<int, int>> nodes;
  auto intern = [&](int q, int pos) {
    auto it = id.find({q, pos});
    if (it != id.end()) return it->second;
    int v = (int)nodes.size();
    id.emplace(std::make_pair(q, pos), v);
    nodes.emplace_back(q, pos);
    return v;
  };
  struct PEdge {
    int src, dst;
    bool acc;
  };
  std::vector<PEdge> edges;
  int start = intern(b.initial, 0);
  std::deque<int> queue{start};
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    auto [q, pos] = nodes[v];
    int letter = w.letter_at(pos);
    int npos = w.next_pos(pos);
    for (int ti : out[(size_t)q * b.alphabet.size() + letter]) {
      size_t before = nodes.size();
      int u = intern(b.trans[ti].dst, npos);
      if ((size_t)u == before) queue.push_back(u);
      edges.push_back({v, u, b.trans[ti].acc});
    }
  }
  auto graph_of = [&](bool acc_only) {
    WeightedGraph g;
    g.n = (int)nodes.size();
    for (int i = 0; i < (int)edges.size(); i++)
      if (!acc_only || edges[i].acc)
        g.edges.push_back({edges[i].src, edges[i].dst, Rational(0), i});
    return g;
  };
  auto has_nontrivial = [&](const WeightedGraph& gr) {
    SccResult s = sccs(gr);
    for (bool t : s.trivial)
      if (!t) return true;
    return false;
  };

  switch (b.acceptance) {
    case Acceptance::Safety:
      return has_nontrivial(graph_of(false));
    case Acceptance::CoBuchi:
      return has_nontrivial(graph_of(true));
    case Acceptance::Buchi: {
      WeightedGraph g = graph_of(false);
      SccResult s = sccs(g);
      for (const auto& e : edges)
        if (e.acc && s.comp_of[e.src] == s.comp_of[e.dst] && !s.trivial[s.comp_of[e.src]])
          return true;
      return false;
    }
    case Acceptance::Reachability: {
      WeightedGraph g = graph_of(false);
      SccResult s = sccs(g);
      std::vector<char> cont((size_t)g.n, 0);
      for (size_t c = 0; c < s.components.size(); c++)
        if (!s.trivial[c])
          for (int q : s.components[c]) cont[q] = 1;
      std::vector<std::vector<int>> radj(g.n);
      for (const auto& e : edges) radj[e.dst].push_back(e.src);
      std::deque<int> q2;
      for (int v = 0; v < g.n; v++)
        if (cont[v]) q2.push_back(v);
      while (!q2.empty()) {
        int v = q2.front();
        q2.pop_front();
        for (int p : radj[v])
          if (!cont[p]) {
            cont[p] = 1;
            q2.push_back(p);
          }
      }
      for (const auto& e : edges)
        if (e.acc && cont[e.dst]) return true;
      return false;
    }
  }
  return false;
}

OmegaAutomaton to_buchi(const OmegaAutomaton& b) {
  OmegaAutomaton out;
  out.alphabet = b.alphabet;
  out.acceptance = Acceptance::Buchi;
  switch (b.acceptance) {
    case Acceptance::Buchi:
      out = b;
      return out;
    case Acceptance::Safety:
      out.num_states = b.num_states;
      out.initial = b.initial;
      for (const auto& t : b.trans) out.trans.push_back({t.src, t.letter, t.dst, true});
      return out;
    case Acceptance::Reachability:
      out.num_states = 2 * b.num_states;
      out.initial = b.initial;
      for (const auto& t : b.trans) {
        if (t.acc)
          out.trans.push_back({t.src, t.letter, b.num_states + t.dst, true});
        else
          out.trans.push_back({t.src, t.letter, t.dst, false});
        out.trans.push_back({b.num_states + t.src, t.letter, b.num_states + t.dst, true});
      }
      return out;
    case Acceptance::CoBuchi:
      // second copy restricted to accepting edges; the jump guesses the point
      // from which the run stays accepting
      out.num_states = 2 * b.num_states;
      out.initial = b.initial;
      for (const auto& t : b.trans) {
        out.trans.push_back({t.src, t.letter, t.dst, false});
        if (t.acc) {
          out.trans.push_back({t.src, t.letter, b.num_states + t.dst, true});
          out.trans.push_back({b.num_states + t.src, t.letter, b.num_states + t.dst, true});
        }
      }
      return out;
  }
  return out;
}

std::optional<LassoWord> find_accepted_lasso(const OmegaAutomaton& b) {
  OGraph og(b);
  std::vector<char> reach = reachable_states(b);
  WeightedGraph g = plain_graph(b);
  SccResult s = sccs(g);

  switch (b.acceptance) {
    case Acceptance::Safety: {
      for (size_t c = 0; c < s.components.size(); c++) {
        if (s.trivial[c]) continue;
        std::vector<char> comp_ok(b.trans.size(), 0);
        for (size_t i = 0; i < b.trans.size(); i++)
          comp_ok[i] =
              s.comp_of[b.trans[i].src] == (int)c && s.comp_of[b.trans[i].dst] == (int)c;
        for (int q : s.components[c]) {
          if (!reach[q]) continue;
          auto pre = obfs(b, og, b.initial, q, {}, false);
          auto loop = obfs(b, og, q, q, comp_ok, true);
          if (pre && loop) return LassoWord(oletters(b, *pre), oletters(b, *loop));
        }
      }
      return std::nullopt;
    }
    case Acceptance::Buchi: {
      for (size_t i = 0; i < b.trans.size(); i++) {
        const auto& t = b.trans[i];
        if (!t.acc || !reach[t.src]) continue;
        int c = s.comp_of[t.src];
        if (s.comp_of[t.dst] != c || s.trivial[c]) continue;
        std::vector<char> comp_ok(b.trans.size(), 0);
        for (size_t j = 0; j < b.trans.size(); j++)
          comp_ok[j] = s.comp_of[b.trans[j].src] == c && s.comp_of[b.trans[j].dst] == c;
        auto pre = obfs(b, og, b.initial, t.src, {}, false);
        auto back = obfs(b, og, t.dst, t.src, comp_ok, true);
        if (!pre || !back) continue;
        std::vector<int> loop_edges{(int)i};
        loop_edges.insert(loop_edges.end(), back->begin(), back->end());
        return LassoWord(oletters(b, *pre), oletters(b, loop_edges));
      }
      return std::nullopt;
    }
    case Acceptance::CoBuchi: {
      std::vector<char> acc_ok(b.trans.size(), 0);
      for (size_t i = 0; i < b.trans.size(); i++) acc_ok[i] = b.trans[i].acc;
      WeightedGraph sub = plain_graph(b, acc_ok);
      SccResult ss = sccs(sub);
      for (size_t c = 0; c < ss.components.size(); c++) {
        if (ss.trivial[c]) continue;
        std::vector<char> comp_acc(b.trans.size(), 0);
        for (size_t i = 0; i < b.trans.size(); i++)
          comp_acc[i] = b.trans[i].acc && ss.comp_of[b.trans[i].src] == (int)c &&
                        ss.comp_of[b.trans[i].dst] == (int)c;
        for (int q : ss.components[c]) {
          if (!reach[q]) continue;
          auto pre = obfs(b, og, b.initial, q, {}, false);
          auto loop = obfs(b, og, q, q, comp_acc, true);
          if (pre && loop) return LassoWord(oletters(b, *pre), oletters(b, *loop));
        }
      }
      return std::nullopt;
    }
    case Acceptance::Reachability: {
      std::vector<char> cont = can_cycle_states(b, {});
      for (size_t i = 0; i < b.trans.size(); i++) {
        const auto& t = b.trans[i];
        if (!t.acc || !reach[t.src] || !cont[t.dst]) continue;
        auto pre = obfs(b, og, b.initial, t.src, {}, false);
        if (!pre) continue;
        for (size_t c = 0; c < s.components.size(); c++) {
          if (s.trivial[c]) continue;
          std::vector<char> comp_ok(b.trans.size(), 0);
          for (size_t j = 0; j < b.trans.size(); j++)
            comp_ok[j] = s.comp_of[b.trans[j].src] == (int)c && s.comp_of[b.trans[j].dst] == (int)c;
          for (int q : s.components[c]) {
            auto mid = obfs(b, og, t.dst, q, {}, false);
            if (!mid) continue;
            auto loop = obfs(b, og, q, q, comp_ok, true);
            if (!loop) continue;
            std::vector<int> prefix_edges = *pre;
            prefix_edges.push_back((int)i);
            prefix_edges.insert(prefix_edges.end(), mid->begin(), mid->end());
            return LassoWord(oletters(b, prefix_edges), oletters(b, *loop));
          }
        }
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

// ---- transition profiles (Ramsey-style containment and complementation) --

namespace {

// 3-valued reachability matrix: 0 no path, 1 path, 2 path via an accepting
// edge. Profiles of words form a finite monoid; by Ramsey's theorem every
// omega-word factorizes as u v1 v2 ... with all blocks sharing an idempotent
// profile e and prof(u)*e = prof(u), and then membership of the word depends
// only on the pair (prof(u), e).
struct Profile {
  std::vector<uint8_t> m;
  bool operator==(const Profile& o) const { return m == o.m; }
};

Profile profile_mul(const Profile& a, const Profile& b, int n) {
  Profile c;
  c.m.assign((size_t)n * n, 0);
  for (int i = 0; i < n; i++)
    for (int j = 0; j < n; j++) {
      uint8_t aij = a.m[(size_t)i * n + j];
      if (!aij) continue;
      const uint8_t* brow = &b.m[(size_t)j * n];
      uint8_t* crow = &c.m[(size_t)i * n];
      for (int k = 0; k < n; k++) {
        uint8_t bjk = brow[k];
        if (!bjk) continue;
        uint8_t v = (aij == 2 || bjk == 2) ? 2 : 1;
        if (v > crow[k]) crow[k] = v;
      }
    }
  return c;
}

Profile letter_profile(const OmegaAutomaton& b, int letter) {
  Profile p;
  int n = b.num_states;
  p.m.assign((size_t)n * n, 0);
  for (const auto& t : b.trans) {
    if (t.letter != letter) continue;
    uint8_t v = t.acc ? 2 : 1;
    uint8_t& slot = p.m[(size_t)t.src * n + t.dst];
    if (v > slot) slot = v;
  }
  return p;
}

// u v^omega (prof(u)=x, prof(v)=e idempotent, x*e=x) is accepted iff some
// q,r satisfy x[init][q] >= 1, e[q][r] >= 1, e[r][r] == 2.
bool lasso_pattern(const Profile& x, const Profile& e, int n, int initial) {
  for (int q = 0; q < n; q++) {
    if (!x.m[(size_t)initial * n + q]) continue;
    for (int r = 0; r < n; r++)
      if (e.m[(size_t)q * n + r] && e.m[(size_t)r * n + r] == 2) return true;
  }
  return false;
}

constexpr size_t kMonoidCap = 400000;

// Monoid of word profiles for one or two automata in lockstep, generated by
// letters, with shortest representatives (BFS, letters ascending).
struct ProfileMonoid {
  std::vector<Profile> pa, pb;  // pb empty in single mode
  std::vector<std::vector<int>> rep;
  std::unordered_map<std::string, int> index;
  std::vector<int> succ;  // element x letter -> element
  int letters = 0;
  bool paired = false;

  int mul(int x, int y) const {
    // multiply by following y's representative letter by letter
    int cur = x;
    for (int s : rep[y]) cur = succ[(size_t)cur * letters + s];
    return cur;
  }
};

ProfileMonoid profile_monoid(const OmegaAutomaton& a, const OmegaAutomaton* b) {
  ProfileMonoid m;
  m.paired = b != nullptr;
  int k = (int)a.alphabet.size();
  m.letters = k;
  int na = a.num_states;
  int nb = b ? b->num_states : 0;
  std::vector<Profile> la(k), lb(k);
  for (int s = 0; s < k; s++) {
    la[s] = letter_profile(a, s);
    if (b) lb[s] = letter_profile(*b, s);
  }
  auto key_of = [&](const Profile& x, const Profile& y) {
    std::string key(x.m.begin(), x.m.end());
    if (b) key.append(y.m.begin(), y.m.end());
    return key;
  };
  std::deque<int> queue;
  auto add = [&](Profile x, Profile y, std::vector<int> word) {
    std::string key = key_of(x, y);
    auto it = m.index.find(key);
    if (it != m.index.end()) return it->second;
    int id = (int)m.pa.size();
    if ((size_t)id > kMonoidCap)
      throw std::runtime_error("transition-profile monoid exceeded the size cap");
    m.index.emplace(std::move(key), id);
    m.pa.push_back(std::move(x));
    m.pb.push_back(std::move(y));
    m.rep.push_back(std::move(word));
    queue.push_back(id);
    return id;
  };
  for (int s = 0; s < k; s++) add(la[s], b ? lb[s] : Profile{}, {s});
  while (!queue.empty()) {
    int id = queue.front();
    queue.pop_front();
    for (int s = 0; s < k; s++) {
      Profile x = profile_mul(m.pa[id], la[s], na);
      Profile y = b ? profile_mul(m.pb[id], lb[s], nb) : Profile{};
      std::vector<int> word = m.rep[id];
      word.push_back(s);
      add(std::move(x), std::move(y), std::move(word));
    }
  }
  // successor table
  m.succ.assign((size_t)m.pa.size() * k, 0);
  for (int id = 0; id < (int)m.pa.size(); id++)
    for (int s = 0; s < k; s++) {
      Profile x = profile_mul(m.pa[id], la[s], na);
      Profile y = b ? profile_mul(m.pb[id], lb[s], nb) : Profile{};
      m.succ[(size_t)id * k + s] = m.index.at(key_of(x, y));
    }
  return m;
}

}  // namespace

OmegaAutomaton complement_buchi(const OmegaAutomaton& b) {
  if (b.acceptance != Acceptance::Buchi)
    throw ValidationError("complement_buchi expects a Buchi automaton");
  int n = b.num_states;
  int k = (int)b.alphabet.size();
  ProfileMonoid m = profile_monoid(b, nullptr);
  int msize = (int)m.pa.size();

  std::vector<int> idempotents;
  for (int e = 0; e < msize; e++)
    if (m.mul(e, e) == e) idempotents.push_back(e);

  // linked pairs (x,e) whose words all avoid L(b)
  std::vector<std::vector<int>> bad_for(msize);
  for (int e : idempotents)
    for (int x = 0; x < msize; x++)
      if (m.mul(x, e) == x && !lasso_pattern(m.pa[x], m.pa[e], n, b.initial))
        bad_for[x].push_back(e);

  // States: 0 reads the prefix from the epsilon profile; 1..msize are
  // phase-1 profiles; block states (e, r) track the running block profile,
  // r = -1 meaning "block just closed".
  OmegaAutomaton out;
  out.alphabet = b.alphabet;
  out.acceptance = Acceptance::Buchi;
  std::map<std::pair<int, int>, int> p2;
  int base = 1 + msize;
  std::vector<std::pair<int, int>> p2nodes;
  auto p2state = [&](int e, int r) {
    auto it = p2.find({e, r});
    if (it != p2.end()) return it->second;
    int id = base + (int)p2nodes.size();
    p2.emplace(std::make_pair(e, r), id);
    p2nodes.emplace_back(e, r);
    return id;
  };

  std::vector<OTransition> ts;
  std::vector<int> letter_elem(k);
  for (int s = 0; s < k; s++) {
    Profile lp = letter_profile(b, s);
    std::string key(lp.m.begin(), lp.m.end());
    letter_elem[s] = m.index.at(key);
  }

  auto add_block_steps = [&](int from_state, int e, int r_before) {
    // reading letter s inside block (e, r_before); r_before == -1 is a fresh block
    for (int s = 0; s < k; s++) {
      int r = r_before == -1 ? letter_elem[s] : m.succ[(size_t)r_before * k + s];
      ts.push_back({from_state, s, p2state(e, r), false});
      if (r == e) ts.push_back({from_state, s, p2state(e, -1), true});
    }
  };

  for (int s = 0; s < k; s++) ts.push_back({0, s, 1 + letter_elem[s], false});
  for (int x = 0; x < msize; x++) {
    for (int s = 0; s < k; s++) ts.push_back({1 + x, s, 1 + m.succ[(size_t)x * k + s], false});
    for (int e : bad_for[x]) add_block_steps(1 + x, e, -1);
  }
  // expand block states discovered so far (p2nodes grows while we iterate)
  for (size_t i = 0; i < p2nodes.size(); i++) {
    auto [e, r] = p2nodes[i];
    add_block_steps(p2state(e, r), e, r);
  }
  out.num_states = base + (int)p2nodes.size();
  out.initial = 0;
  out.trans = std::move(ts);
  return out;
}

OmegaAutomaton determinize_cobuchi(const OmegaAutomaton& b) {
  if (b.acceptance != Acceptance::CoBuchi)
    throw ValidationError("determinize_cobuchi expects a coBuchi automaton");
  auto out_idx = b.out_index();
  int k = (int)b.alphabet.size();

  using SetPair = std::pair<std::vector<int>, std::vector<int>>;  // (S, O)
  std::map<SetPair, int> id;
  std::vector<SetPair> nodes;
  auto intern = [&](SetPair sp) {
    auto it = id.find(sp);
    if (it != id.end()) return it->second;
    int v = (int)nodes.size();
    id.emplace(sp, v);
    nodes.push_back(std::move(sp));
    return v;
  };
  auto post = [&](const std::vector<int>& set, int letter, bool acc_only) {
    std::set<int> nxt;
    for (int q : set)
      for (int ti : out_idx[(size_t)q * k + letter]) {
        if (acc_only && !b.trans[ti].acc) continue;
        nxt.insert(b.trans[ti].dst);
      }
    return std::vector<int>(nxt.begin(), nxt.end());
  };

  OmegaAutomaton d;
  d.alphabet = b.alphabet;
  d.acceptance = Acceptance::CoBuchi;
  int start = intern({{b.initial}, {b.initial}});
  std::deque<int> queue{start};
  std::vector<OTransition> ts;
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (int s = 0; s < k; s++) {
      const auto& [S, O] = nodes[v];
      std::vector<int> S2 = post(S, s, false);
      std::vector<int> O2 = post(O, s, true);
      bool acc;
      if (S2.empty()) {
        // dead sink: the word has no run at all
        acc = false;
        O2.clear();
      } else if (!O2.empty()) {
        acc = true;
      } else {
        acc = false;  // breakpoint: restart the attempt from all survivors
        O2 = S2;
      }
      size_t before = nodes.size();
      int u = intern({S2, O2});
      if ((size_t)u == before) queue.push_back(u);
      ts.push_back({v, s, u, acc});
    }
  }
  d.num_states = (int)nodes.size();
  d.initial = start;
  d.trans = std::move(ts);
  return d;
}

namespace {

// Buchi intersection: phase 0 waits for an accepting edge of b1, phase 1 for
// one of b2; completing the round is the product's accepting edge.
OmegaAutomaton buchi_product(const OmegaAutomaton& b1, const OmegaAutomaton& b2) {
  auto o1 = b1.out_index();
  auto o2 = b2.out_index();
  int k = (int)b1.alphabet.size();
  std::map<std::tuple<int, int, int>, int> id;
  std::vector<std::tuple<int, int, int>> nodes;
  auto intern = [&](int p, int q, int ph) {
    auto key = std::make_tuple(p, q, ph);
    auto it = id.find(key);
    if (it != id.end()) return it->second;
    int v = (int)nodes.size();
    id.emplace(key, v);
    nodes.push_back(key);
    return v;
  };
  OmegaAutomaton out;
  out.alphabet = b1.alphabet;
  out.acceptance = Acceptance::Buchi;
  int start = intern(b1.initial, b2.initial, 0);
  std::deque<int> queue{start};
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    auto [p, q, ph] = nodes[v];
    for (int s = 0; s < k; s++)
      for (int t1 : o1[(size_t)p * k + s])
        for (int t2 : o2[(size_t)q * k + s]) {
          int nph = ph;
          bool acc = false;
          if (ph == 0) {
            if (b1.trans[t1].acc) nph = 1;
          } else {
            if (b2.trans[t2].acc) {
              acc = true;
              nph = 0;
            }
          }
          size_t before = nodes.size();
          int u = intern(b1.trans[t1].dst, b2.trans[t2].dst, nph);
          if ((size_t)u == before) queue.push_back(u);
          out.trans.push_back({v, s, u, acc});
        }
  }
  out.num_states = (int)nodes.size();
  out.initial = start;
  return out;
}

// Deterministic complement of a Safety automaton: subset construction; the
// complement holds exactly the words that reach the empty subset.
OmegaAutomaton safety_complement(const OmegaAutomaton& b) {
  auto out_idx = b.out_index();
  int k = (int)b.alphabet.size();
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
  OmegaAutomaton out;
  out.alphabet = b.alphabet;
  out.acceptance = Acceptance::Reachability;
  int start = intern({b.initial});
  std::deque<int> queue{start};
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (int s = 0; s < k; s++) {
      std::set<int> nxt;
      for (int q : nodes[v])
        for (int ti : out_idx[(size_t)q * k + s]) nxt.insert(b.trans[ti].dst);
      size_t before = nodes.size();
      int u = intern(std::vector<int>(nxt.begin(), nxt.end()));
      if ((size_t)u == before) queue.push_back(u);
      out.trans.push_back({v, s, u, nodes[u].empty()});
    }
  }
  out.num_states = (int)nodes.size();
  out.initial = start;
  return out;
}

// Deterministic complement of a complete Reachability automaton: track the
// subset reachable through accepting-free runs; the transition dies as soon
// as an accepting edge is available from the tracked subset.
OmegaAutomaton reachability_complement(const OmegaAutomaton& b) {
  if (!b.is_complete())
    throw ValidationError("reachability complement requires a complete automaton");
  auto out_idx = b.out_index();
  int k = (int)b.alphabet.size();
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
  OmegaAutomaton out;
  out.alphabet = b.alphabet;
  out.acceptance = Acceptance::Safety;
  int start = intern({b.initial});
  std::deque<int> queue{start};
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (int s = 0; s < k; s++) {
      bool dies = false;
      std::set<int> nxt;
      for (int q : nodes[v])
        for (int ti : out_idx[(size_t)q * k + s]) {
          if (b.trans[ti].acc) {
            dies = true;
            break;
          }
          nxt.insert(b.trans[ti].dst);
        }
      if (dies) continue;
      size_t before = nodes.size();
      int u = intern(std::vector<int>(nxt.begin(), nxt.end()));
      if ((size_t)u == before) queue.push_back(u);
      out.trans.push_back({v, s, u, true});
    }
  }
  out.num_states = (int)nodes.size();
  out.initial = start;
  return out;
}

std::optional<LassoWord> product_counterexample(const OmegaAutomaton& inner_buchi,
                                                const OmegaAutomaton& outer_complement_buchi) {
  OmegaAutomaton prod = buchi_product(inner_buchi, outer_complement_buchi);
  return find_accepted_lasso(prod);
}

}  // namespace

ContainResult contains(const OmegaAutomaton& outer, const OmegaAutomaton& inner) {
  if (outer.alphabet != inner.alphabet)
    throw ValidationError("contains: alphabet mismatch");

  std::optional<LassoWord> cex;
  OmegaAutomaton inner_b = to_buchi(inner);

  switch (outer.acceptance) {
    case Acceptance::Buchi: {
      ProfileMonoid m = profile_monoid(inner_b, &outer);
      int msize = (int)m.pa.size();
      std::vector<int> idempotents;
      for (int e = 0; e < msize; e++)
        if (m.mul(e, e) == e) idempotents.push_back(e);
      for (int e : idempotents) {
        for (int x = 0; x < msize && !cex; x++) {
          if (m.mul(x, e) != x) continue;
          if (lasso_pattern(m.pa[x], m.pa[e], inner_b.num_states, inner_b.initial) &&
              !lasso_pattern(m.pb[x], m.pb[e], outer.num_states, outer.initial))
            cex = LassoWord(m.rep[x], m.rep[e]);
        }
        if (cex) break;
      }
      break;
    }
    case Acceptance::CoBuchi: {
      OmegaAutomaton det = determinize_cobuchi(outer);
      OmegaAutomaton comp = det;
      comp.acceptance = Acceptance::Buchi;
      for (auto& t : comp.trans) t.acc = !t.acc;
      cex = product_counterexample(inner_b, comp);
      break;
    }
    case Acceptance::Safety:
      cex = product_counterexample(inner_b, to_buchi(safety_complement(outer)));
      break;
    case Acceptance::Reachability:
      cex = product_counterexample(inner_b, to_buchi(reachability_complement(outer)));
      break;
  }

  if (!cex) return {true, std::nullopt};
  if (!lasso_member(inner, *cex) || lasso_member(outer, *cex))
    throw std::runtime_error("internal: containment counterexample failed re-check");
  return {false, cex};
}

OmegaAutomaton closure_automaton(const OmegaAutomaton& b) {
  std::vector<char> live = live_states(b);
  OmegaAutomaton c;
  c.alphabet = b.alphabet;
  c.acceptance = Acceptance::Safety;
  if (!live[b.initial]) {
    // empty language: closure is empty too
    c.num_states = 1;
    c.initial = 0;
    return c;
  }
  std::vector<int> map(b.num_states, -1);
  int n = 0;
  for (int q = 0; q < b.num_states; q++)
    if (live[q]) map[q] = n++;
  c.num_states = n;
  c.initial = map[b.initial];
  for (const auto& t : b.trans)
    if (live[t.src] && live[t.dst]) c.trans.push_back({map[t.src], t.letter, map[t.dst], true});
  return c;
}

SafetyLanguageResult is_safety_language(const OmegaAutomaton& b) {
  OmegaAutomaton c = closure_automaton(b);
  ContainResult closure_in_l = contains(b, c);
  ContainResult l_in_closure = contains(c, b);
  SafetyLanguageResult r;
  r.is_safety = closure_in_l.contained && l_in_closure.contained;
  if (!closure_in_l.contained)
    r.counterexample = closure_in_l.counterexample;
  else if (!l_in_closure.contained)
    r.counterexample = l_in_closure.counterexample;
  return r;
}

bool boolean_live(const OmegaAutomaton& b) {
  OmegaAutomaton c = closure_automaton(b);
  // universality of a safety automaton: no word may kill every run
  auto out_idx = c.out_index();
  int k = (int)c.alphabet.size();
  std::set<std::vector<int>> seen;
  std::deque<std::vector<int>> queue;
  std::vector<int> start{c.initial};
  if (c.trans.empty()) return false;
  seen.insert(start);
  queue.push_back(start);
  while (!queue.empty()) {
    std::vector<int> cur = queue.front();
    queue.pop_front();
    for (int s = 0; s < k; s++) {
      std::set<int> nxt;
      for (int q : cur)
        for (int ti : out_idx[(size_t)q * k + s]) nxt.insert(c.trans[ti].dst);
      if (nxt.empty()) return false;
      std::vector<int> v(nxt.begin(), nxt.end());
      if (seen.insert(v).second) queue.push_back(std::move(v));
    }
  }
  return true;
}

NfaUniversalResult nfa_universal(const Nfa& n) {
  int k = (int)n.alphabet.size();
  std::vector<std::vector<std::vector<int>>> out(n.state_names.size(),
                                                 std::vector<std::vector<int>>(k));
  for (const auto& t : n.trans) out[t.src][t.letter].push_back(t.dst);

  std::vector<int> start = n.initials;
  std::sort(start.begin(), start.end());
  start.erase(std::unique(start.begin(), start.end()), start.end());
  if (start.empty()) return {false, {}};

  struct Node {
    std::vector<int> set;
    int parent;
    int letter;
  };
  std::vector<Node> nodes{{start, -1, -1}};
  std::vector<int> frontier{0};
  std::vector<std::vector<int>> antichain{start};  // subset-minimal kept sets

  auto dominated = [&](const std::vector<int>& s) {
    for (const auto& kept : antichain)
      if (std::includes(s.begin(), s.end(), kept.begin(), kept.end())) return true;
    return false;
  };

  while (!frontier.empty()) {
    std::vector<int> next;
    for (int ni : frontier) {
      for (int s = 0; s < k; s++) {
        std::set<int> nxt;
        for (int q : nodes[ni].set)
          for (int d : out[q][s]) nxt.insert(d);
        if (nxt.empty()) {
          // reconstruct the witness word
          std::vector<int> word{s};
          for (int cur = ni; nodes[cur].parent != -1; cur = nodes[cur].parent)
            word.push_back(nodes[cur].letter);
          std::reverse(word.begin(), word.end());
          return {false, word};
        }
        std::vector<int> v(nxt.begin(), nxt.end());
        if (dominated(v)) continue;
        antichain.push_back(v);
        nodes.push_back({std::move(v), ni, s});
        next.push_back((int)nodes.size() - 1);
      }
    }
    frontier = std::move(next);
  }
  return {true, {}};
}

}  // namespace quantsafe
