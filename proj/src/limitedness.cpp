#include "quantsafe/limitedness.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <unordered_set>

#include "quantsafe/graph.hpp"

namespace quantsafe {

bool DistanceAutomaton::is_total() const {
  std::vector<char> has((size_t)num_states() * num_letters(), 0);
  for (const auto& t : trans) has[(size_t)t.src * num_letters() + t.letter] = 1;
  for (char h : has)
    if (!h) return false;
  return true;
}

bool DistanceAutomaton::all_accepting() const {
  return (int)accepting.size() == num_states();
}

void DistanceAutomaton::validate() const {
  if (alphabet.empty()) throw ValidationError("distance automaton: empty alphabet");
  if (state_names.empty()) throw ValidationError("distance automaton: empty state set");
  if (initials.empty()) throw ValidationError("distance automaton: no initial state");
  for (const auto& t : trans) {
    if (t.src < 0 || t.src >= num_states() || t.dst < 0 || t.dst >= num_states())
      throw ValidationError("distance automaton: transition endpoint out of range");
    if (t.letter < 0 || t.letter >= num_letters())
      throw ValidationError("distance automaton: transition letter out of range");
    if (t.weight != 0 && t.weight != 1)
      throw ValidationError("distance automaton: weights must be 0 or 1");
  }
  for (int q : initials)
    if (q < 0 || q >= num_states()) throw ValidationError("distance automaton: bad initial state");
  for (int q : accepting)
    if (q < 0 || q >= num_states())
      throw ValidationError("distance automaton: bad accepting state");
}

long distance(const DistanceAutomaton& d, const std::vector<int>& word) {
  const long INF = -1;
  std::vector<long> cost(d.num_states(), INF);
  for (int q : d.initials) cost[q] = 0;
  for (int letter : word) {
    std::vector<long> nxt(d.num_states(), INF);
    for (const auto& t : d.trans) {
      if (t.letter != letter || cost[t.src] == INF) continue;
      long c = cost[t.src] + t.weight;
      if (nxt[t.dst] == INF || c < nxt[t.dst]) nxt[t.dst] = c;
    }
    cost = std::move(nxt);
  }
  long best = INF;
  for (int q : d.accepting)
    if (cost[q] != INF && (best == INF || cost[q] < best)) best = cost[q];
  return best;
}

std::vector<long> brute_force_growth(const DistanceAutomaton& d, int maxlen, int length_cap) {
  if (maxlen > length_cap) throw ValidationError("brute_force_growth: length cap exceeded");
  std::vector<long> out(maxlen + 1, kDistInfinity);
  int k = d.num_letters();
  // enumerate words depth-first, reusing the cost vector per level
  std::vector<std::vector<long>> costs(maxlen + 1, std::vector<long>(d.num_states(), kDistInfinity));
  for (int q : d.initials) costs[0][q] = 0;
  auto record = [&](int len) {
    long best = kDistInfinity;
    for (int q : d.accepting) {
      long c = costs[len][q];
      if (c != kDistInfinity && (best == kDistInfinity || c < best)) best = c;
    }
    if (best != kDistInfinity && best > out[len]) out[len] = best;
  };
  record(0);
  std::function<void(int)> rec = [&](int len) {
    if (len == maxlen) return;
    for (int s = 0; s < k; s++) {
      auto& nxt = costs[len + 1];
      std::fill(nxt.begin(), nxt.end(), kDistInfinity);
      bool any = false;
      for (const auto& t : d.trans) {
        if (t.letter != s || costs[len][t.src] == kDistInfinity) continue;
        long c = costs[len][t.src] + t.weight;
        if (nxt[t.dst] == kDistInfinity || c < nxt[t.dst]) nxt[t.dst] = c;
        any = true;
      }
      if (!any) continue;
      record(len + 1);
      rec(len + 1);
      // restore: nxt is recomputed per sibling, costs[len] untouched
    }
  };
  rec(0);
  return out;
}

// ---- abstraction domain ---------------------------------------------------

namespace {

inline uint8_t combine2(uint8_t x, uint8_t y) {
  if (x == AW_INF || y == AW_INF) return AW_INF;
  return std::max(x, y);
}

inline uint8_t stab1(uint8_t x) { return x == AW_ONE ? (uint8_t)AW_OMEGA : x; }

}  // namespace

AbstractMatrix abstract_product(const AbstractMatrix& a, const AbstractMatrix& b) {
  AbstractMatrix c;
  c.n = a.n;
  c.m.assign((size_t)c.n * c.n, AW_INF);
  for (int i = 0; i < c.n; i++)
    for (int j = 0; j < c.n; j++) {
      uint8_t aij = a.at(i, j);
      if (aij == AW_INF) continue;
      for (int k = 0; k < c.n; k++) {
        uint8_t v = combine2(aij, b.at(j, k));
        if (v < c.at(i, k)) c.at(i, k) = v;
      }
    }
  return c;
}

bool is_idempotent(const AbstractMatrix& e) { return abstract_product(e, e) == e; }

AbstractMatrix stabilize(const AbstractMatrix& e) {
  AbstractMatrix c;
  c.n = e.n;
  c.m.assign((size_t)c.n * c.n, AW_INF);
  for (int i = 0; i < c.n; i++)
    for (int j = 0; j < c.n; j++) {
      uint8_t best = AW_INF;
      for (int k = 0; k < c.n; k++) {
        uint8_t v = combine2(combine2(e.at(i, k), stab1(e.at(k, k))), e.at(k, j));
        if (v < best) best = v;
      }
      c.at(i, j) = best;
    }
  return c;
}

namespace {

constexpr size_t kClosureCap = 1 << 20;

std::vector<AbstractMatrix> letter_matrices(const DistanceAutomaton& d) {
  std::vector<AbstractMatrix> ms(d.num_letters());
  for (int s = 0; s < d.num_letters(); s++) {
    ms[s].n = d.num_states();
    ms[s].m.assign((size_t)d.num_states() * d.num_states(), AW_INF);
  }
  for (const auto& t : d.trans) {
    uint8_t v = t.weight == 0 ? (uint8_t)AW_ZERO : (uint8_t)AW_ONE;
    uint8_t& slot = ms[t.letter].at(t.src, t.dst);
    if (v < slot) slot = v;
  }
  return ms;
}

}  // namespace

StabilizationClosure stabilization_closure(const DistanceAutomaton& d) {
  StabilizationClosure cl;
  std::unordered_set<std::string> seen;
  std::deque<int> queue;
  auto add = [&](AbstractMatrix m) {
    std::string key(m.m.begin(), m.m.end());
    if (!seen.insert(key).second) return;
    if (cl.matrices.size() >= kClosureCap)
      throw std::runtime_error("stabilization closure exceeded the size cap");
    cl.matrices.push_back(std::move(m));
    queue.push_back((int)cl.matrices.size() - 1);
  };
  for (auto& m : letter_matrices(d)) add(std::move(m));
  while (!queue.empty()) {
    int id = queue.front();
    queue.pop_front();
    // products against everything so far, both orders, then stabilization
    for (size_t j = 0; j < cl.matrices.size(); j++) {
      add(abstract_product(cl.matrices[id], cl.matrices[j]));
      add(abstract_product(cl.matrices[j], cl.matrices[id]));
    }
    if (is_idempotent(cl.matrices[id])) add(stabilize(cl.matrices[id]));
  }
  return cl;
}

bool StabilizationClosure::unlimited_from(const DistanceAutomaton& d,
                                          const std::vector<int>& initials) const {
  if (d.accepting.empty()) return false;
  for (const AbstractMatrix& m : matrices) {
    bool all_unbounded = true;
    bool some_omega = false;
    for (int i : initials) {
      for (int f : d.accepting) {
        uint8_t v = m.at(i, f);
        if (v <= AW_ONE) {
          all_unbounded = false;
          break;
        }
        if (v == AW_OMEGA) some_omega = true;
      }
      if (!all_unbounded) break;
    }
    if (all_unbounded && some_omega) return true;
  }
  return false;
}

bool is_limited(const DistanceAutomaton& d) {
  d.validate();
  StabilizationClosure cl = stabilization_closure(d);
  return !cl.unlimited_from(d, d.initials);
}

// ---- unlimitedness witness -------------------------------------------------

namespace {

// cost profile: per state 0, 1, 2 (= "at least 2") or 3 (unreachable)
using Profile = std::vector<uint8_t>;

Profile step_profile(const DistanceAutomaton& d, const Profile& p, int letter) {
  Profile nxt(p.size(), 3);
  for (const auto& t : d.trans) {
    if (t.letter != letter || p[t.src] == 3) continue;
    uint8_t c = (uint8_t)std::min<int>(2, p[t.src] + t.weight);
    if (c < nxt[t.dst]) nxt[t.dst] = c;
  }
  return nxt;
}

std::vector<int> reached_set(const Profile& p) {
  std::vector<int> s;
  for (int q = 0; q < (int)p.size(); q++)
    if (p[q] != 3) s.push_back(q);
  return s;
}

uint8_t min_cost(const Profile& p) {
  uint8_t m = 3;
  for (uint8_t c : p) m = std::min(m, c);
  return m;
}

}  // namespace

Rational min_run_mean_on_lasso(const DistanceAutomaton& d, const LassoWord& w) {
  // product of d with the lasso, negated weights; min mean = -max mean
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
  std::vector<std::vector<std::vector<int>>> out(d.num_states(),
                                                 std::vector<std::vector<int>>(d.num_letters()));
  for (int i = 0; i < (int)d.trans.size(); i++) out[d.trans[i].src][d.trans[i].letter].push_back(i);
  std::deque<int> queue;
  for (int q : d.initials) queue.push_back(intern(q, 0));
  WeightedGraph g;
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    auto [q, pos] = nodes[v];
    int letter = w.letter_at(pos);
    int npos = w.next_pos(pos);
    for (int ti : out[q][letter]) {
      size_t before = nodes.size();
      int u = intern(d.trans[ti].dst, npos);
      if ((size_t)u == before) queue.push_back(u);
      g.edges.push_back({v, u, Rational(-d.trans[ti].weight), ti});
    }
  }
  g.n = (int)nodes.size();
  auto mc = max_mean_cycle(g);
  if (!mc) throw ValidationError("min_run_mean_on_lasso: automaton is not total on the lasso");
  return -mc->mean;
}

UnlimitedWitness unlimited_witness(const DistanceAutomaton& d, int segment_length_budget) {
  d.validate();
  if (!d.is_total()) throw ValidationError("unlimited_witness requires a total automaton");
  if (!d.all_accepting()) throw ValidationError("unlimited_witness requires all states accepting");
  StabilizationClosure cl = stabilization_closure(d);
  if (!cl.unlimited_from(d, d.initials))
    throw ValidationError("unlimited_witness: the automaton is limited");

  int n = d.num_states();
  long budget = segment_length_budget > 0 ? segment_length_budget : (1L << std::min(n, 24)) * 4;

  // BFS over cost profiles for the shortest segment u with min-cost exactly 1
  // leading to a state set that is still unlimited.
  auto find_segment = [&](const std::vector<int>& from)
      -> std::pair<std::vector<int>, std::vector<int>> {
    Profile start(n, 3);
    for (int q : from) start[q] = 0;
    struct Node {
      Profile p;
      int parent;
      int letter;
    };
    std::vector<Node> nodes{{start, -1, -1}};
    std::map<Profile, int> seen{{start, 0}};
    std::deque<int> queue{0};
    std::vector<long> depth{0};
    while (!queue.empty()) {
      int ni = queue.front();
      queue.pop_front();
      if (depth[ni] >= budget)
        throw WitnessBudgetExhausted("unlimited_witness: segment search budget exhausted");
      for (int s = 0; s < d.num_letters(); s++) {
        Profile nxt = step_profile(d, nodes[ni].p, s);
        uint8_t mc = min_cost(nxt);
        if (mc >= 2) continue;  // min cost only grows; this branch is dead
        if (mc == 1) {
          std::vector<int> set = reached_set(nxt);
          if (cl.unlimited_from(d, set)) {
            std::vector<int> word{s};
            for (int cur = ni; nodes[cur].parent != -1; cur = nodes[cur].parent)
              word.push_back(nodes[cur].letter);
            std::reverse(word.begin(), word.end());
            return {word, set};
          }
          // fall through: longer segments may still reach an unlimited set
        }
        if (seen.emplace(nxt, (int)nodes.size()).second) {
          nodes.push_back({std::move(nxt), ni, s});
          depth.push_back(depth[ni] + 1);
          queue.push_back((int)nodes.size() - 1);
        }
      }
    }
    throw WitnessBudgetExhausted("unlimited_witness: no qualifying segment found");
  };

  UnlimitedWitness out;
  std::vector<std::vector<int>> sets{d.initials};
  std::vector<std::vector<int>> segments;
  int loop_start = -1, loop_end = -1;
  while (true) {
    auto [word, set] = find_segment(sets.back());
    segments.push_back(word);
    for (size_t j = 0; j < sets.size(); j++)
      if (sets[j] == set) {
        loop_start = (int)j;
        loop_end = (int)sets.size();
        break;
      }
    sets.push_back(set);
    if (loop_start != -1) break;
  }

  std::vector<int> prefix, loop;
  for (int i = 0; i < loop_start; i++)
    prefix.insert(prefix.end(), segments[i].begin(), segments[i].end());
  for (int i = loop_start; i < loop_end; i++)
    loop.insert(loop.end(), segments[i].begin(), segments[i].end());
  out.word = LassoWord(prefix, loop);
  out.segments = segments;
  out.loop_start = loop_start;
  int m = 0;
  for (const auto& seg : segments) m = std::max(m, (int)seg.size());
  out.max_segment_len = m;

  Rational mean = min_run_mean_on_lasso(d, out.word);
  if (!(mean >= Rational(1, m)))
    throw std::runtime_error("internal: unlimited witness failed its run-mean invariant");
  return out;
}

}  // namespace quantsafe
