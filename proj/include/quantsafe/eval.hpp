#pragma once

#include <vector>

#include "quantsafe/automaton.hpp"
#include "quantsafe/graph.hpp"

namespace quantsafe {

// Collapses parallel transitions to the maximal-weight one per
// (source, letter, target). Sound for sup-resolved semantics; analyses work
// on the collapsed automaton while core keeps the multiset.
Automaton collapse_parallel_max(const Automaton& a);

// Equivalent automaton whose every run yields a monotonic, eventually
// constant weight sequence: the state memorizes the running max (Sup) or
// min (Inf) and transitions emit the updated memory. The result can be read
// under the same value function or as LimInf/LimSup.
Automaton monotone_form(const Automaton& a, ValFn target);

// The full memory grid behind monotone_form, including states unreachable
// from the initial seed; (q, memory) pairs are laid out densely.
struct MonotoneGrid {
  Automaton aut;
  std::vector<Rational> memory;  // per grid state
  int mem_count = 0;
  int neutral = 0;  // memory index of the seed
  int node(int q, int m) const { return q * mem_count + m; }
};

MonotoneGrid monotone_grid(const Automaton& a, ValFn target);

// Exact value of a (sup over runs) on the lasso word w.
Rational evaluate_lasso(const Automaton& a, const LassoWord& w);

struct TopResult {
  Rational value;
  LassoWord witness;
};

// Top value of the automaton together with a lasso attaining it.
TopResult top_value(const Automaton& a);

// theta_q = top value of A^q for every state q, computed in one shared
// analysis pass; each witness is re-verified with evaluate_lasso.
struct TopValueTable {
  std::vector<Rational> theta;
  std::vector<LassoWord> witness;
};

TopValueTable state_top_values(const Automaton& a);

// Graph underlying the automaton; edge tags are transition indices.
WeightedGraph automaton_graph(const Automaton& a);

// Optimal discounted values V(v) = max over out-edges (w + lambda*V(dst)),
// solved exactly by policy iteration; every vertex needs an out-edge.
struct DsumSolution {
  std::vector<Rational> value;
  std::vector<int> policy_edge;
};
DsumSolution dsum_policy_iteration(const WeightedGraph& g, const Rational& lambda);

}  // namespace quantsafe
