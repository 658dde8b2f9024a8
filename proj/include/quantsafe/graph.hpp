#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "quantsafe/rational.hpp"

namespace quantsafe {

struct GraphEdge {
  int src;
  int dst;
  Rational weight;
  int tag = -1;  // optional back-reference (e.g. automaton transition index)
};

// Directed multigraph with exact rational edge weights.
struct WeightedGraph {
  int n = 0;
  std::vector<GraphEdge> edges;
};

struct SccResult {
  // Components in reverse topological order (every edge leaving a component
  // points to an earlier entry).
  std::vector<std::vector<int>> components;
  std::vector<int> comp_of;        // vertex -> component index
  std::vector<bool> trivial;       // singleton without a self-loop
};

SccResult sccs(const WeightedGraph& g);

struct MeanCycle {
  Rational mean;
  std::vector<int> edge_ids;  // a cycle attaining the mean
};

// Exact maximum over all cycles of weight/length (Karp per nontrivial SCC);
// nullopt when the graph is acyclic.
std::optional<MeanCycle> max_mean_cycle(const WeightedGraph& g);

// A concrete negative-total-weight cycle if one exists (Bellman-Ford from a
// virtual zero-weight source).
std::optional<std::vector<int>> detect_negative_cycle(const WeightedGraph& g);

struct ReweightResult {
  std::vector<Rational> h;            // vertex potential
  std::vector<Rational> gamma_prime;  // per edge, nonnegative
};

class NegativeCycleError : public std::runtime_error {
public:
  explicit NegativeCycleError(std::vector<int> cycle)
      : std::runtime_error("graph has a negative cycle"), cycle(std::move(cycle)) {}
  std::vector<int> cycle;  // edge ids
};

// Johnson reweighting: gamma'(e) = gamma(e) + h(src) - h(dst) >= 0 for every
// edge, so along any path the sums telescope. Throws NegativeCycleError with
// a witness when the precondition fails.
ReweightResult johnson_reweight(const WeightedGraph& g);

}  // namespace quantsafe
