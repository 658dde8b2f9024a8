#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "quantsafe/automaton.hpp"

namespace quantsafe {

// Min-plus automaton over finite words with weights in {0,1}.
struct DistanceAutomaton {
  std::vector<std::string> alphabet;
  std::vector<std::string> state_names;
  std::vector<int> initials;   // nonempty
  std::vector<int> accepting;
  struct Trans {
    int src, letter, dst;
    int weight;  // 0 or 1
  };
  std::vector<Trans> trans;

  int num_states() const { return (int)state_names.size(); }
  int num_letters() const { return (int)alphabet.size(); }
  bool is_total() const;
  bool all_accepting() const;
  void validate() const;
};

inline constexpr int kDistInfinity = -1;

// Min over accepting runs of the weight sum; kDistInfinity when no accepting
// run exists.
long distance(const DistanceAutomaton& d, const std::vector<int>& word);

// Tropical abstraction domain 0 < 1 < omega < infinity.
enum AbstractWeight : uint8_t { AW_ZERO = 0, AW_ONE = 1, AW_OMEGA = 2, AW_INF = 3 };

// Square matrix over {0,1,omega,infinity} indexed by states; closed under
// the min/max product and stabilization of idempotents.
struct AbstractMatrix {
  int n = 0;
  std::vector<uint8_t> m;  // n*n, row-major

  uint8_t at(int i, int j) const { return m[(size_t)i * n + j]; }
  uint8_t& at(int i, int j) { return m[(size_t)i * n + j]; }
  bool operator==(const AbstractMatrix& o) const { return n == o.n && m == o.m; }
};

AbstractMatrix abstract_product(const AbstractMatrix& a, const AbstractMatrix& b);
bool is_idempotent(const AbstractMatrix& e);
AbstractMatrix stabilize(const AbstractMatrix& e);  // e must be idempotent

// The closure of the letter matrices under product and stabilization of
// idempotents, shared by is_limited and the per-subset checks of
// unlimited_witness.
struct StabilizationClosure {
  std::vector<AbstractMatrix> matrices;
  // true iff D with `initials` as initial-state set is unlimited.
  bool unlimited_from(const DistanceAutomaton& d, const std::vector<int>& initials) const;
};

StabilizationClosure stabilization_closure(const DistanceAutomaton& d);

bool is_limited(const DistanceAutomaton& d);

// Per-length maximum distance over accepted words, exact; the oracle that
// guards is_limited in the test suite.
std::vector<long> brute_force_growth(const DistanceAutomaton& d, int maxlen, int length_cap = 12);

struct UnlimitedWitness {
  LassoWord word;                        // u_1..u_j (u_{j+1}..u_l)^omega
  std::vector<std::vector<int>> segments;  // u_1..u_l
  int loop_start = 0;                    // j
  int max_segment_len = 0;               // m
};

class WitnessBudgetExhausted : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// For a total, all-accepting, unlimited distance automaton: a lasso word on
// which every infinite run has limit average >= 1/m. The invariant is
// re-checked (min-resolved mean over the lasso product) before returning;
// when the per-segment search budget is exhausted the result is an error,
// never a wrong witness.
UnlimitedWitness unlimited_witness(const DistanceAutomaton& d, int segment_length_budget = 0);

// Minimum over infinite runs of the limit-average of d's weights on w.
Rational min_run_mean_on_lasso(const DistanceAutomaton& d, const LassoWord& w);

}  // namespace quantsafe
