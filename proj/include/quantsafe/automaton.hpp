#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "quantsafe/rational.hpp"

namespace quantsafe {

enum class ValFn { Inf, Sup, LimInf, LimSup, LimInfAvg, LimSupAvg, DSum };

const char* valfn_name(ValFn v);
std::optional<ValFn> valfn_from_name(const std::string& name);
bool is_limit_average(ValFn v);
// Value functions whose word values always lie in the transition weight set.
bool is_finite_valued(ValFn v);

struct ValueFunction {
  ValFn tag = ValFn::Inf;
  std::optional<Rational> discount;  // present iff tag == DSum, in (0,1)

  void validate() const;
};

using StateId = int;

struct Transition {
  StateId src;
  int letter;
  Rational weight;
  StateId dst;
};

class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Nondeterministic quantitative automaton: total, finitely many weighted
// transitions, one initial state. Parallel transitions (same source, letter
// and target with different weights) are kept as a multiset. Immutable after
// construction.
class Automaton {
public:
  Automaton(std::vector<std::string> alphabet, std::vector<std::string> state_names,
            StateId initial, std::vector<Transition> transitions, ValueFunction valfn);

  const std::vector<std::string>& alphabet() const { return alphabet_; }
  const std::vector<std::string>& state_names() const { return state_names_; }
  int num_states() const { return (int)state_names_.size(); }
  int num_letters() const { return (int)alphabet_.size(); }
  StateId initial() const { return initial_; }
  const std::vector<Transition>& transitions() const { return transitions_; }
  const ValueFunction& valfn() const { return valfn_; }

  bool deterministic() const { return deterministic_; }

  // Transition indices leaving (state, letter); totality guarantees nonempty.
  const std::vector<int>& out(StateId q, int letter) const {
    return out_[(size_t)q * alphabet_.size() + letter];
  }

  std::optional<int> letter_index(const std::string& name) const;
  // Sorted distinct transition weights.
  std::vector<Rational> weight_values() const;

  Automaton with_valfn(ValueFunction vf) const;
  Automaton with_transitions(std::vector<Transition> ts) const;

private:
  std::vector<std::string> alphabet_;
  std::vector<std::string> state_names_;
  StateId initial_;
  std::vector<Transition> transitions_;
  ValueFunction valfn_;
  std::vector<std::vector<int>> out_;
  bool deterministic_;
};

// A^q: same automaton re-rooted at q.
Automaton reroot(const Automaton& a, StateId q);

// Ultimately periodic word prefix.loop^omega, as letter indices into the
// automaton's alphabet. The loop is nonempty; the prefix may be empty.
struct LassoWord {
  std::vector<int> prefix;
  std::vector<int> loop;

  LassoWord() = default;
  LassoWord(std::vector<int> u, std::vector<int> v) : prefix(std::move(u)), loop(std::move(v)) {
    if (loop.empty()) throw ValidationError("lasso word: empty loop");
  }

  int period_start() const { return (int)prefix.size(); }
  int total_len() const { return (int)(prefix.size() + loop.size()); }
  int letter_at(int pos) const {
    return pos < (int)prefix.size() ? prefix[pos] : loop[pos - prefix.size()];
  }
  int next_pos(int pos) const { return pos + 1 < total_len() ? pos + 1 : (int)prefix.size(); }

  std::string str(const std::vector<std::string>& alphabet) const;

  bool operator==(const LassoWord& o) const { return prefix == o.prefix && loop == o.loop; }
};

void check_lasso_alphabet(const Automaton& a, const LassoWord& w);

}  // namespace quantsafe
