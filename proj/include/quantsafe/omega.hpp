#pragma once

#include <optional>
#include <string>
#include <vector>

#include "quantsafe/automaton.hpp"

namespace quantsafe {

// Boolean omega-automata with transition-based acceptance.
//
//   Safety       accepts w iff some infinite run exists (the automaton may be
//                incomplete; all transitions are accepting by convention)
//   Reachability accepts w iff some infinite run takes an accepting transition
//   Buchi        accepts w iff some run takes accepting transitions infinitely often
//   CoBuchi      accepts w iff some run eventually takes only accepting transitions
enum class Acceptance { Safety, Reachability, Buchi, CoBuchi };

const char* acceptance_name(Acceptance a);

struct OTransition {
  int src;
  int letter;
  int dst;
  bool acc;
};

struct OmegaAutomaton {
  std::vector<std::string> alphabet;
  int num_states = 0;
  int initial = 0;
  std::vector<OTransition> trans;
  Acceptance acceptance = Acceptance::Buchi;

  bool is_complete() const;
  bool is_deterministic() const;  // at most one transition per (state, letter)
  std::vector<std::vector<int>> out_index() const;  // (q,letter) -> transition ids
};

// 1-state automaton accepting all infinite words.
OmegaAutomaton universal_omega(std::vector<std::string> alphabet);

// Recognizes { w | A(w) >= v } for Inf/Sup/LimInf/LimSup automata:
// Inf -> Safety over the >=v-restricted graph, Sup -> Reachability,
// LimSup -> Buchi, LimInf -> CoBuchi, each with accepting = weight >= v.
OmegaAutomaton threshold_automaton(const Automaton& a, const Rational& v);

bool lasso_member(const OmegaAutomaton& b, const LassoWord& w);

// Language complement of a Buchi automaton, via transition-profile
// (Ramsey) factorizations.
OmegaAutomaton complement_buchi(const OmegaAutomaton& b);

// Breakpoint (Miyano-Hayashi style) determinization of a coBuchi automaton;
// output is deterministic, complete and language-equal, <= 3^|Q| states
// plus one sink.
OmegaAutomaton determinize_cobuchi(const OmegaAutomaton& b);

// Equivalent Buchi automaton (identity for Buchi; Safety marks everything
// accepting; Reachability and CoBuchi use a two-copy construction).
OmegaAutomaton to_buchi(const OmegaAutomaton& b);

// Witness lasso in L(b), or nullopt when L(b) is empty.
std::optional<LassoWord> find_accepted_lasso(const OmegaAutomaton& b);
inline bool is_empty(const OmegaAutomaton& b) { return !find_accepted_lasso(b).has_value(); }

struct ContainResult {
  bool contained = false;
  std::optional<LassoWord> counterexample;  // in inner, not in outer
};

// Decides L(inner) subseteq L(outer); a counterexample is re-checked with
// lasso_member against both operands before being returned.
ContainResult contains(const OmegaAutomaton& outer, const OmegaAutomaton& inner);

struct SafetyLanguageResult {
  bool is_safety = false;
  std::optional<LassoWord> counterexample;  // in the closure, not in L(b)
};

// True iff L(b) equals its topological closure. The closure automaton is b
// restricted to states with nonempty residual language, read as Safety.
SafetyLanguageResult is_safety_language(const OmegaAutomaton& b);

// Closure automaton of L(b) (restriction to live states, Safety acceptance).
OmegaAutomaton closure_automaton(const OmegaAutomaton& b);

// Boolean liveness: every finite word extends into L(b).
bool boolean_live(const OmegaAutomaton& b);

// Finite-word automaton; nfa_universal treats all states as accepting.
struct Nfa {
  std::vector<std::string> alphabet;
  std::vector<std::string> state_names;
  std::vector<int> initials;
  std::vector<int> accepting;  // used by fixtures/gadget, ignored by nfa_universal
  struct Trans {
    int src, letter, dst;
  };
  std::vector<Trans> trans;
};

struct NfaUniversalResult {
  bool universal = false;
  std::vector<int> witness;  // shortest word on which every run dies
};

// Universality of a (possibly incomplete) NFA in which all states are
// accepting: universal iff no word kills every run. Subset construction with
// antichain pruning; the witness is a shortest such word.
NfaUniversalResult nfa_universal(const Nfa& n);

}  // namespace quantsafe
