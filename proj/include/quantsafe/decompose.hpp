#pragma once

#include "quantsafe/automaton.hpp"

namespace quantsafe {

// Safety-liveness decomposition A(w) = min(B(w), C(w)): B is the safety
// closure (an Inf automaton for Sup sources, same value function for
// LimInf/LimSup), C keeps the source weights except that transitions agreeing
// with B are raised to the top value. For Inf/DSum the decomposition is
// trivial (B = A, C = constant top).
struct Decomposition {
  Automaton safety_part;
  Automaton liveness_part;
  Automaton source_form;  // the automaton actually decomposed
};

Decomposition decompose(const Automaton& a);

// Exponential determinization front-ends for nondeterministic inputs.
Automaton determinize_sup(const Automaton& a);
Automaton determinize_liminf(const Automaton& a);

}  // namespace quantsafe
