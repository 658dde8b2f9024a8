#pragma once

#include <optional>

#include "quantsafe/automaton.hpp"
#include "quantsafe/eval.hpp"

namespace quantsafe {

enum class ClosureKind { InfForm, ValForm, Identity };

// Safety-closure automaton together with the analysis it was built from.
// In Inf-form the graph is the (possibly monotone-converted) source graph
// with every transition into q reweighted to theta_q, so run weights are
// nonincreasing and eventually constant. For Inf and DSum the closure is the
// automaton itself (their value functions are safe).
struct ClosureArtifact {
  Automaton closure;
  ClosureKind kind;
  // the automaton the reweighting was applied to (monotone form for Sup,
  // the source otherwise); equal to `closure` up to weights
  std::optional<Automaton> base;
  TopValueTable tops;  // per-state tops of `base` (empty for Identity)

  Rational top() const;
};

ClosureArtifact safety_closure_inf(const Automaton& a);

// The Inf-form closure reinterpreted under the source's value function
// (sound because closure runs have eventually-constant nonincreasing
// weights). Only for LimInf/LimSup/LimInfAvg/LimSupAvg.
ClosureArtifact safety_closure_val(const Automaton& a);

// Determinization of an Inf-automaton: states map each source state to the
// best (maximal) running minimum among runs reaching it; the emitted weight
// is the maximal entry of the target mapping.
Automaton determinize_inf(const Automaton& a);

}  // namespace quantsafe
