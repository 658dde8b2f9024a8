#pragma once

#include <optional>
#include <string>
#include <vector>

#include "quantsafe/automaton.hpp"

namespace quantsafe {

enum class Question { Constant, Safe, Live };

const char* question_name(Question q);

// Analysis result with a machine-checkable witness. A false `constant`
// verdict carries a lasso w with A(w) < top; a false `safe` verdict a lasso
// with closure(w) > A(w); a false `live` verdict a finite prefix after which
// the reachable tops stay below the top value. Witnesses are re-validated
// before the verdict is returned.
struct Verdict {
  Question question = Question::Constant;
  bool answer = false;
  std::optional<Rational> value;  // the top value / constant involved
  std::optional<LassoWord> lasso_witness;
  std::optional<std::vector<int>> prefix_witness;  // letters
  std::vector<std::string> method;  // reduction trace
};

Verdict is_constant(const Automaton& a);
Verdict is_constant_dsum(const Automaton& a);
Verdict is_constant_limavg(const Automaton& a);

Verdict is_safe(const Automaton& a);
Verdict is_live(const Automaton& a);

// Independent oracle (total-order characterization): safe iff every
// threshold language is a boolean safety language. Finite-valued only.
bool crosscheck_safety_thresholds(const Automaton& a);

// Independent oracle: live iff every threshold language with v <= top is
// boolean live. Finite-valued only.
bool crosscheck_liveness_thresholds(const Automaton& a);

}  // namespace quantsafe
