#include "quantsafe/automaton.hpp"

#include <algorithm>
#include <set>

namespace quantsafe {

const char* valfn_name(ValFn v) {
  switch (v) {
    case ValFn::Inf: return "inf";
    case ValFn::Sup: return "sup";
    case ValFn::LimInf: return "liminf";
    case ValFn::LimSup: return "limsup";
    case ValFn::LimInfAvg: return "liminfavg";
    case ValFn::LimSupAvg: return "limsupavg";
    case ValFn::DSum: return "dsum";
  }
  return "?";
}

std::optional<ValFn> valfn_from_name(const std::string& name) {
  for (ValFn v : {ValFn::Inf, ValFn::Sup, ValFn::LimInf, ValFn::LimSup, ValFn::LimInfAvg,
                  ValFn::LimSupAvg, ValFn::DSum})
    if (name == valfn_name(v)) return v;
  return std::nullopt;
}

bool is_limit_average(ValFn v) { return v == ValFn::LimInfAvg || v == ValFn::LimSupAvg; }

bool is_finite_valued(ValFn v) {
  return v == ValFn::Inf || v == ValFn::Sup || v == ValFn::LimInf || v == ValFn::LimSup;
}

void ValueFunction::validate() const {
  if (tag == ValFn::DSum) {
    if (!discount) throw ValidationError("dsum automaton requires a discount factor");
    if (!(*discount > Rational(0) && *discount < Rational(1)))
      throw ValidationError("discount factor must lie strictly between 0 and 1");
  } else if (discount) {
    throw ValidationError("discount factor is only allowed for dsum");
  }
}

Automaton::Automaton(std::vector<std::string> alphabet, std::vector<std::string> state_names,
                     StateId initial, std::vector<Transition> transitions, ValueFunction valfn)
    : alphabet_(std::move(alphabet)),
      state_names_(std::move(state_names)),
      initial_(initial),
      transitions_(std::move(transitions)),
      valfn_(std::move(valfn)) {
  if (alphabet_.empty()) throw ValidationError("alphabet must be nonempty");
  if (state_names_.empty()) throw ValidationError("state set must be nonempty");
  {
    std::set<std::string> seen(alphabet_.begin(), alphabet_.end());
    if (seen.size() != alphabet_.size()) throw ValidationError("duplicate alphabet symbol");
  }
  int n = (int)state_names_.size();
  int k = (int)alphabet_.size();
  if (initial_ < 0 || initial_ >= n) throw ValidationError("initial state out of range");
  valfn_.validate();

  out_.assign((size_t)n * k, {});
  for (int i = 0; i < (int)transitions_.size(); i++) {
    const Transition& t = transitions_[i];
    if (t.src < 0 || t.src >= n || t.dst < 0 || t.dst >= n)
      throw ValidationError("transition endpoint out of range");
    if (t.letter < 0 || t.letter >= k) throw ValidationError("transition letter out of range");
    out_[(size_t)t.src * k + t.letter].push_back(i);
  }

  deterministic_ = true;
  for (int q = 0; q < n; q++)
    for (int s = 0; s < k; s++) {
      size_t deg = out_[(size_t)q * k + s].size();
      if (deg == 0)
        throw ValidationError("not total: state '" + state_names_[q] + "' has no transition on '" +
                              alphabet_[s] + "'");
      if (deg > 1) deterministic_ = false;
    }
}

std::optional<int> Automaton::letter_index(const std::string& name) const {
  for (int i = 0; i < (int)alphabet_.size(); i++)
    if (alphabet_[i] == name) return i;
  return std::nullopt;
}

std::vector<Rational> Automaton::weight_values() const {
  std::vector<Rational> ws;
  for (const Transition& t : transitions_) ws.push_back(t.weight);
  std::sort(ws.begin(), ws.end());
  ws.erase(std::unique(ws.begin(), ws.end()), ws.end());
  return ws;
}

Automaton Automaton::with_valfn(ValueFunction vf) const {
  return Automaton(alphabet_, state_names_, initial_, transitions_, std::move(vf));
}

Automaton Automaton::with_transitions(std::vector<Transition> ts) const {
  return Automaton(alphabet_, state_names_, initial_, std::move(ts), valfn_);
}

Automaton reroot(const Automaton& a, StateId q) {
  if (q < 0 || q >= a.num_states()) throw ValidationError("reroot: unknown state id");
  return Automaton(a.alphabet(), a.state_names(), q, a.transitions(), a.valfn());
}

std::string LassoWord::str(const std::vector<std::string>& alphabet) const {
  std::string out;
  for (int s : prefix) out += alphabet[s] + " ";
  out += "(";
  for (size_t i = 0; i < loop.size(); i++) {
    if (i) out += " ";
    out += alphabet[loop[i]];
  }
  out += ")^w";
  return out;
}

void check_lasso_alphabet(const Automaton& a, const LassoWord& w) {
  int k = a.num_letters();
  for (int s : w.prefix)
    if (s < 0 || s >= k) throw ValidationError("lasso letter out of alphabet");
  for (int s : w.loop)
    if (s < 0 || s >= k) throw ValidationError("lasso letter out of alphabet");
  if (w.loop.empty()) throw ValidationError("lasso word: empty loop");
}

}  // namespace quantsafe
