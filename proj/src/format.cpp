#include "quantsafe/format.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "quantsafe/limitedness.hpp"
#include "quantsafe/omega.hpp"

namespace quantsafe {

namespace {

struct Line {
  int number;
  std::string text;
};

std::vector<Line> read_lines(std::istream& in) {
  std::vector<Line> lines;
  std::string raw;
  int no = 0;
  while (std::getline(in, raw)) {
    no++;
    auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    lines.push_back({no, raw});
  }
  return lines;
}

std::vector<std::string> tokens(const std::string& s) {
  std::istringstream ss(s);
  std::vector<std::string> out;
  std::string t;
  while (ss >> t) out.push_back(t);
  return out;
}

bool blank(const std::string& s) {
  return s.find_first_not_of(" \t\r") == std::string::npos;
}

// "key: v1 v2 ..." -> (key, values); nullopt when the line is not a header.
std::optional<std::pair<std::string, std::vector<std::string>>> header_line(const std::string& s) {
  auto colon = s.find(':');
  if (colon == std::string::npos) return std::nullopt;
  if (s.find("--") != std::string::npos && s.find("--") < colon) return std::nullopt;
  std::string key = s.substr(0, colon);
  auto ts = tokens(key);
  if (ts.size() != 1) return std::nullopt;
  return std::make_pair(ts[0], tokens(s.substr(colon + 1)));
}

struct TransLine {
  std::string src, letter, weight, dst;
  bool has_weight;
};

// "p -- letter:weight --> q" (weight optional for NFA lines).
std::optional<TransLine> transition_line(const Line& ln) {
  const std::string& s = ln.text;
  auto a1 = s.find("--");
  if (a1 == std::string::npos) return std::nullopt;
  auto a2 = s.find("-->", a1 + 2);
  if (a2 == std::string::npos) throw ParseError(ln.number, (int)a1 + 1, "expected '-->'");
  TransLine t;
  auto srcs = tokens(s.substr(0, a1));
  if (srcs.size() != 1) throw ParseError(ln.number, 1, "expected one source state before '--'");
  t.src = srcs[0];
  std::string label = s.substr(a1 + 2, a2 - a1 - 2);
  auto dsts = tokens(s.substr(a2 + 3));
  if (dsts.size() != 1) throw ParseError(ln.number, (int)a2 + 4, "expected one target state after '-->'");
  t.dst = dsts[0];
  auto ls = tokens(label);
  if (ls.size() != 1) throw ParseError(ln.number, (int)a1 + 3, "expected 'letter:weight' label");
  auto colon = ls[0].find(':');
  if (colon == std::string::npos) {
    t.letter = ls[0];
    t.has_weight = false;
  } else {
    t.letter = ls[0].substr(0, colon);
    t.weight = ls[0].substr(colon + 1);
    t.has_weight = true;
    if (t.letter.empty() || t.weight.empty())
      throw ParseError(ln.number, (int)a1 + 3, "malformed 'letter:weight' label");
  }
  return t;
}

struct RawAutomaton {
  std::string valfn;
  std::optional<std::string> discount;
  int discount_line = 0;
  std::vector<std::string> alphabet;
  std::vector<std::string> initials;
  std::vector<std::string> accepting;
  bool has_accepting = false;
  struct RawTrans {
    TransLine t;
    int line;
  };
  std::vector<RawTrans> trans;
  std::vector<std::string> extra_states;
  int valfn_line = 0;
};

RawAutomaton parse_raw(std::istream& in) {
  RawAutomaton raw;
  for (const Line& ln : read_lines(in)) {
    if (blank(ln.text)) continue;
    if (auto t = transition_line(ln)) {
      raw.trans.push_back({*t, ln.number});
      continue;
    }
    auto h = header_line(ln.text);
    if (!h) throw ParseError(ln.number, 1, "unrecognized line");
    auto& [key, vals] = *h;
    if (key == "valfn") {
      if (vals.size() != 1) throw ParseError(ln.number, 1, "valfn expects one value");
      raw.valfn = vals[0];
      raw.valfn_line = ln.number;
    } else if (key == "discount") {
      if (vals.size() != 1) throw ParseError(ln.number, 1, "discount expects one value");
      raw.discount = vals[0];
      raw.discount_line = ln.number;
    } else if (key == "alphabet") {
      raw.alphabet = vals;
    } else if (key == "initial") {
      raw.initials = vals;
    } else if (key == "accepting") {
      raw.accepting = vals;
      raw.has_accepting = true;
    } else if (key == "states") {
      // optional explicit state list; states are also collected implicitly
      raw.extra_states = vals;
    } else {
      throw ParseError(ln.number, 1, "unknown header '" + key + "'");
    }
  }
  return raw;
}

struct StateTable {
  std::vector<std::string> names;
  std::map<std::string, int> index;
  int intern(const std::string& name) {
    auto it = index.find(name);
    if (it != index.end()) return it->second;
    int id = (int)names.size();
    names.push_back(name);
    index.emplace(name, id);
    return id;
  }
};

}  // namespace

Automaton parse_automaton(std::istream& in) {
  RawAutomaton raw = parse_raw(in);
  if (raw.valfn.empty()) throw ParseError(1, 1, "missing 'valfn:' header");
  auto vf = valfn_from_name(raw.valfn);
  if (!vf) throw ParseError(raw.valfn_line, 1, "unknown value function '" + raw.valfn + "'");
  ValueFunction valfn;
  valfn.tag = *vf;
  if (raw.discount) {
    if (*vf != ValFn::DSum)
      throw ParseError(raw.discount_line, 1, "discount is only allowed for valfn dsum");
    try {
      valfn.discount = Rational::parse(*raw.discount);
    } catch (const std::invalid_argument& e) {
      throw ParseError(raw.discount_line, 1, e.what());
    }
  } else if (*vf == ValFn::DSum) {
    throw ParseError(raw.valfn_line, 1, "valfn dsum requires a 'discount:' header");
  }
  if (raw.alphabet.empty()) throw ParseError(1, 1, "missing 'alphabet:' header");
  if (raw.initials.size() != 1) throw ParseError(1, 1, "expected exactly one initial state");
  if (raw.has_accepting)
    throw ParseError(1, 1, "'accepting:' is only valid for distance automata");

  std::map<std::string, int> letter;
  for (int i = 0; i < (int)raw.alphabet.size(); i++) letter[raw.alphabet[i]] = i;

  StateTable st;
  for (const auto& s : raw.extra_states) st.intern(s);
  st.intern(raw.initials[0]);
  std::vector<Transition> ts;
  for (const auto& [t, line] : raw.trans) {
    auto li = letter.find(t.letter);
    if (li == letter.end())
      throw ParseError(line, 1, "letter '" + t.letter + "' not in alphabet");
    if (!t.has_weight) throw ParseError(line, 1, "transition is missing a weight");
    Rational w;
    try {
      w = Rational::parse(t.weight);
    } catch (const std::invalid_argument& e) {
      throw ParseError(line, 1, e.what());
    }
    ts.push_back({st.intern(t.src), li->second, w, st.intern(t.dst)});
  }
  ValueFunction vfc = valfn;
  try {
    return Automaton(raw.alphabet, st.names, st.index.at(raw.initials[0]), std::move(ts),
                     std::move(vfc));
  } catch (const ValidationError&) {
    throw;
  }
}

Automaton parse_automaton_string(const std::string& text) {
  std::istringstream ss(text);
  return parse_automaton(ss);
}

Automaton load_automaton(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  return parse_automaton(f);
}

std::string serialize_automaton(const Automaton& a) {
  std::ostringstream out;
  out << "valfn: " << valfn_name(a.valfn().tag) << "\n";
  if (a.valfn().discount) out << "discount: " << a.valfn().discount->str() << "\n";
  out << "alphabet:";
  for (const auto& s : a.alphabet()) out << " " << s;
  out << "\n";
  out << "initial: " << a.state_names()[a.initial()] << "\n";
  std::vector<Transition> ts = a.transitions();
  const auto& names = a.state_names();
  std::stable_sort(ts.begin(), ts.end(), [&](const Transition& x, const Transition& y) {
    if (x.src != y.src && names[x.src] != names[y.src]) return names[x.src] < names[y.src];
    if (x.letter != y.letter) return x.letter < y.letter;
    if (x.dst != y.dst && names[x.dst] != names[y.dst]) return names[x.dst] < names[y.dst];
    return x.weight < y.weight;
  });
  for (const Transition& t : ts)
    out << a.state_names()[t.src] << " -- " << a.alphabet()[t.letter] << ":" << t.weight.str()
        << " --> " << a.state_names()[t.dst] << "\n";
  return out.str();
}

DistanceAutomaton parse_distance_automaton(std::istream& in) {
  RawAutomaton raw = parse_raw(in);
  if (raw.valfn != "distance")
    throw ParseError(raw.valfn_line ? raw.valfn_line : 1, 1, "expected 'valfn: distance'");
  if (raw.alphabet.empty()) throw ParseError(1, 1, "missing 'alphabet:' header");
  if (raw.initials.empty()) throw ParseError(1, 1, "missing 'initial:' header");
  if (!raw.has_accepting) throw ParseError(1, 1, "missing 'accepting:' header");

  std::map<std::string, int> letter;
  for (int i = 0; i < (int)raw.alphabet.size(); i++) letter[raw.alphabet[i]] = i;
  StateTable st;
  for (const auto& s : raw.extra_states) st.intern(s);
  for (const auto& s : raw.initials) st.intern(s);
  for (const auto& s : raw.accepting) st.intern(s);

  DistanceAutomaton d;
  d.alphabet = raw.alphabet;
  for (const auto& [t, line] : raw.trans) {
    auto li = letter.find(t.letter);
    if (li == letter.end()) throw ParseError(line, 1, "letter '" + t.letter + "' not in alphabet");
    if (!t.has_weight) throw ParseError(line, 1, "transition is missing a weight");
    if (t.weight != "0" && t.weight != "1")
      throw ParseError(line, 1, "distance automaton weights must be 0 or 1");
    d.trans.push_back({st.intern(t.src), li->second, st.intern(t.dst), t.weight == "1" ? 1 : 0});
  }
  d.state_names = st.names;
  for (const auto& s : raw.initials) d.initials.push_back(st.index.at(s));
  for (const auto& s : raw.accepting) d.accepting.push_back(st.index.at(s));
  std::sort(d.initials.begin(), d.initials.end());
  d.initials.erase(std::unique(d.initials.begin(), d.initials.end()), d.initials.end());
  std::sort(d.accepting.begin(), d.accepting.end());
  d.accepting.erase(std::unique(d.accepting.begin(), d.accepting.end()), d.accepting.end());
  d.validate();
  return d;
}

DistanceAutomaton parse_distance_automaton_string(const std::string& text) {
  std::istringstream ss(text);
  return parse_distance_automaton(ss);
}

DistanceAutomaton load_distance_automaton(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  return parse_distance_automaton(f);
}

std::string serialize_distance_automaton(const DistanceAutomaton& d) {
  std::ostringstream out;
  out << "valfn: distance\n";
  out << "alphabet:";
  for (const auto& s : d.alphabet) out << " " << s;
  out << "\ninitial:";
  for (int q : d.initials) out << " " << d.state_names[q];
  out << "\naccepting:";
  for (int q : d.accepting) out << " " << d.state_names[q];
  out << "\n";
  for (const auto& t : d.trans)
    out << d.state_names[t.src] << " -- " << d.alphabet[t.letter] << ":" << t.weight << " --> "
        << d.state_names[t.dst] << "\n";
  return out.str();
}

Nfa parse_nfa(std::istream& in) {
  RawAutomaton raw = parse_raw(in);
  if (!raw.valfn.empty()) throw ParseError(raw.valfn_line, 1, "NFA files have no 'valfn:' header");
  if (raw.alphabet.empty()) throw ParseError(1, 1, "missing 'alphabet:' header");
  if (raw.initials.empty()) throw ParseError(1, 1, "missing 'initial:' header");

  std::map<std::string, int> letter;
  for (int i = 0; i < (int)raw.alphabet.size(); i++) letter[raw.alphabet[i]] = i;
  StateTable st;
  for (const auto& s : raw.extra_states) st.intern(s);
  for (const auto& s : raw.initials) st.intern(s);
  for (const auto& s : raw.accepting) st.intern(s);

  Nfa n;
  n.alphabet = raw.alphabet;
  for (const auto& [t, line] : raw.trans) {
    auto li = letter.find(t.letter);
    if (li == letter.end()) throw ParseError(line, 1, "letter '" + t.letter + "' not in alphabet");
    if (t.has_weight) throw ParseError(line, 1, "NFA transitions carry no weight");
    n.trans.push_back({st.intern(t.src), li->second, st.intern(t.dst)});
  }
  n.state_names = st.names;
  for (const auto& s : raw.initials) n.initials.push_back(st.index.at(s));
  for (const auto& s : raw.accepting) n.accepting.push_back(st.index.at(s));
  std::sort(n.initials.begin(), n.initials.end());
  n.initials.erase(std::unique(n.initials.begin(), n.initials.end()), n.initials.end());
  std::sort(n.accepting.begin(), n.accepting.end());
  n.accepting.erase(std::unique(n.accepting.begin(), n.accepting.end()), n.accepting.end());
  return n;
}

Nfa parse_nfa_string(const std::string& text) {
  std::istringstream ss(text);
  return parse_nfa(ss);
}

Nfa load_nfa(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  return parse_nfa(f);
}

std::string serialize_nfa(const Nfa& n) {
  std::ostringstream out;
  out << "states:";
  for (const auto& s : n.state_names) out << " " << s;
  out << "\nalphabet:";
  for (const auto& s : n.alphabet) out << " " << s;
  out << "\ninitial:";
  for (int q : n.initials) out << " " << n.state_names[q];
  out << "\naccepting:";
  for (int q : n.accepting) out << " " << n.state_names[q];
  out << "\n";
  for (const auto& t : n.trans)
    out << n.state_names[t.src] << " -- " << n.alphabet[t.letter] << " --> "
        << n.state_names[t.dst] << "\n";
  return out.str();
}

bool file_is_distance_automaton(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  std::string line;
  while (std::getline(f, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto h = header_line(line);
    if (h && h->first == "valfn") return !h->second.empty() && h->second[0] == "distance";
  }
  return false;
}

}  // namespace quantsafe
