#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "quantsafe/automaton.hpp"

namespace quantsafe {

struct Nfa;              // omega.hpp
struct DistanceAutomaton;  // limitedness.hpp

class ParseError : public std::runtime_error {
public:
  ParseError(int line, int col, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
        line(line),
        col(col) {}
  int line;
  int col;
};

// Text format (see README): header lines (valfn/discount/alphabet/initial)
// followed by transition lines "p -- letter:weight --> q". '#' starts a
// comment. Duplicate transition lines denote parallel transitions.
Automaton parse_automaton(std::istream& in);
Automaton parse_automaton_string(const std::string& text);
Automaton load_automaton(const std::string& path);

std::string serialize_automaton(const Automaton& a);

// Distance automata reuse the format with "valfn: distance", weights in
// {0,1}, a multi-state "initial:" line and an "accepting:" line.
DistanceAutomaton parse_distance_automaton(std::istream& in);
DistanceAutomaton parse_distance_automaton_string(const std::string& text);
DistanceAutomaton load_distance_automaton(const std::string& path);
std::string serialize_distance_automaton(const DistanceAutomaton& d);

// NFA fixture format: "states:", "initial:", "accepting:" lines and
// transition lines "p -- letter --> q" (no weights).
Nfa parse_nfa(std::istream& in);
Nfa parse_nfa_string(const std::string& text);
Nfa load_nfa(const std::string& path);
std::string serialize_nfa(const Nfa& n);

// True when the file at `path` declares "valfn: distance".
bool file_is_distance_automaton(const std::string& path);

}  // namespace quantsafe
