#pragma once

#include <cstdint>
#include <optional>

#include "quantsafe/automaton.hpp"
#include "quantsafe/omega.hpp"

namespace quantsafe {

// Small deterministic PRNG (splitmix64) so generated automata are
// byte-identical across platforms and toolchains.
struct SplitMix64 {
  uint64_t state;
  explicit SplitMix64(uint64_t seed) : state(seed) {}
  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  // uniform in [0, n)
  uint64_t below(uint64_t n) { return next() % n; }
  // true with probability num/den
  bool chance(uint64_t num, uint64_t den) { return below(den) < num; }
};

struct GenParams {
  uint64_t seed = 0;
  int states = 3;
  int letters = 2;
  ValFn valfn = ValFn::LimSup;
  std::vector<Rational> weights;          // defaults to {0,1,2}
  std::optional<Rational> discount;       // defaults to 1/2 for dsum
  bool deterministic = false;
  // chance (out of 100) of an extra transition per (state, letter)
  int extra_percent = 35;
};

// Seeded random total automaton; reproducible for a fixed parameter set.
Automaton gen_random_automaton(const GenParams& p);

// Hardness-gadget construction: from an NFA over {a,b}, the Val-automaton
// over {a,b,#} whose constancy mirrors the NFA's universality (weight-1
// sigma-transitions; # moves to a 0-sink from rejecting states and to a
// 1-sink from accepting ones). The NFA is completed with a rejecting sink
// first; it must have a single initial state.
Automaton build_gadget(const Nfa& nfa, ValFn valfn, std::optional<Rational> discount);

}  // namespace quantsafe
