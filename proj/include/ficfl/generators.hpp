#pragma once

#include <random>

#include "ficfl/grammar.hpp"
#include "ficfl/petri.hpp"

namespace ficfl {

// Random grammar in the restricted fragment (bodies YZ, single terminal, or
// epsilon).  Shared by the unit tests and the differential-check harness so
// both explore the same distribution.
Grammar random_restricted_grammar(std::mt19937& rng, int max_vars = 5,
                                  int max_prods = 12, int num_terminals = 2);

// Random plain net whose transitions all preserve the token sum, so bounded
// search with token_cap = total(initial) is exhaustive.
PetriNet random_conservative_net(std::mt19937& rng, int places,
                                 int num_transitions, int tokens);

// Random net with inhibitor arcs drawn from a nested chain of test sets,
// which keeps the result in the weak fragment by construction.
PetriNet random_weak_net(std::mt19937& rng, int places, int num_transitions,
                         int tokens);

}  // namespace ficfl
