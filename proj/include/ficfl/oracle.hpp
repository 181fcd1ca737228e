#pragma once

#include <optional>

#include "ficfl/grammar.hpp"
#include "ficfl/petri.hpp"

namespace ficfl {

// A plain net, a grammar over its transitions, and a target marking: the
// question is whether some word of the (index-bounded) language fires from
// the initial marking to m_final.
struct ProblemInstance {
  PetriNet net;
  Grammar grammar;
  std::vector<int> binding;  // terminal id -> transition index
  int start = 0;
  std::optional<int> k;
  Multiset m_final;

  // Throws Error on dangling bindings, bad start variable, inhibitor arcs,
  // or an empty transition set.
  void validate() const;
};

// Terminal word -> transition-index word via the instance's binding.
Word bind_word(const ProblemInstance& inst, const Word& terminals);

// Brute-force baseline: enumerate the bounded language shortest-first and
// fire every word.  The witness is the terminal word (length-minimal, then
// lexicographically least).  ExhaustedNo only when the language is provably
// empty, or when enumeration was complete and the caller declares the
// length bound exhaustive for this instance; otherwise a miss is
// BudgetExceeded.
ReachResult reach_along(const ProblemInstance& inst, const SearchBudget& budget,
                        bool exhaustive = false);

}  // namespace ficfl
