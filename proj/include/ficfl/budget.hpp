#pragma once

#include <cstdint>

namespace ficfl {

// Caps that make every semi-decision procedure total.  A cap of the right
// size turns "the frontier emptied" into an exact negative; anything short
// of that is reported as BudgetExceeded, never as "no".
struct SearchBudget {
  std::int64_t token_cap = 64;              // max token sum per marking
  std::int64_t step_cap = 1'000'000;        // max states / configurations explored
  int len_cap = 8;                          // max word length enumerated
  std::int64_t derivation_step_cap = 5'000'000;  // max grammar work items

  bool operator==(const SearchBudget&) const = default;
};

}  // namespace ficfl
