#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ficfl/grammar.hpp"
#include "ficfl/petri.hpp"

namespace ficfl {

// Global context of the recursive walk: one initial and one final marking
// per allowance level, plus the level currently being served.  A call at
// level l is proper when every level below l is empty on both sides.
struct TraverseState {
  std::vector<Multiset> mi;  // indexed by allowance 0..k
  std::vector<Multiset> mf;
  int level = 0;

  bool proper() const {
    for (int j = 0; j < level; ++j)
      if (!mi[static_cast<size_t>(j)].empty() ||
          !mf[static_cast<size_t>(j)].empty())
        return false;
    return true;
  }
};

// Allowance encoded in a variable name of an annotated grammar ("X[2]" ->
// 2); absent if the name carries no annotation.
std::optional<int> parse_allowance(const std::string& name);

// One resolved call in a successful walk, in execution (pre-)order.
struct TraceEntry {
  int var = 0;            // annotated variable id
  Multiset mi, mf;        // the call's slice of the context
  int production = 0;     // production picked for this call
  std::optional<Multiset> transfer;  // binary cases: split moved across
  std::optional<Multiset> add;       // binary cases: guessed interface
};

struct TraverseResult {
  Verdict verdict = Verdict::BudgetExceeded;
  std::vector<TraceEntry> trace;   // filled iff verdict == Reached
  std::optional<Word> witness;     // terminal word; iff verdict == Reached
  std::int64_t calls = 0;
};

// Bounded backtracking resolution of the nondeterministic walk: true iff
// some choice of productions and qty multisets (every marking kept within
// budget.token_cap tokens) succeeds.  A failed search is ExhaustedNo only
// when the net is conservative and the cap covers the endpoint totals, in
// which case the cap provably loses no run; otherwise BudgetExceeded.
TraverseResult run_traverse(const PetriNet& net, const Grammar& gk, int x,
                            const Multiset& m, const Multiset& m_prime,
                            const std::vector<int>& binding,
                            const SearchBudget& budget);

// Entry from an explicit context: throws ImproperCall unless every level
// below state.level is empty, then runs on the slice at state.level.
TraverseResult run_traverse(const PetriNet& net, const Grammar& gk, int x,
                            const TraverseState& state,
                            const std::vector<int>& binding,
                            const SearchBudget& budget);

// Deterministically replays a recorded trace, re-checking every marking
// update, the inter-call assertions, and the final-emptiness postcondition.
bool replay_trace(const PetriNet& net, const Grammar& gk, int x,
                  const Multiset& m, const Multiset& m_prime,
                  const std::vector<int>& binding,
                  const std::vector<TraceEntry>& trace);

// JSON rendering of a trace for goldens and external replay.
std::string trace_to_json(const std::vector<TraceEntry>& trace,
                          const Grammar& gk, const SymbolTable& places);

}  // namespace ficfl
