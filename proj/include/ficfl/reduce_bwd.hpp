#pragma once

#include <utility>

#include "ficfl/oracle.hpp"

namespace ficfl {

// A weak-inhibitor net brought to the canonical shape the backward
// reduction expects:
//   (i)   places are sorted by level: f(s_1) <= ... <= f(s_{n+1});
//   (ii)  the initial marking is one token on the top place s_{n+1} and the
//         target marking is empty;
//   (iii) every zero-test set is a prefix {s_1..s_l} of the order, so the
//         sets form a chain inside {s_1..s_n};
//   (iv)  no transition produces into a place it tests for zero.
struct NormalizedPNW {
  PetriNet net;
  IndexFunction f;
  int n = 0;  // s_{n+1} (the last place) is never tested

  // True iff the shape above holds (the target marking being empty is
  // implicit: normalization folds the original target into a finish
  // transition).
  bool canonical() const;
};

// Gadget construction: a boot place/transition installs the original
// initial marking, a run place threads through every original transition,
// a finish transition consumes the original target, and productions into
// tested places are deferred through a locked buffer.  Reaching the
// original target in the input is equivalent to reaching the empty marking
// in the output.  Inputs already in canonical shape pass through
// unchanged.  Throws NotWeak unless is_weak(net, f).
NormalizedPNW normalize_pnw(const PetriNet& net, const IndexFunction& f,
                            const Multiset& m_final);

// Plain net made of the test-erased copy of the canonical net plus one
// detached pump/drain widget per testable place.  Transition layout:
// indices 0..m-1 are the original transitions with their zero tests
// erased, m..m+n-1 the pumps p_1..p_n, m+n..m+2n-1 the drains c_1..c_n.
struct WidgetNet {
  PetriNet net;
  std::vector<int> r;      // place id of r_i (index 0 = r_1)
  std::vector<int> pump;   // transition index of p_i
  std::vector<int> drain;  // transition index of c_i
};

WidgetNet build_nprime(const NormalizedPNW& np);

// The balancing words of a transition, over widget-net transition indices:
// u = p_1^{I(t)(s_1)} ... p_n^{I(t)(s_n)}, v = c_1^{O(t)(s_1)} ... —
// firing v . t . u preserves every s_i + r_i token sum.
std::pair<Word, Word> build_words(const NormalizedPNW& np, int t);

// Grammar over the widget net's transitions (terminal id == transition
// index) whose index-bounded language restricts the widget net to
// balanced pump/drain discipline:
//   A_l -> eps | v.t.u A_l (one per transition with |Z(t)| == l)
//        | D_l A_l                                (l >= 1)
//   D_l -> p_l D_l c_l | A_{l-1}
// started at A_n; the language of interest is the (n+1)-index slice.
struct TraceGrammar {
  Grammar grammar;
  int start = 0;  // A_n
  int index = 0;  // n + 1
  std::vector<int> a;  // variable id of A_l, l = 0..n
  std::vector<int> d;  // variable id of D_l, l = 1..n (d[0] = D_1)
};

TraceGrammar build_trace_grammar(const NormalizedPNW& np);

// Assembled oracle instance: widget net, trace grammar, identity binding,
// start A_n, k = n + 1, empty target.
ProblemInstance backward_instance(const NormalizedPNW& np);

// normalize -> widgets -> trace grammar -> bounded language search for the
// empty marking.  Verdict semantics are reach_along's; `exhaustive`
// declares the budget's length bound complete for this instance.
ReachResult backward_decide(const PetriNet& net, const IndexFunction& f,
                            const Multiset& m_final,
                            const SearchBudget& budget,
                            bool exhaustive = false);

}  // namespace ficfl
