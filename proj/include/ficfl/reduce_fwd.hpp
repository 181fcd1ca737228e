#pragma once

#include <map>
#include <string>

#include "ficfl/netprog.hpp"
#include "ficfl/oracle.hpp"

namespace ficfl {

// Everything produced by the forward reduction: the counter program that
// simulates the annotated-grammar walk, its compilation, the level
// certificate, and the name maps tying grammar entities to counters.
struct ForwardArtifact {
  NetProgram program;
  Grammar annotated;          // annotation at bound kb (levels 0..kb)
  CompiledProgram compiled;   // compiled.net is the inhibitor net
  IndexFunction f;            // passes is_weak on compiled.net
  Multiset target;            // exactly {halt place: 1}
  Valuation counter_level;    // marking-matrix counters -> their level
  std::map<std::string, std::string> call_counter;  // annotated var -> counter
};

// Counter program simulating the level-bounded walk for words of the
// annotated grammar at bound kb, from marking m to m_prime.  Counters:
// one call counter per annotated variable, plus initial/final marking
// matrices i<j>.<place> and f<j>.<place> for every level j in 0..kb.
NetProgram build_forward_program(const ProblemInstance& inst, int kb,
                                 const Multiset& m, const Multiset& m_prime);

// build_forward_program + compile + level certificate (throws NotWeak on a
// construction bug) + target marking.
ForwardArtifact build_forward_artifact(const ProblemInstance& inst, int kb,
                                       const Multiset& m,
                                       const Multiset& m_prime);

struct ForwardDecision {
  ReachResult result;
  std::optional<ForwardArtifact> artifact;  // absent when inst.k == 0
};

// Decides index-bounded reachability by exact-marking search on the
// compiled program net.  inst.k must be present; derivations of index
// <= k correspond to the annotation bound k - 1, so k == 0 is an
// immediate exact "no".
ForwardDecision forward_decide(const ProblemInstance& inst,
                               const SearchBudget& budget);

}  // namespace ficfl
