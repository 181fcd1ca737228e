#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ficfl/budget.hpp"
#include "ficfl/multiset.hpp"
#include "ficfl/symtab.hpp"

namespace ficfl {

struct Transition {
  std::string name;
  Multiset in;           // I(t), over place ids
  Multiset out;          // O(t)
  std::set<int> zero;    // Z(t): places that must be empty
};

// Petri net with inhibitor arcs.  Z(t) = {} everywhere makes it a plain PN;
// the PNW subclass is characterized by is_weak below.
struct PetriNet {
  SymbolTable places;
  std::vector<Transition> transitions;
  Multiset initial;

  int add_place(const std::string& name, std::int64_t init = 0) {
    int id = places.intern(name);
    if (init > 0) initial.add(id, init);
    return id;
  }

  int add_transition(Transition t) {
    transitions.push_back(std::move(t));
    return static_cast<int>(transitions.size()) - 1;
  }

  std::optional<int> find_transition(const std::string& name) const {
    for (size_t i = 0; i < transitions.size(); ++i)
      if (transitions[i].name == name) return static_cast<int>(i);
    return std::nullopt;
  }

  bool plain() const {
    for (auto& t : transitions)
      if (!t.zero.empty()) return false;
    return true;
  }

  // Every transition preserves the token sum.
  bool conservative() const {
    for (auto& t : transitions)
      if (t.in.total() != t.out.total()) return false;
    return true;
  }
};

// Level per place id; total on the net's places.
using IndexFunction = std::vector<std::int64_t>;

struct WeakViolation {
  int place;       // p: should be tested but is not
  int other;       // p' in Z(t) with f(place) <= f(other)
  int transition;  // t
};

bool is_weak(const PetriNet& net, const IndexFunction& f,
             std::vector<WeakViolation>* violations = nullptr);

// Returns an f passing is_weak iff one exists; absent means the net is PNI
// but not PNW.
std::optional<IndexFunction> infer_index_function(const PetriNet& net);

enum class Verdict { Reached, ExhaustedNo, BudgetExceeded };

const char* verdict_name(Verdict v);

struct ReachResult {
  Verdict verdict = Verdict::BudgetExceeded;
  std::optional<Word> witness;  // present iff verdict == Reached
  std::int64_t states_explored = 0;
  std::int64_t states_pruned = 0;
};

bool enabled(const PetriNet& net, const Multiset& m, int t);
std::optional<Multiset> fire(const PetriNet& net, const Multiset& m, int t);
// Fires w (transition indices) left to right; absent if some prefix is
// disabled.  fire_word(m, {}) == m.
std::optional<Multiset> fire_word(const PetriNet& net, const Multiset& m,
                                  const Word& w);

// BFS from net.initial; witnesses are therefore length-minimal.  ExhaustedNo
// only when the frontier emptied with zero pruned states.
ReachResult bounded_reach(const PetriNet& net, const Multiset& target,
                          const SearchBudget& budget);

}  // namespace ficfl
