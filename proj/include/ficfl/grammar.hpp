#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ficfl/budget.hpp"
#include "ficfl/multiset.hpp"
#include "ficfl/symtab.hpp"

namespace ficfl {

struct GSym {
  bool terminal = false;
  int id = 0;
  bool operator==(const GSym&) const = default;
  auto operator<=>(const GSym&) const = default;
};

struct Production {
  int head = 0;
  std::vector<GSym> body;  // empty body = epsilon production
  bool operator==(const Production&) const = default;
};

// Context-free grammar.  The restricted fragment allows only bodies of
// shape YZ (two variables), a single terminal, or epsilon.
struct Grammar {
  SymbolTable variables;
  SymbolTable terminals;
  std::vector<Production> productions;

  bool restricted() const;
  GSym var(const std::string& name) { return {false, variables.intern(name)}; }
  GSym term(const std::string& name) { return {true, terminals.intern(name)}; }
  void add(int head, std::vector<GSym> body) {
    productions.push_back({head, std::move(body)});
  }
};

// Name of the annotated copy of `base` with allowance i.
std::string annotated_name(const std::string& base, int i);

// G^[k]: variables X[0..k]; every X -> Y Z yields X[i] -> Y[i-1] Z[i] and
// X[i] -> Y[i] Z[i-1] for i in 1..k; every X -> sigma (or eps) yields
// X[i] -> sigma for i in 0..k.  Productionless annotated variables (such as
// X[0] for a binary-only X) are retained.
Grammar annotate(const Grammar& g, int k);

// One derivation step: production applied and the position (symbol index in
// the sentential form) of the rewritten variable.
struct DerivStep {
  int production = 0;
  int position = 0;
};

struct Derivation {
  std::vector<std::vector<GSym>> forms;  // forms.front() is the start form
  std::vector<DerivStep> steps;          // steps[i]: forms[i] => forms[i+1]
};

// Validates every step and returns the max variable count over all forms.
int check_derivation_index(const Grammar& g, const Derivation& d);

struct LangResult {
  std::set<Word> words;     // terminal ids
  bool complete = false;    // false: derivation-step cap hit, set is partial
  std::int64_t steps = 0;
};

// Bounded-language table for every variable at once: per variable, each
// derivable word of length <= max_len with its minimal derivation index.
// Computing this once and slicing per (variable, k) is much cheaper than
// repeated enum_language calls on the same grammar.
struct LangTable {
  std::vector<std::map<Word, int>> min_index;  // by variable id
  bool complete = false;
  std::int64_t steps = 0;

  std::set<Word> words(int var, std::optional<int> k) const;
};

LangTable enum_table(const Grammar& g, int max_len, const SearchBudget& budget);

// {w in L(A) : |w| <= max_len}, or the k-index approximation when k is
// present.  Exact when complete is true.
LangResult enum_language(const Grammar& g, int start, int max_len,
                         std::optional<int> k, const SearchBudget& budget);

// Explicit derivation certifying w in L(A) (k-index bounded when k given);
// throws InvalidDerivation-style Error if w is not derivable.  The result
// replays through check_derivation_index.
Derivation derive_word(const Grammar& g, int start, const Word& w,
                       std::optional<int> k, const SearchBudget& budget);

// Minimal index over all derivations of any word from each variable
// (length-unbounded); nullopt entries mean L(X) is empty.  Decides
// emptiness of L^(k)(A) exactly: empty iff min_index[A] absent or > k.
std::vector<std::optional<int>> min_derivation_index(const Grammar& g);

// Reference enumeration by breadth-first search over sentential forms.
// Exponential; test oracle for the production path above.
LangResult enum_language_by_forms(const Grammar& g, int start, int max_len,
                                  std::optional<int> k,
                                  const SearchBudget& budget);

struct RestrictedResult {
  Grammar grammar;
  std::map<int, int> variable_map;  // original variable id -> new variable id
};

// Equivalent restricted-form grammar (binarization, terminal promotion,
// unit elimination).  Language preserved per mapped variable; derivation
// index is not preserved in general.
RestrictedResult to_restricted(const Grammar& g);

}  // namespace ficfl
