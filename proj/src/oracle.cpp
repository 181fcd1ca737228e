#include "ficfl/oracle.hpp"

#include <algorithm>

#include "ficfl/errors.hpp"

namespace ficfl {

void ProblemInstance::validate() const {
  if (!net.plain()) throw Error("instance net must have no inhibitor arcs");
  if (net.transitions.empty()) throw Error("instance net has no transitions");
  if (start < 0 || start >= grammar.variables.size())
    throw Error("start variable out of range");
  if (static_cast<int>(binding.size()) != grammar.terminals.size())
    throw Error("binding size does not match the terminal alphabet");
  for (int t : binding)
    if (t < 0 || t >= static_cast<int>(net.transitions.size()))
      throw UnboundTerminal("terminal bound to a missing transition");
}

Word bind_word(const ProblemInstance& inst, const Word& terminals) {
  Word w;
  w.reserve(terminals.size());
  for (int s : terminals) {
    if (s < 0 || s >= static_cast<int>(inst.binding.size()))
      throw UnboundTerminal("terminal without a transition binding");
    w.push_back(inst.binding[static_cast<size_t>(s)]);
  }
  return w;
}

ReachResult reach_along(const ProblemInstance& inst, const SearchBudget& budget,
                        bool exhaustive) {
  inst.validate();
  ReachResult res;

  // Exact emptiness first: an empty language is exhaustively negative at
  // any budget.
  auto mi = min_derivation_index(inst.grammar);
  const auto& mstart = mi[static_cast<size_t>(inst.start)];
  bool lang_empty = !mstart || (inst.k && *mstart > *inst.k);
  if (lang_empty) {
    res.verdict = Verdict::ExhaustedNo;
    return res;
  }

  LangTable table = enum_table(inst.grammar, budget.len_cap, budget);
  auto words = table.words(inst.start, inst.k);

  std::vector<Word> order(words.begin(), words.end());
  std::stable_sort(order.begin(), order.end(),
                   [](const Word& a, const Word& b) {
                     return a.size() < b.size();
                   });
  for (const Word& w : order) {
    ++res.states_explored;
    auto m = fire_word(inst.net, inst.net.initial, bind_word(inst, w));
    if (m && *m == inst.m_final) {
      res.verdict = Verdict::Reached;
      res.witness = w;
      return res;
    }
  }
  res.verdict = (table.complete && exhaustive) ? Verdict::ExhaustedNo
                                               : Verdict::BudgetExceeded;
  return res;
}

}  // namespace ficfl
