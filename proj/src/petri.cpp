#include "ficfl/petri.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>

#include "ficfl/errors.hpp"

namespace ficfl {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Reached: return "reached";
    case Verdict::ExhaustedNo: return "exhausted-no";
    case Verdict::BudgetExceeded: return "budget-exceeded";
  }
  return "?";
}

bool enabled(const PetriNet& net, const Multiset& m, int t) {
  if (t < 0 || t >= static_cast<int>(net.transitions.size()))
    throw UnknownTransition("transition index out of range");
  const Transition& tr = net.transitions[static_cast<size_t>(t)];
  if (!mleq(tr.in, m)) return false;
  for (int p : tr.zero)
    if (m.count(p) != 0) return false;
  return true;
}

std::optional<Multiset> fire(const PetriNet& net, const Multiset& m, int t) {
  if (!enabled(net, m, t)) return std::nullopt;
  const Transition& tr = net.transitions[static_cast<size_t>(t)];
  return msum(mdiff(m, tr.in), tr.out);
}

std::optional<Multiset> fire_word(const PetriNet& net, const Multiset& m,
                                  const Word& w) {
  Multiset cur = m;
  for (int t : w) {
    auto next = fire(net, cur, t);
    if (!next) return std::nullopt;
    cur = std::move(*next);
  }
  return cur;
}

bool is_weak(const PetriNet& net, const IndexFunction& f,
             std::vector<WeakViolation>* violations) {
  if (static_cast<int>(f.size()) != net.places.size())
    throw Error("index function not total on the net's places");
  bool ok = true;
  for (int t = 0; t < static_cast<int>(net.transitions.size()); ++t) {
    const auto& zero = net.transitions[static_cast<size_t>(t)].zero;
    for (int p2 : zero) {
      for (int p = 0; p < net.places.size(); ++p) {
        if (f[static_cast<size_t>(p)] <= f[static_cast<size_t>(p2)] &&
            !zero.count(p)) {
          ok = false;
          if (violations) violations->push_back({p, p2, t});
        }
      }
    }
  }
  return ok;
}

std::optional<IndexFunction> infer_index_function(const PetriNet& net) {
  // Tests(p) = {t : p in Z(t)}.  An index function exists iff the Tests
  // sets form a chain under inclusion; levels then follow |Tests| descending.
  int n = net.places.size();
  std::vector<std::set<int>> tests(static_cast<size_t>(n));
  for (int t = 0; t < static_cast<int>(net.transitions.size()); ++t)
    for (int p : net.transitions[static_cast<size_t>(t)].zero)
      tests[static_cast<size_t>(p)].insert(t);

  std::vector<int> order(static_cast<size_t>(n));
  for (int p = 0; p < n; ++p) order[static_cast<size_t>(p)] = p;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return tests[static_cast<size_t>(a)].size() > tests[static_cast<size_t>(b)].size();
  });

  IndexFunction f(static_cast<size_t>(n), 0);
  std::int64_t level = 0;
  for (size_t i = 0; i < order.size(); ++i) {
    if (i > 0 && tests[static_cast<size_t>(order[i])] != tests[static_cast<size_t>(order[i - 1])])
      ++level;
    f[static_cast<size_t>(order[i])] = level;
  }
  if (!is_weak(net, f)) return std::nullopt;
  return f;
}

ReachResult bounded_reach(const PetriNet& net, const Multiset& target,
                          const SearchBudget& budget) {
  ReachResult res;
  struct Pred {
    Multiset from;
    int trans = -1;
  };
  std::unordered_map<Multiset, Pred, Multiset::Hash> visited;

  std::deque<Multiset> frontier;
  visited.emplace(net.initial, Pred{});
  frontier.push_back(net.initial);
  bool capped = false;

  auto unwind = [&](const Multiset& m) {
    Word w;
    Multiset cur = m;
    while (true) {
      auto& pred = visited.at(cur);
      if (pred.trans < 0) break;
      w.push_back(pred.trans);
      cur = pred.from;
    }
    std::reverse(w.begin(), w.end());
    return w;
  };

  while (!frontier.empty()) {
    if (res.states_explored >= budget.step_cap) {
      res.verdict = Verdict::BudgetExceeded;
      return res;
    }
    Multiset m = std::move(frontier.front());
    frontier.pop_front();
    ++res.states_explored;

    if (m == target) {
      res.verdict = Verdict::Reached;
      res.witness = unwind(m);
      return res;
    }
    for (int t = 0; t < static_cast<int>(net.transitions.size()); ++t) {
      auto next = fire(net, m, t);
      if (!next) continue;
      if (next->total() > budget.token_cap) {
        ++res.states_pruned;
        capped = true;
        continue;
      }
      if (visited.count(*next)) continue;
      visited.emplace(*next, Pred{m, t});
      frontier.push_back(std::move(*next));
    }
  }
  res.verdict = capped ? Verdict::BudgetExceeded : Verdict::ExhaustedNo;
  return res;
}

}  // namespace ficfl
