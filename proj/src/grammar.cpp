#include "ficfl/grammar.hpp"

#include <algorithm>
#include <deque>
#include <limits>

#include "ficfl/errors.hpp"

namespace ficfl {

bool Grammar::restricted() const {
  for (const auto& p : productions) {
    switch (p.body.size()) {
      case 0:
        break;
      case 1:
        if (!p.body[0].terminal) return false;
        break;
      case 2:
        if (p.body[0].terminal || p.body[1].terminal) return false;
        break;
      default:
        return false;
    }
  }
  return true;
}

std::string annotated_name(const std::string& base, int i) {
  return base + "[" + std::to_string(i) + "]";
}

Grammar annotate(const Grammar& g, int k) {
  if (!g.restricted())
    throw NotRestricted("annotate requires a restricted grammar");
  if (k < 0) throw Error("annotation bound must be >= 0");
  Grammar out;
  out.terminals = g.terminals;
  // All X[i] are declared up front, productionless ones included.
  for (int x = 0; x < g.variables.size(); ++x)
    for (int i = 0; i <= k; ++i)
      out.variables.intern(annotated_name(g.variables.name(x), i));

  auto ann = [&](int x, int i) {
    return GSym{false, out.variables.at(annotated_name(g.variables.name(x), i))};
  };

  for (const auto& p : g.productions) {
    if (p.body.size() == 2) {
      for (int i = 1; i <= k; ++i) {
        out.add(ann(p.head, i).id, {ann(p.body[0].id, i - 1), ann(p.body[1].id, i)});
        out.add(ann(p.head, i).id, {ann(p.body[0].id, i), ann(p.body[1].id, i - 1)});
      }
    } else {
      for (int i = 0; i <= k; ++i) out.add(ann(p.head, i).id, p.body);
    }
  }
  return out;
}

int check_derivation_index(const Grammar& g, const Derivation& d) {
  if (d.forms.empty()) throw InvalidDerivation("derivation has no forms");
  if (d.forms.size() != d.steps.size() + 1)
    throw InvalidDerivation("step/form count mismatch");
  for (size_t i = 0; i < d.steps.size(); ++i) {
    const auto& from = d.forms[i];
    const auto& to = d.forms[i + 1];
    const auto& st = d.steps[i];
    if (st.production < 0 ||
        st.production >= static_cast<int>(g.productions.size()))
      throw InvalidDerivation("production index out of range");
    const Production& p = g.productions[static_cast<size_t>(st.production)];
    if (st.position < 0 || st.position >= static_cast<int>(from.size()))
      throw InvalidDerivation("rewrite position out of range");
    size_t pos = static_cast<size_t>(st.position);
    if (from[pos].terminal || from[pos].id != p.head)
      throw InvalidDerivation("rewritten symbol is not the production head");
    std::vector<GSym> expect;
    expect.insert(expect.end(), from.begin(), from.begin() + static_cast<long>(pos));
    expect.insert(expect.end(), p.body.begin(), p.body.end());
    expect.insert(expect.end(), from.begin() + static_cast<long>(pos) + 1, from.end());
    if (expect != to) throw InvalidDerivation("step does not rewrite as claimed");
  }
  int max_vars = 0;
  for (const auto& form : d.forms) {
    int vars = 0;
    for (const auto& s : form)
      if (!s.terminal) ++vars;
    max_vars = std::max(max_vars, vars);
  }
  return max_vars;
}

namespace {

constexpr int kInf = std::numeric_limits<int>::max() / 2;

// Minimal index achievable for a node whose variable children have the
// given subtree indices, expanding one child fully before the next.
// Least-index-first is optimal: child p (1-based, ascending order) runs
// while the remaining m-p siblings are still pending variables.
int schedule_cost(std::vector<int> child_indices) {
  int m = static_cast<int>(child_indices.size());
  if (m == 0) return 1;
  std::sort(child_indices.begin(), child_indices.end());
  int cost = 0;
  for (int p = 1; p <= m; ++p)
    cost = std::max(cost, child_indices[static_cast<size_t>(p - 1)] + (m - p));
  return cost;
}

}  // namespace

std::set<Word> LangTable::words(int var, std::optional<int> k) const {
  std::set<Word> r;
  for (const auto& [w, i] : min_index[static_cast<size_t>(var)])
    if (!k || i <= *k) r.insert(w);
  return r;
}

// Semi-naive fixpoint: each round re-evaluates a production only on
// instantiations where at least one variable position draws from the words
// discovered (or improved) in the previous round.
LangTable enum_table(const Grammar& g, int max_len,
                     const SearchBudget& budget) {
  LangTable t;
  t.complete = true;
  t.min_index.resize(static_cast<size_t>(g.variables.size()));
  std::vector<std::map<Word, int>> delta(
      static_cast<size_t>(g.variables.size()));

  struct Found {
    int head;
    Word word;
    int idx;
  };

  // Length-ascending views over the tables, so instantiation can stop at
  // the first word that no longer fits the length budget.
  using View = std::vector<std::pair<const Word*, int>>;
  auto build_views = [&](const std::vector<std::map<Word, int>>& tables) {
    std::vector<View> views(tables.size());
    for (size_t v = 0; v < tables.size(); ++v) {
      for (const auto& [w, i] : tables[v]) views[v].emplace_back(&w, i);
      std::stable_sort(views[v].begin(), views[v].end(),
                       [](const auto& a, const auto& b) {
                         return a.first->size() < b.first->size();
                       });
    }
    return views;
  };
  std::vector<View> full_view = build_views(t.min_index);
  std::vector<View> delta_view;

  // Instantiates body variables; position delta_pos (if >= 0) ranges over
  // the delta table, all others over the full table.
  auto combine = [&](const Production& p, int delta_pos,
                     std::vector<Found>& out) {
    struct Frame {
      Word word;
      std::vector<int> child_idx;
    };
    std::vector<Frame> partial{{{}, {}}};
    int var_pos = 0;
    for (const auto& sym : p.body) {
      std::vector<Frame> next;
      for (auto& f : partial) {
        if (sym.terminal) {
          if (static_cast<int>(f.word.size()) + 1 > max_len) continue;
          Frame nf = std::move(f);
          nf.word.push_back(sym.id);
          next.push_back(std::move(nf));
        } else {
          const View& src = (var_pos == delta_pos)
                                ? delta_view[static_cast<size_t>(sym.id)]
                                : full_view[static_cast<size_t>(sym.id)];
          for (const auto& [w, i] : src) {
            if (static_cast<int>(f.word.size() + w->size()) > max_len) break;
            if (++t.steps > budget.derivation_step_cap) {
              t.complete = false;
              return;
            }
            Frame nf = f;
            nf.word.insert(nf.word.end(), w->begin(), w->end());
            nf.child_idx.push_back(i);
            next.push_back(std::move(nf));
          }
        }
      }
      partial = std::move(next);
      if (!sym.terminal) ++var_pos;
    }
    for (auto& f : partial)
      out.push_back({p.head, std::move(f.word), schedule_cost(f.child_idx)});
  };

  bool first = true;
  while (t.complete) {
    std::vector<Found> found;
    for (const auto& p : g.productions) {
      if (!t.complete) break;
      int vars_in_body = 0;
      for (const auto& s : p.body)
        if (!s.terminal) ++vars_in_body;
      if (first) {
        combine(p, -1, found);
      } else {
        for (int pos = 0; pos < vars_in_body; ++pos) combine(p, pos, found);
      }
    }
    first = false;
    std::vector<std::map<Word, int>> next_delta(
        static_cast<size_t>(g.variables.size()));
    bool changed = false;
    for (auto& f : found) {
      auto& slot = t.min_index[static_cast<size_t>(f.head)];
      auto it = slot.find(f.word);
      if (it == slot.end() || f.idx < it->second) {
        slot[f.word] = f.idx;
        next_delta[static_cast<size_t>(f.head)][std::move(f.word)] = f.idx;
        changed = true;
      }
    }
    if (!changed) break;
    delta = std::move(next_delta);
    full_view = build_views(t.min_index);
    delta_view = build_views(delta);
  }
  return t;
}

LangResult enum_language(const Grammar& g, int start, int max_len,
                         std::optional<int> k, const SearchBudget& budget) {
  if (start < 0 || start >= g.variables.size())
    throw Error("start variable out of range");
  LangTable t = enum_table(g, max_len, budget);
  LangResult res;
  res.complete = t.complete;
  res.steps = t.steps;
  res.words = t.words(start, k);
  return res;
}

namespace {

struct TreeNode {
  int production = 0;
  int index = 1;  // minimal index of the subtree rooted here
  std::vector<TreeNode> children;  // one per variable occurrence in the body
};

// Rebuilds a minimal-index derivation tree for (var, word) from the DP
// table.  Every node's subtree index is the DP minimum for its (variable,
// word) pair, so a repeat of that pair along a path would loop forever;
// such splits are skipped, which is safe: replacing the outer repeat by the
// inner subtree shows a repeat-free minimal tree always exists.
std::optional<TreeNode> build_tree(const Grammar& g, const LangTable& dp,
                                   int var, const Word& word,
                                   std::set<std::pair<int, Word>>& path) {
  const auto& slot = dp.min_index[static_cast<size_t>(var)];
  auto self = slot.find(word);
  if (self == slot.end()) return std::nullopt;
  if (!path.emplace(var, word).second) return std::nullopt;
  struct PathGuard {
    std::set<std::pair<int, Word>>& path;
    std::pair<int, Word> key;
    ~PathGuard() { path.erase(key); }
  } guard{path, {var, word}};

  for (int pi = 0; pi < static_cast<int>(g.productions.size()); ++pi) {
    const Production& p = g.productions[static_cast<size_t>(pi)];
    if (p.head != var) continue;
    // Search a split of `word` matching the body whose schedule cost equals
    // the recorded minimal index.
    struct Frame {
      size_t consumed;
      std::vector<std::pair<int, Word>> parts;  // (child var, child word)
    };
    std::vector<Frame> stack{{0, {}}};
    std::vector<Frame> complete;
    for (const auto& sym : p.body) {
      std::vector<Frame> next;
      for (auto& f : stack) {
        if (sym.terminal) {
          if (f.consumed < word.size() && word[f.consumed] == sym.id) {
            Frame nf = f;
            nf.consumed++;
            next.push_back(std::move(nf));
          }
        } else {
          const auto& child_words = dp.min_index[static_cast<size_t>(sym.id)];
          for (size_t len = 0; len + f.consumed <= word.size(); ++len) {
            Word part(word.begin() + static_cast<long>(f.consumed),
                      word.begin() + static_cast<long>(f.consumed + len));
            if (!child_words.count(part)) continue;
            Frame nf = f;
            nf.consumed += len;
            nf.parts.emplace_back(sym.id, std::move(part));
            next.push_back(std::move(nf));
          }
        }
      }
      stack = std::move(next);
    }
    for (auto& f : stack)
      if (f.consumed == word.size()) complete.push_back(std::move(f));

    for (const auto& f : complete) {
      std::vector<int> child_idx;
      for (const auto& [cv, cw] : f.parts)
        child_idx.push_back(dp.min_index[static_cast<size_t>(cv)].at(cw));
      if (schedule_cost(child_idx) != self->second) continue;
      TreeNode node;
      node.production = pi;
      node.index = self->second;
      bool ok = true;
      for (size_t c = 0; c < f.parts.size(); ++c) {
        auto child = build_tree(g, dp, f.parts[c].first, f.parts[c].second,
                                path);
        if (!child) {
          ok = false;
          break;
        }
        node.children.push_back(std::move(*child));
      }
      if (ok) return node;
    }
  }
  return std::nullopt;
}

// Expands the tree into an explicit derivation, least-index child first,
// one subtree fully before the next.
struct Linearizer {
  const Grammar& g;
  Derivation d;
  // Working form: symbol plus pending subtree (null once expanded/terminal).
  struct Item {
    GSym sym;
    const TreeNode* node = nullptr;
  };
  std::vector<Item> form;

  void snapshot() {
    std::vector<GSym> f;
    for (auto& it : form) f.push_back(it.sym);
    d.forms.push_back(std::move(f));
  }

  size_t position_of(const TreeNode* node) const {
    for (size_t i = 0; i < form.size(); ++i)
      if (form[i].node == node) return i;
    throw Error("internal: lost track of a pending subtree");
  }

  void expand(const TreeNode* node) {
    size_t pos = position_of(node);
    const Production& p = g.productions[static_cast<size_t>(node->production)];
    std::vector<Item> body;
    size_t child = 0;
    for (const auto& sym : p.body) {
      Item it{sym, nullptr};
      if (!sym.terminal) it.node = &node->children[child++];
      body.push_back(it);
    }
    form.erase(form.begin() + static_cast<long>(pos));
    form.insert(form.begin() + static_cast<long>(pos), body.begin(), body.end());
    d.steps.push_back({node->production, static_cast<int>(pos)});
    snapshot();

    std::vector<const TreeNode*> order;
    for (const auto& c : node->children) order.push_back(&c);
    std::stable_sort(order.begin(), order.end(),
                     [](const TreeNode* a, const TreeNode* b) {
                       return a->index < b->index;
                     });
    for (const TreeNode* c : order) expand(c);
  }
};

}  // namespace

Derivation derive_word(const Grammar& g, int start, const Word& w,
                       std::optional<int> k, const SearchBudget& budget) {
  LangTable dp = enum_table(g, static_cast<int>(w.size()), budget);
  if (!dp.complete) throw BudgetExceededError("derivation-step cap hit");
  const auto& slot = dp.min_index[static_cast<size_t>(start)];
  auto it = slot.find(w);
  if (it == slot.end() || (k && it->second > *k))
    throw Error("word not derivable within the index budget");
  std::set<std::pair<int, Word>> path;
  auto root = build_tree(g, dp, start, w, path);
  if (!root) throw Error("internal: DP table inconsistent during rebuild");

  Linearizer lin{g, {}, {}};
  lin.form.push_back({GSym{false, start}, &*root});
  lin.snapshot();
  lin.expand(&*root);
  return std::move(lin.d);
}

std::vector<std::optional<int>> min_derivation_index(const Grammar& g) {
  std::vector<int> v(static_cast<size_t>(g.variables.size()), kInf);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& p : g.productions) {
      std::vector<int> child_idx;
      bool ok = true;
      for (const auto& sym : p.body) {
        if (sym.terminal) continue;
        if (v[static_cast<size_t>(sym.id)] >= kInf) {
          ok = false;
          break;
        }
        child_idx.push_back(v[static_cast<size_t>(sym.id)]);
      }
      if (!ok) continue;
      int cost = schedule_cost(child_idx);
      if (cost < v[static_cast<size_t>(p.head)]) {
        v[static_cast<size_t>(p.head)] = cost;
        changed = true;
      }
    }
  }
  std::vector<std::optional<int>> res;
  for (int x : v)
    res.push_back(x >= kInf ? std::nullopt : std::optional<int>(x));
  return res;
}

LangResult enum_language_by_forms(const Grammar& g, int start, int max_len,
                                  std::optional<int> k,
                                  const SearchBudget& budget) {
  // Minimal terminal yield per variable, for pruning; kInf = unproductive.
  std::vector<int> min_yield(static_cast<size_t>(g.variables.size()), kInf);
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& p : g.productions) {
      int y = 0;
      for (const auto& s : p.body)
        y = std::min(kInf, y + (s.terminal ? 1 : min_yield[static_cast<size_t>(s.id)]));
      if (y < min_yield[static_cast<size_t>(p.head)]) {
        min_yield[static_cast<size_t>(p.head)] = y;
        changed = true;
      }
    }
  }

  auto admissible = [&](const std::vector<GSym>& form) {
    int vars = 0;
    int terms = 0;
    int yield = 0;
    for (const auto& s : form) {
      if (s.terminal) {
        ++terms;
        ++yield;
      } else {
        ++vars;
        int my = min_yield[static_cast<size_t>(s.id)];
        if (my >= kInf) return false;
        yield += my;
      }
    }
    if (k && vars > *k) return false;
    return terms <= max_len && yield <= max_len;
  };

  LangResult res;
  res.complete = true;
  std::set<std::vector<GSym>> visited;
  std::deque<std::vector<GSym>> frontier;
  std::vector<GSym> init{GSym{false, start}};
  if (admissible(init)) {
    visited.insert(init);
    frontier.push_back(init);
  }
  while (!frontier.empty()) {
    if (++res.steps > budget.derivation_step_cap) {
      res.complete = false;
      break;
    }
    auto form = std::move(frontier.front());
    frontier.pop_front();
    bool all_terminal = true;
    for (size_t pos = 0; pos < form.size(); ++pos) {
      if (form[pos].terminal) continue;
      all_terminal = false;
      for (const auto& p : g.productions) {
        if (p.head != form[pos].id) continue;
        if (++res.steps > budget.derivation_step_cap) {
          res.complete = false;
          return res;
        }
        std::vector<GSym> next;
        next.insert(next.end(), form.begin(), form.begin() + static_cast<long>(pos));
        next.insert(next.end(), p.body.begin(), p.body.end());
        next.insert(next.end(), form.begin() + static_cast<long>(pos) + 1, form.end());
        if (!admissible(next) || visited.count(next)) continue;
        visited.insert(next);
        frontier.push_back(std::move(next));
      }
    }
    if (all_terminal) {
      Word w;
      for (const auto& s : form) w.push_back(s.id);
      res.words.insert(std::move(w));
    }
  }
  return res;
}

namespace {

std::string fresh_var_name(SymbolTable& vars, const std::string& base) {
  std::string name = base;
  while (vars.find(name)) name += "'";
  return name;
}

}  // namespace

RestrictedResult to_restricted(const Grammar& g) {
  RestrictedResult res;
  res.grammar.terminals = g.terminals;
  for (int x = 0; x < g.variables.size(); ++x) {
    int id = res.grammar.variables.intern(g.variables.name(x));
    res.variable_map[x] = id;
  }
  if (g.restricted()) {
    res.grammar.productions = g.productions;
    return res;
  }

  Grammar& out = res.grammar;
  std::vector<Production> work;
  for (const auto& p : g.productions)
    work.push_back({res.variable_map.at(p.head), p.body});

  // Promote terminals occurring in bodies of length >= 2.
  std::map<int, int> term_var;
  for (auto& p : work) {
    if (p.body.size() < 2) continue;
    for (auto& sym : p.body) {
      if (!sym.terminal) continue;
      auto it = term_var.find(sym.id);
      if (it == term_var.end()) {
        int v = out.variables.intern(
            fresh_var_name(out.variables, "_t_" + g.terminals.name(sym.id)));
        it = term_var.emplace(sym.id, v).first;
        out.add(v, {GSym{true, sym.id}});
      }
      sym = GSym{false, it->second};
    }
  }

  // Binarize long bodies.
  int fresh = 0;
  std::vector<Production> binarized;
  for (auto& p : work) {
    while (p.body.size() > 2) {
      int v = out.variables.intern(
          fresh_var_name(out.variables, "_b" + std::to_string(fresh++)));
      std::vector<GSym> tail(p.body.begin() + 1, p.body.end());
      binarized.push_back({p.head, {p.body[0], GSym{false, v}}});
      p.head = v;
      p.body = std::move(tail);
    }
    binarized.push_back(std::move(p));
  }

  // Eliminate unit productions X -> Y via closure over unit edges.
  int nvars = out.variables.size();
  std::vector<std::set<int>> unit_closure(static_cast<size_t>(nvars));
  for (int x = 0; x < nvars; ++x) unit_closure[static_cast<size_t>(x)].insert(x);
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& p : binarized) {
      if (p.body.size() != 1 || p.body[0].terminal) continue;
      for (int x = 0; x < nvars; ++x) {
        auto& cl = unit_closure[static_cast<size_t>(x)];
        if (cl.count(p.head) && !cl.count(p.body[0].id)) {
          cl.insert(p.body[0].id);
          changed = true;
        }
      }
    }
  }
  std::set<std::pair<int, std::vector<GSym>>> seen;
  auto emit = [&](int head, const std::vector<GSym>& body) {
    if (seen.emplace(head, body).second) out.add(head, body);
  };
  for (const auto& p : out.productions)
    seen.emplace(p.head, p.body);  // terminal promotions already emitted
  for (int x = 0; x < nvars; ++x) {
    for (int y : unit_closure[static_cast<size_t>(x)]) {
      for (const auto& p : binarized) {
        if (p.head != y) continue;
        if (p.body.size() == 1 && !p.body[0].terminal) continue;  // unit
        emit(x, p.body);
      }
    }
  }
  return res;
}

}  // namespace ficfl
