#include "ficfl/traverse.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "ficfl/errors.hpp"
#include "json.hpp"

namespace ficfl {

std::optional<int> parse_allowance(const std::string& name) {
  if (name.empty() || name.back() != ']') return std::nullopt;
  auto open = name.rfind('[');
  if (open == std::string::npos || open + 2 > name.size() - 1) return std::nullopt;
  int v = 0;
  for (size_t i = open + 1; i + 1 < name.size(); ++i) {
    if (!isdigit(static_cast<unsigned char>(name[i]))) return std::nullopt;
    v = v * 10 + (name[i] - '0');
  }
  return v;
}

namespace {

using Key = std::tuple<int, Multiset, Multiset>;

// All qty with qty <= m, ascending by (total, value order).
std::vector<Multiset> submultisets(const Multiset& m) {
  std::vector<Multiset> out{Multiset{}};
  for (const auto& [s, n] : m) {
    std::vector<Multiset> next;
    for (const auto& base : out)
      for (std::int64_t c = 0; c <= n; ++c) {
        Multiset q = base;
        if (c > 0) q.add(s, c);
        next.push_back(std::move(q));
      }
    out = std::move(next);
  }
  std::stable_sort(out.begin(), out.end(), [](const Multiset& a, const Multiset& b) {
    return std::make_pair(a.total(), a) < std::make_pair(b.total(), b);
  });
  return out;
}

// All qty over the given places with total <= cap, ascending likewise.
std::vector<Multiset> bounded_multisets(int places, std::int64_t cap) {
  std::vector<Multiset> out{Multiset{}};
  for (int p = 0; p < places; ++p) {
    std::vector<Multiset> next;
    for (const auto& base : out) {
      std::int64_t room = cap - base.total();
      for (std::int64_t c = 0; c <= room; ++c) {
        Multiset q = base;
        if (c > 0) q.add(p, c);
        next.push_back(std::move(q));
      }
    }
    out = std::move(next);
  }
  std::stable_sort(out.begin(), out.end(), [](const Multiset& a, const Multiset& b) {
    return std::make_pair(a.total(), a) < std::make_pair(b.total(), b);
  });
  return out;
}

struct Choice {
  int production = 0;
  Multiset transfer, add;
};

// Least fixpoint over the stratified recursion: binary cases combine one
// fully computed level below with a same-level tail call, so the success
// relation is computed bottom-up per allowance level.  A success entry for
// (variable, m, m') records the first choice that produced it.
class Engine {
 public:
  Engine(const PetriNet& net, const Grammar& g, const std::vector<int>& binding,
         std::int64_t cap, std::int64_t step_cap)
      : net_(net), g_(g), binding_(binding), cap_(cap), step_cap_(step_cap) {
    level_.reserve(static_cast<size_t>(g.variables.size()));
    int k = 0;
    for (int v = 0; v < g.variables.size(); ++v) {
      auto l = parse_allowance(g.variables.name(v));
      if (!l) throw Error("grammar variable lacks an allowance annotation: " +
                          g.variables.name(v));
      level_.push_back(*l);
      k = std::max(k, *l);
    }
    success_.resize(static_cast<size_t>(g.variables.size()));
    solve(k);
  }

  bool trav(int x, const Multiset& m, const Multiset& mp) const {
    return success_[static_cast<size_t>(x)].count({m, mp}) != 0;
  }

  std::int64_t calls = 0;
  bool step_cap_hit = false;

 private:
  using Pair = std::pair<Multiset, Multiset>;

  bool insert(int head, Multiset m, Multiset mp, Choice ch) {
    auto& slot = success_[static_cast<size_t>(head)];
    return slot.emplace(Pair{std::move(m), std::move(mp)}, std::move(ch))
        .second;
  }

  bool step() {
    if (++calls > step_cap_) {
      step_cap_hit = true;
      return false;
    }
    return true;
  }

  void solve(int k) {
    std::vector<Multiset> all = bounded_multisets(net_.places.size(), cap_);
    for (int l = 0; l <= k && !step_cap_hit; ++l) {
      // Terminal and epsilon productions seed the level directly.
      for (size_t pi = 0; pi < g_.productions.size(); ++pi) {
        const Production& p = g_.productions[pi];
        if (level_[static_cast<size_t>(p.head)] != l || p.body.size() > 1)
          continue;
        for (const Multiset& m : all) {
          if (!step()) return;
          if (p.body.empty()) {
            insert(p.head, m, m, {static_cast<int>(pi), {}, {}});
          } else {
            int tr = binding_[static_cast<size_t>(p.body[0].id)];
            auto after = fire(net_, m, tr);
            if (after && after->total() <= cap_)
              insert(p.head, m, std::move(*after), {static_cast<int>(pi), {}, {}});
          }
        }
      }
      if (l == 0) continue;
      // Binary productions: close under the two split rules by joining
      // level l-1 pairs with already known level-l pairs.
      bool changed = true;
      while (changed && !step_cap_hit) {
        changed = false;
        for (size_t pi = 0; pi < g_.productions.size(); ++pi) {
          const Production& p = g_.productions[pi];
          if (level_[static_cast<size_t>(p.head)] != l || p.body.size() != 2)
            continue;
          int b = p.body[0].id, c = p.body[1].id;
          int lb = level_[static_cast<size_t>(b)];
          int lc = level_[static_cast<size_t>(c)];
          if (lb == l && lc == l - 1) {
            // X[l] -> B[l] C[l-1]: B takes m to mid = (m' (-) t) (+) q,
            // C takes q to t; join over (q,t) in C and (m,mid) in B.
            for (const auto& [ct, unused] : success_[static_cast<size_t>(c)]) {
              const auto& [q, t] = ct;
              for (const auto& [bp, unused2] :
                   success_[static_cast<size_t>(b)]) {
                if (!step()) return;
                const auto& [m, mid] = bp;
                auto rest = mdiff_opt(mid, q);
                if (!rest) continue;
                Multiset mp = msum(*rest, t);
                if (mp.total() > cap_) continue;
                if (insert(p.head, m, std::move(mp),
                           {static_cast<int>(pi), t, q}))
                  changed = true;
              }
            }
          } else if (lb == l - 1 && lc == l) {
            // X[l] -> B[l-1] C[l]: B takes t to q, C takes (m (-) t) (+) q
            // to m'; join over (t,q) in B and (mid,m') in C.
            for (const auto& [bt, unused] : success_[static_cast<size_t>(b)]) {
              const auto& [t, q] = bt;
              for (const auto& [cp, unused2] :
                   success_[static_cast<size_t>(c)]) {
                if (!step()) return;
                const auto& [mid, mp] = cp;
                auto rest = mdiff_opt(mid, q);
                if (!rest) continue;
                Multiset m = msum(*rest, t);
                if (m.total() > cap_) continue;
                if (insert(p.head, std::move(m), mp,
                           {static_cast<int>(pi), t, q}))
                  changed = true;
              }
            }
          }
        }
      }
    }
  }

 public:

  void build_trace(int x, const Multiset& m, const Multiset& mp,
                   std::vector<TraceEntry>& out) const {
    const Choice& ch = success_[static_cast<size_t>(x)].at({m, mp});
    const Production& p = g_.productions[static_cast<size_t>(ch.production)];
    TraceEntry e;
    e.var = x;
    e.mi = m;
    e.mf = mp;
    e.production = ch.production;
    if (p.body.size() <= 1) {
      out.push_back(std::move(e));
      return;
    }
    e.transfer = ch.transfer;
    e.add = ch.add;
    out.push_back(std::move(e));
    int l = level_[static_cast<size_t>(x)];
    int b = p.body[0].id, c = p.body[1].id;
    if (level_[static_cast<size_t>(b)] == l) {
      Multiset base = mdiff(mp, ch.transfer);
      build_trace(c, ch.add, ch.transfer, out);
      build_trace(b, m, msum(base, ch.add), out);
    } else {
      Multiset base = mdiff(m, ch.transfer);
      build_trace(b, ch.transfer, ch.add, out);
      build_trace(c, msum(base, ch.add), mp, out);
    }
  }

  void build_word(int x, const Multiset& m, const Multiset& mp,
                  Word& out) const {
    const Choice& ch = success_[static_cast<size_t>(x)].at({m, mp});
    const Production& p = g_.productions[static_cast<size_t>(ch.production)];
    if (p.body.size() <= 1) {
      if (!p.body.empty()) out.push_back(p.body[0].id);
      return;
    }
    int l = level_[static_cast<size_t>(x)];
    int b = p.body[0].id, c = p.body[1].id;
    // Body order, which is also word order, regardless of execution order.
    if (level_[static_cast<size_t>(b)] == l) {
      Multiset base = mdiff(mp, ch.transfer);
      build_word(b, m, msum(base, ch.add), out);
      build_word(c, ch.add, ch.transfer, out);
    } else {
      Multiset base = mdiff(m, ch.transfer);
      build_word(b, ch.transfer, ch.add, out);
      build_word(c, msum(base, ch.add), mp, out);
    }
  }

  int level_of(int var) const { return level_[static_cast<size_t>(var)]; }

 private:
  const PetriNet& net_;
  const Grammar& g_;
  const std::vector<int>& binding_;
  std::int64_t cap_;
  std::int64_t step_cap_;
  std::vector<int> level_;
  std::vector<std::map<Pair, Choice>> success_;
};

}  // namespace

TraverseResult run_traverse(const PetriNet& net, const Grammar& gk, int x,
                            const Multiset& m, const Multiset& m_prime,
                            const std::vector<int>& binding,
                            const SearchBudget& budget) {
  if (!net.plain()) throw Error("walk requires a net without inhibitor arcs");
  if (x < 0 || x >= gk.variables.size()) throw Error("variable out of range");
  if (static_cast<int>(binding.size()) != gk.terminals.size())
    throw UnboundTerminal("binding size does not match the terminal alphabet");
  for (int t : binding)
    if (t < 0 || t >= static_cast<int>(net.transitions.size()))
      throw UnboundTerminal("terminal bound to a missing transition");

  TraverseResult res;
  bool conservative = net.conservative();
  std::int64_t need = std::max(m.total(), m_prime.total());
  if (conservative && m.total() != m_prime.total()) {
    // No word can change the token sum; the failure is exact.
    res.verdict = Verdict::ExhaustedNo;
    return res;
  }
  std::int64_t cap = budget.token_cap;
  if (conservative) cap = std::min(cap, need);
  if (cap < need) {
    res.verdict = Verdict::BudgetExceeded;
    return res;
  }

  Engine eng(net, gk, binding, cap, budget.step_cap);
  bool ok = eng.trav(x, m, m_prime);  // entries found before a cap hit hold
  res.calls = eng.calls;
  if (ok) {
    res.verdict = Verdict::Reached;
    eng.build_trace(x, m, m_prime, res.trace);
    Word w;
    eng.build_word(x, m, m_prime, w);
    res.witness = std::move(w);
    return res;
  }
  if (eng.step_cap_hit) {
    res.verdict = Verdict::BudgetExceeded;
    return res;
  }
  res.verdict = (conservative && budget.token_cap >= need)
                    ? Verdict::ExhaustedNo
                    : Verdict::BudgetExceeded;
  return res;
}

TraverseResult run_traverse(const PetriNet& net, const Grammar& gk, int x,
                            const TraverseState& state,
                            const std::vector<int>& binding,
                            const SearchBudget& budget) {
  if (!state.proper())
    throw ImproperCall("levels below the call are not empty");
  size_t l = static_cast<size_t>(state.level);
  if (l >= state.mi.size() || l >= state.mf.size())
    throw ImproperCall("call level outside the context arrays");
  return run_traverse(net, gk, x, state.mi[l], state.mf[l], binding, budget);
}

namespace {

struct Replayer {
  const PetriNet& net;
  const Grammar& g;
  const std::vector<int>& binding;
  const std::vector<TraceEntry>& trace;
  std::vector<int> level;
  TraverseState st;
  size_t pos = 0;

  bool lower_empty(int l) const {
    for (int j = 0; j < l; ++j)
      if (!st.mi[static_cast<size_t>(j)].empty() ||
          !st.mf[static_cast<size_t>(j)].empty())
        return false;
    return true;
  }

  bool call(int x) {
    if (pos >= trace.size()) return false;
    const TraceEntry& e = trace[pos++];
    int l = level[static_cast<size_t>(x)];
    if (e.var != x || !lower_empty(l)) return false;
    if (st.mi[static_cast<size_t>(l)] != e.mi ||
        st.mf[static_cast<size_t>(l)] != e.mf)
      return false;
    if (e.production < 0 ||
        e.production >= static_cast<int>(g.productions.size()))
      return false;
    const Production& p = g.productions[static_cast<size_t>(e.production)];
    if (p.head != x) return false;

    auto& mi = st.mi[static_cast<size_t>(l)];
    auto& mf = st.mf[static_cast<size_t>(l)];
    if (p.body.size() <= 1) {
      if (!p.body.empty()) {
        auto after =
            fire(net, mi, binding[static_cast<size_t>(p.body[0].id)]);
        if (!after) return false;
        mi = *after;
      }
      // Only draining both sides completely can satisfy the postcondition.
      if (mi != mf) return false;
      mi = Multiset{};
      mf = Multiset{};
      return true;
    }
    if (l == 0 || !e.transfer || !e.add) return false;
    int b = p.body[0].id, c = p.body[1].id;
    auto& mi_low = st.mi[static_cast<size_t>(l - 1)];
    auto& mf_low = st.mf[static_cast<size_t>(l - 1)];
    if (level[static_cast<size_t>(b)] == l) {
      if (!mleq(*e.transfer, mf)) return false;
      mf = mdiff(mf, *e.transfer);
      mf_low = msum(mf_low, *e.transfer);
      mf = msum(mf, *e.add);
      mi_low = msum(mi_low, *e.add);
      if (!call(c)) return false;
      if (!lower_empty(l)) return false;
      return call(b);
    }
    if (!mleq(*e.transfer, mi)) return false;
    mi = mdiff(mi, *e.transfer);
    mi_low = msum(mi_low, *e.transfer);
    mi = msum(mi, *e.add);
    mf_low = msum(mf_low, *e.add);
    if (!call(b)) return false;
    if (!lower_empty(l)) return false;
    return call(c);
  }
};

}  // namespace

bool replay_trace(const PetriNet& net, const Grammar& gk, int x,
                  const Multiset& m, const Multiset& m_prime,
                  const std::vector<int>& binding,
                  const std::vector<TraceEntry>& trace) {
  std::vector<int> level;
  int k = 0;
  for (int v = 0; v < gk.variables.size(); ++v) {
    auto l = parse_allowance(gk.variables.name(v));
    if (!l) return false;
    level.push_back(*l);
    k = std::max(k, *l);
  }
  Replayer rep{net, gk, binding, trace, std::move(level), {}, 0};
  rep.st.mi.resize(static_cast<size_t>(k) + 1);
  rep.st.mf.resize(static_cast<size_t>(k) + 1);
  int l = rep.level[static_cast<size_t>(x)];
  rep.st.level = l;
  rep.st.mi[static_cast<size_t>(l)] = m;
  rep.st.mf[static_cast<size_t>(l)] = m_prime;
  if (!rep.call(x)) return false;
  if (rep.pos != trace.size()) return false;
  for (size_t j = 0; j < rep.st.mi.size(); ++j)
    if (!rep.st.mi[j].empty() || !rep.st.mf[j].empty()) return false;
  return true;
}

std::string trace_to_json(const std::vector<TraceEntry>& trace,
                          const Grammar& gk, const SymbolTable& places) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : trace) {
    nlohmann::json obj;
    obj["var"] = gk.variables.name(e.var);
    obj["mi"] = to_literal(e.mi, places);
    obj["mf"] = to_literal(e.mf, places);
    obj["production"] = e.production;
    if (e.transfer) obj["transfer"] = to_literal(*e.transfer, places);
    if (e.add) obj["add"] = to_literal(*e.add, places);
    obj["digest"] = Multiset::Hash{}(e.mi) * 31 + Multiset::Hash{}(e.mf);
    arr.push_back(std::move(obj));
  }
  return arr.dump(2);
}

}  // namespace ficfl
