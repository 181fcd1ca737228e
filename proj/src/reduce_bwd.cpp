#include "ficfl/reduce_bwd.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

namespace ficfl {

bool NormalizedPNW::canonical() const {
  int np = net.places.size();
  if (np == 0 || n != np - 1) return false;
  for (int p = 0; p + 1 < np; ++p)
    if (f[static_cast<size_t>(p)] > f[static_cast<size_t>(p + 1)])
      return false;
  Multiset boot;
  boot.add(np - 1);
  if (net.initial != boot) return false;
  for (const auto& t : net.transitions) {
    // Zero tests must be prefixes {s_1..s_l} with l <= n.
    int l = static_cast<int>(t.zero.size());
    if (l > n) return false;
    for (int p = 0; p < l; ++p)
      if (!t.zero.count(p)) return false;
    for (int p : t.zero)
      if (t.out.count(p) > 0) return false;
  }
  return is_weak(net, f);
}

NormalizedPNW normalize_pnw(const PetriNet& net, const IndexFunction& f,
                            const Multiset& m_final) {
  std::vector<WeakViolation> viol;
  if (!is_weak(net, f, &viol)) {
    std::string msg = "normalize_pnw: zero-test sets are not level-closed";
    if (!viol.empty())
      msg += " (place " + net.places.name(viol.front().place) +
             " missing from a test at transition " +
             net.transitions[static_cast<size_t>(viol.front().transition)]
                 .name +
             ")";
    throw NotWeak(msg);
  }

  {
    // Pass through inputs already in canonical shape asking for the empty
    // marking.
    NormalizedPNW cand{net, f, net.places.size() - 1};
    if (m_final.empty() && cand.canonical()) return cand;
  }

  NormalizedPNW out;
  int np = net.places.size();
  std::vector<int> order(static_cast<size_t>(np));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return f[static_cast<size_t>(a)] < f[static_cast<size_t>(b)];
  });

  std::int64_t top = 0;
  for (auto v : f) top = std::max(top, v);

  std::vector<int> to_new(static_cast<size_t>(np));
  for (int i = 0; i < np; ++i) {
    int id = out.net.add_place(net.places.name(order[static_cast<size_t>(i)]));
    to_new[static_cast<size_t>(order[static_cast<size_t>(i)])] = id;
    out.f.push_back(f[static_cast<size_t>(order[static_cast<size_t>(i)])]);
  }
  auto remap = [&](const Multiset& m) {
    Multiset r;
    for (auto [p, c] : m) r.add(to_new[static_cast<size_t>(p)], c);
    return r;
  };

  // The run place serializes the original transitions; buffers defer
  // productions into tested places.  Both sit above every tested level; the
  // boot place sits above everything and is the sole initial token.
  int run = out.net.add_place("run");
  out.f.push_back(top + 1);

  for (const auto& t : net.transitions) {
    Transition a;
    a.name = t.name;
    a.in = remap(t.in);
    a.in.add(run);
    for (int z : t.zero) a.zero.insert(to_new[static_cast<size_t>(z)]);
    Multiset deferred;
    for (auto [p, c] : remap(t.out)) {
      if (a.zero.count(p))
        deferred.add(p, c);
      else
        a.out.add(p, c);
    }
    if (deferred.empty()) {
      a.out.add(run);
      out.net.add_transition(std::move(a));
    } else {
      // Split: produce into tested places only after the test, holding the
      // run token so nothing interleaves.
      int buf = out.net.add_place("buf." + t.name);
      out.f.push_back(top + 1);
      a.out.add(buf);
      Transition b;
      b.name = t.name + ".flush";
      b.in.add(buf);
      b.out = deferred;
      b.out.add(run);
      out.net.add_transition(std::move(a));
      out.net.add_transition(std::move(b));
    }
  }

  int boot = out.net.add_place("boot");
  out.f.push_back(top + 2);

  Transition start;
  start.name = "t.start";
  start.in.add(boot);
  start.out = remap(net.initial);
  start.out.add(run);
  out.net.add_transition(std::move(start));

  Transition finish;
  finish.name = "t.finish";
  finish.in = remap(m_final);
  finish.in.add(run);
  out.net.add_transition(std::move(finish));

  out.net.initial = Multiset();
  out.net.initial.add(boot);
  out.n = out.net.places.size() - 1;
  return out;
}

namespace {

// "p1" -> "p1'" -> "p1''" ... until `taken` returns false.
std::string fresh_name(std::string base,
                       const std::function<bool(const std::string&)>& taken) {
  while (taken(base)) base += "'";
  return base;
}

}  // namespace

WidgetNet build_nprime(const NormalizedPNW& np) {
  WidgetNet w;
  for (int p = 0; p < np.net.places.size(); ++p)
    w.net.add_place(np.net.places.name(p));
  for (const auto& t : np.net.transitions) {
    Transition c = t;
    c.zero.clear();
    w.net.add_transition(std::move(c));
  }
  auto place_taken = [&](const std::string& s) {
    return w.net.places.find(s).has_value();
  };
  auto trans_taken = [&](const std::string& s) {
    return w.net.find_transition(s).has_value();
  };
  for (int i = 1; i <= np.n; ++i)
    w.r.push_back(
        w.net.add_place(fresh_name("r" + std::to_string(i), place_taken)));
  for (int i = 1; i <= np.n; ++i) {
    Transition p;
    p.name = fresh_name("p" + std::to_string(i), trans_taken);
    p.out.add(w.r[static_cast<size_t>(i - 1)]);
    w.pump.push_back(w.net.add_transition(std::move(p)));
  }
  for (int i = 1; i <= np.n; ++i) {
    Transition c;
    c.name = fresh_name("c" + std::to_string(i), trans_taken);
    c.in.add(w.r[static_cast<size_t>(i - 1)]);
    w.drain.push_back(w.net.add_transition(std::move(c)));
  }
  w.net.initial = np.net.initial;  // s-places share ids; all r_i start empty
  return w;
}

std::pair<Word, Word> build_words(const NormalizedPNW& np, int t) {
  const Transition& tr = np.net.transitions.at(static_cast<size_t>(t));
  int m = static_cast<int>(np.net.transitions.size());
  Word u, v;
  for (int l = 1; l <= np.n; ++l) {
    for (std::int64_t i = 0; i < tr.in.count(l - 1); ++i)
      u.push_back(m + (l - 1));  // p_l
    for (std::int64_t i = 0; i < tr.out.count(l - 1); ++i)
      v.push_back(m + np.n + (l - 1));  // c_l
  }
  return {u, v};
}

TraceGrammar build_trace_grammar(const NormalizedPNW& np) {
  TraceGrammar tg;
  Grammar& g = tg.grammar;
  int m = static_cast<int>(np.net.transitions.size());

  // Terminal ids coincide with widget-net transition indices; names are
  // uniquified so the identity stays intact under clashing input names.
  auto term_taken = [&](const std::string& s) {
    return g.terminals.find(s).has_value();
  };
  for (int t = 0; t < m; ++t)
    g.terminals.intern(fresh_name(
        np.net.transitions[static_cast<size_t>(t)].name, term_taken));
  for (int i = 1; i <= np.n; ++i)
    g.terminals.intern(fresh_name("p" + std::to_string(i), term_taken));
  for (int i = 1; i <= np.n; ++i)
    g.terminals.intern(fresh_name("c" + std::to_string(i), term_taken));

  for (int l = 0; l <= np.n; ++l)
    tg.a.push_back(g.variables.intern("A" + std::to_string(l)));
  for (int l = 1; l <= np.n; ++l)
    tg.d.push_back(g.variables.intern("D" + std::to_string(l)));

  for (int l = 0; l <= np.n; ++l) {
    int al = tg.a[static_cast<size_t>(l)];
    g.add(al, {});
    for (int t = 0; t < m; ++t) {
      if (static_cast<int>(
              np.net.transitions[static_cast<size_t>(t)].zero.size()) != l)
        continue;
      auto [u, v] = build_words(np, t);
      std::vector<GSym> body;
      for (int s : v) body.push_back({true, s});
      body.push_back({true, t});
      for (int s : u) body.push_back({true, s});
      body.push_back({false, al});
      g.add(al, std::move(body));
    }
    if (l >= 1) {
      int dl = tg.d[static_cast<size_t>(l - 1)];
      g.add(al, {{false, dl}, {false, al}});
      g.add(dl, {{true, m + (l - 1)}, {false, dl}, {true, m + np.n + (l - 1)}});
      g.add(dl, {{false, tg.a[static_cast<size_t>(l - 1)]}});
    }
  }
  tg.start = tg.a.back();
  tg.index = np.n + 1;
  return tg;
}

ProblemInstance backward_instance(const NormalizedPNW& np) {
  ProblemInstance inst;
  WidgetNet w = build_nprime(np);
  TraceGrammar tg = build_trace_grammar(np);
  inst.net = std::move(w.net);
  inst.grammar = std::move(tg.grammar);
  inst.binding.resize(static_cast<size_t>(inst.grammar.terminals.size()));
  std::iota(inst.binding.begin(), inst.binding.end(), 0);
  inst.start = tg.start;
  inst.k = tg.index;
  return inst;  // m_final stays empty
}

ReachResult backward_decide(const PetriNet& net, const IndexFunction& f,
                            const Multiset& m_final,
                            const SearchBudget& budget, bool exhaustive) {
  NormalizedPNW np = normalize_pnw(net, f, m_final);
  ProblemInstance inst = backward_instance(np);
  return reach_along(inst, budget, exhaustive);
}

}  // namespace ficfl
