#include <random>

#include "doctest.h"
#include "ficfl/generators.hpp"
#include "ficfl/reduce_bwd.hpp"

using namespace ficfl;

namespace {

// Canonical two-place net: t1 consumes the top token while testing s1.
NormalizedPNW gate_net() {
  NormalizedPNW np;
  int s1 = np.net.add_place("s1");
  int s2 = np.net.add_place("s2", 1);
  Transition t;
  t.name = "t1";
  t.in.add(s2);
  t.zero.insert(s1);
  np.net.add_transition(std::move(t));
  np.f = {0, 1};
  np.n = 1;
  return np;
}

// Canonical three-place net with one level-0 and one level-1 test.
NormalizedPNW two_level_net() {
  NormalizedPNW np;
  int s1 = np.net.add_place("s1");
  int s2 = np.net.add_place("s2");
  int s3 = np.net.add_place("s3", 1);
  Transition spawn;  // s3 -> s1 s2, no test
  spawn.name = "spawn";
  spawn.in.add(s3);
  spawn.out.add(s1);
  spawn.out.add(s2);
  np.net.add_transition(std::move(spawn));
  Transition drop1;  // consumes s1, no test
  drop1.name = "drop1";
  drop1.in.add(s1);
  np.net.add_transition(std::move(drop1));
  Transition drop2;  // consumes s2 only when s1 is empty
  drop2.name = "drop2";
  drop2.in.add(s2);
  drop2.zero.insert(s1);
  np.net.add_transition(std::move(drop2));
  np.f = {0, 1, 2};
  np.n = 2;
  return np;
}

std::int64_t pair_sum(const Multiset& m, int s, int r) {
  return m.count(s) + m.count(r);
}

}  // namespace

TEST_CASE("canonical shape recognition") {
  CHECK(gate_net().canonical());
  CHECK(two_level_net().canonical());
  NormalizedPNW bad = gate_net();
  bad.net.transitions[0].out.add(0);  // produces into its own test set
  CHECK(!bad.canonical());
}

TEST_CASE("balancing words") {
  NormalizedPNW np = two_level_net();
  int m = 3;
  {
    auto [u, v] = build_words(np, 0);  // spawn: I={s3}, O={s1,s2}
    CHECK(u.empty());                  // s3 is the untestable top place
    CHECK(v == Word({m + np.n + 0, m + np.n + 1}));  // c1 c2
  }
  {
    auto [u, v] = build_words(np, 1);  // drop1: I={s1}
    CHECK(u == Word({m + 0}));         // p1
    CHECK(v.empty());
  }
  // A doubled input gives a doubled pump word.
  NormalizedPNW np2 = np;
  np2.net.transitions[1].in.add(0);
  auto [u, v] = build_words(np2, 1);
  CHECK(u == Word({m + 0, m + 0}));
  CHECK(v.empty());
}

TEST_CASE("widget net shape") {
  NormalizedPNW np = gate_net();
  WidgetNet w = build_nprime(np);
  CHECK(w.net.places.size() == 3);       // s1 s2 r1
  CHECK(w.net.transitions.size() == 3);  // t1 p1 c1
  for (const auto& t : w.net.transitions) CHECK(t.zero.empty());
  // Original transitions never touch the widget places.
  for (size_t t = 0; t < np.net.transitions.size(); ++t)
    for (int r : w.r) {
      CHECK(w.net.transitions[t].in.count(r) == 0);
      CHECK(w.net.transitions[t].out.count(r) == 0);
    }
  CHECK(w.net.initial == np.net.initial);
  // v . t . u preserves every s_i + r_i sum wherever it fires.
  NormalizedPNW big = two_level_net();
  WidgetNet wb = build_nprime(big);
  for (int t = 0; t < 3; ++t) {
    auto [u, v] = build_words(big, t);
    Word w_full = v;
    w_full.push_back(t);
    for (int s : u) w_full.push_back(s);
    Multiset start;
    start.add(2, 2);  // two tokens on s3
    start.add(wb.r[0], 1);
    start.add(0, 1);
    if (auto end = fire_word(wb.net, start, w_full))
      for (int i = 0; i < big.n; ++i)
        CHECK(pair_sum(*end, i, wb.r[static_cast<size_t>(i)]) ==
              pair_sum(start, i, wb.r[static_cast<size_t>(i)]));
  }
}

TEST_CASE("normalization: pass-through, gadget, and equivalence") {
  {
    NormalizedPNW np = gate_net();
    NormalizedPNW out = normalize_pnw(np.net, np.f, Multiset());
    CHECK(out.net.places.size() == np.net.places.size());
    CHECK(out.n == np.n);
  }
  {
    // Non-canonical input: initial elsewhere, nonempty target, and a
    // transition producing into its own test set.
    PetriNet net;
    int a = net.add_place("a", 1);
    int b = net.add_place("b");
    Transition t;  // a -> b, but only while b is empty
    t.name = "t";
    t.in.add(a);
    t.out.add(b);
    t.zero.insert(b);
    net.add_transition(std::move(t));
    IndexFunction f = {1, 0};
    Multiset target;
    target.add(b);

    NormalizedPNW out = normalize_pnw(net, f, target);
    CHECK(out.canonical());
    // The offending production was split through a buffer.
    CHECK(out.net.find_transition("t.flush"));

    SearchBudget budget;
    budget.token_cap = 8;
    auto direct = bounded_reach(net, target, budget);
    auto folded = bounded_reach(out.net, Multiset(), budget);
    REQUIRE(direct.verdict == Verdict::Reached);
    CHECK(folded.verdict == Verdict::Reached);

    // An unreachable target folds to an unreachable empty marking.
    Multiset far;
    far.add(b, 2);
    NormalizedPNW out2 = normalize_pnw(net, f, far);
    CHECK(bounded_reach(net, far, budget).verdict == Verdict::ExhaustedNo);
    CHECK(bounded_reach(out2.net, Multiset(), budget).verdict ==
          Verdict::ExhaustedNo);
  }
  {
    PetriNet net;
    net.add_place("a");
    net.add_place("b");
    Transition t;
    t.name = "t";
    t.zero.insert(1);  // tests the higher place but not the lower
    net.add_transition(std::move(t));
    CHECK_THROWS_AS(normalize_pnw(net, {0, 1}, Multiset()), NotWeak);
  }
}

TEST_CASE("trace grammar: structure and nesting language") {
  NormalizedPNW np = gate_net();
  TraceGrammar tg = build_trace_grammar(np);
  CHECK(tg.index == 2);
  CHECK(tg.start == tg.a[1]);
  CHECK(tg.grammar.terminals.size() == 3);  // t1 p1 c1

  SearchBudget budget;
  auto words = enum_table(tg.grammar, 5, budget).words(tg.start, tg.index);
  // t1 alone is allowed (the test happens at empty widget).
  CHECK(words.count({0}) == 1);
  CHECK(words.count({}) == 1);
  // Empty brackets and concatenations are allowed.
  CHECK(words.count({1, 2}) == 1);
  CHECK(words.count({1, 2, 0}) == 1);
  CHECK(words.count({0, 1, 2, 0}) == 1);
  // The tested transition may not run inside a pump bracket, and
  // unbalanced or mis-ordered pump/drain words are out.
  CHECK(words.count({1, 0, 2}) == 0);
  CHECK(words.count({1}) == 0);
  CHECK(words.count({2, 1}) == 0);
  CHECK(words.count({1, 0}) == 0);
  // Every member has balanced pumps and drains.
  for (const Word& w : words) {
    int depth = 0;
    for (int s : w) {
      if (s == 1) ++depth;
      if (s == 2) --depth;
    }
    CHECK(depth == 0);
  }
}

TEST_CASE("trace grammar: tower containment, projection, and index slice") {
  NormalizedPNW np = two_level_net();
  TraceGrammar tg = build_trace_grammar(np);
  SearchBudget budget;
  auto table = enum_table(tg.grammar, 6, budget);

  // Lower tower levels embed in higher ones at every bound.
  for (int l = 1; l <= np.n; ++l) {
    auto lo = table.words(tg.a[static_cast<size_t>(l - 1)], l);
    auto hi = table.words(tg.a[static_cast<size_t>(l)], l + 1);
    for (const Word& w : lo) CHECK(hi.count(w) == 1);
  }

  // The claimed index bound does not cut the language: the unindexed and
  // (n+1)-indexed slices coincide.
  auto full = table.words(tg.start, std::nullopt);
  auto sliced = table.words(tg.start, tg.index);
  CHECK(full == sliced);

  // Every short word over the original transitions lifts into the tower
  // (projection onto T is total), searched with padding headroom.
  auto padded = enum_table(tg.grammar, 10, budget);
  auto pool = padded.words(tg.start, std::nullopt);
  std::set<int> t_alpha = {0, 1, 2};
  std::set<Word> projections;
  for (const Word& w : pool) projections.insert(project(w, t_alpha));
  for (int a = 0; a < 3; ++a) {
    CHECK(projections.count({a}) == 1);
    for (int b = 0; b < 3; ++b) CHECK(projections.count({a, b}) == 1);
  }
}

TEST_CASE("token conservation along the trace language") {
  std::mt19937 rng(77);
  SearchBudget budget;
  int fired = 0;
  for (int trial = 0; trial < 25; ++trial) {
    PetriNet net = random_weak_net(rng, 3, 3, 2);
    IndexFunction f = {0, 1, 2};
    NormalizedPNW np = normalize_pnw(net, f, Multiset());
    WidgetNet w = build_nprime(np);
    TraceGrammar tg = build_trace_grammar(np);
    auto words = enum_table(tg.grammar, 5, budget).words(tg.start, tg.index);
    Multiset start = w.net.initial;
    start.add(w.r[0], 1);
    for (const Word& word : words) {
      auto end = fire_word(w.net, start, word);
      if (!end) continue;
      ++fired;
      for (int i = 0; i < np.n; ++i)
        CHECK(pair_sum(*end, i, w.r[static_cast<size_t>(i)]) ==
              pair_sum(start, i, w.r[static_cast<size_t>(i)]));
    }
  }
  CHECK(fired > 50);
}

TEST_CASE("widget runs with clean endpoints project onto the tested net") {
  NormalizedPNW np = two_level_net();
  WidgetNet w = build_nprime(np);
  TraceGrammar tg = build_trace_grammar(np);
  SearchBudget budget;
  auto words = enum_table(tg.grammar, 6, budget).words(tg.start, tg.index);
  std::set<int> t_alpha = {0, 1, 2};
  int projected = 0;
  Multiset start = w.net.initial;  // one token on s3; s/r below are empty
  for (const Word& word : words) {
    auto end = fire_word(w.net, start, word);
    if (!end) continue;
    bool clean = true;
    for (int i = 0; i < np.n; ++i)
      if (end->count(i) || end->count(w.r[static_cast<size_t>(i)]))
        clean = false;
    if (!clean) continue;
    ++projected;
    // The projection must replay in the original net, tests included.
    Multiset s_end;
    for (int p = 0; p < np.net.places.size(); ++p)
      if (end->count(p)) s_end.add(p, end->count(p));
    auto replay = fire_word(np.net, np.net.initial, project(word, t_alpha));
    REQUIRE(replay);
    CHECK(*replay == s_end);
  }
  CHECK(projected > 3);
}

TEST_CASE("tested-net runs lift into the widget net") {
  SearchBudget budget;
  int lifted = 0;
  struct Case {
    NormalizedPNW np;
    int pool_len;
  };
  for (const Case& c : {Case{gate_net(), 6}, Case{two_level_net(), 11}}) {
    const NormalizedPNW& np = c.np;
    WidgetNet w = build_nprime(np);
    TraceGrammar tg = build_trace_grammar(np);
    auto pool =
        enum_table(tg.grammar, c.pool_len, budget).words(tg.start, tg.index);
    std::set<int> t_alpha;
    for (size_t t = 0; t < np.net.transitions.size(); ++t)
      t_alpha.insert(static_cast<int>(t));

    // Collect decisive runs of the tested net whose endpoints are clean on
    // the testable places, then require a padded preimage in the widget
    // net (the padding headroom is pool_len - |run|).
    std::set<Word> t_words;
    for (const Word& word : pool) {
      Word p = project(word, t_alpha);
      if (p.size() <= 3) t_words.insert(std::move(p));
    }
    for (const Word& wt : t_words) {
      auto end = fire_word(np.net, np.net.initial, wt);
      if (!end) continue;
      bool clean = true;
      for (int i = 0; i < np.n; ++i)
        if (end->count(i)) clean = false;
      if (!clean) continue;
      bool found = false;
      for (const Word& cand : pool) {
        if (project(cand, t_alpha) != wt) continue;
        auto lift = fire_word(w.net, w.net.initial, cand);
        if (!lift) continue;
        bool r_clean = true;
        for (int r : w.r)
          if (lift->count(r)) r_clean = false;
        Multiset s_lift;
        for (int p = 0; p < np.net.places.size(); ++p)
          if (lift->count(p)) s_lift.add(p, lift->count(p));
        if (r_clean && s_lift == *end) {
          found = true;
          break;
        }
      }
      CHECK(found);
      if (found) ++lifted;
    }
  }
  CHECK(lifted > 3);
}

TEST_CASE("decide: the gate examples") {
  SearchBudget budget;
  {
    NormalizedPNW np = gate_net();
    auto r = backward_decide(np.net, np.f, Multiset(), budget, true);
    CHECK(r.verdict == Verdict::Reached);
    REQUIRE(r.witness);
    // The witness projects onto the single original transition.
    Word proj = project(*r.witness, {0});
    CHECK(proj == Word{0});
  }
  {
    // One token on the tested place instead: t1 is inhibited and also
    // lacks its input, so nothing ever fires.
    PetriNet net = gate_net().net;
    net.initial = Multiset::of({0});
    auto r = backward_decide(net, {0, 1}, Multiset(), budget);
    CHECK(r.verdict != Verdict::Reached);
  }
}

namespace {

// Random net already in canonical shape: one token on the untestable top
// place, prefix zero tests, no production into a tested place.
NormalizedPNW random_canonical(std::mt19937& rng, int places,
                               int num_transitions) {
  NormalizedPNW np;
  for (int p = 0; p < places; ++p)
    np.net.add_place("s" + std::to_string(p + 1), p == places - 1 ? 1 : 0);
  np.n = places - 1;
  for (int p = 0; p < places; ++p) np.f.push_back(p);
  std::uniform_int_distribution<int> place(0, places - 1);
  std::uniform_int_distribution<int> arcs(1, 2);
  std::uniform_int_distribution<int> outs(0, 1);
  std::uniform_int_distribution<int> zed(0, np.n);
  for (int t = 0; t < num_transitions; ++t) {
    Transition tr;
    tr.name = "t" + std::to_string(t + 1);
    int zn = zed(rng);
    for (int p = 0; p < zn; ++p) tr.zero.insert(p);
    for (int i = arcs(rng); i > 0; --i) tr.in.add(place(rng));
    for (int i = outs(rng); i > 0; --i) {
      int p = place(rng);
      if (!tr.zero.count(p)) tr.out.add(p);
    }
    np.net.add_transition(std::move(tr));
  }
  return np;
}

}  // namespace

TEST_CASE("decide agrees with direct search on a canonical corpus") {
  std::mt19937 rng(909);
  SearchBudget budget;
  budget.len_cap = 8;
  SearchBudget direct_budget;
  direct_budget.token_cap = 10;
  int hits = 0, refutations = 0;
  for (int trial = 0; trial < 40; ++trial) {
    NormalizedPNW np = random_canonical(rng, 3, 3);
    REQUIRE(np.canonical());
    auto direct = bounded_reach(np.net, Multiset(), direct_budget);
    auto bwd = backward_decide(np.net, np.f, Multiset(), budget);
    if (bwd.verdict == Verdict::Reached) {
      ++hits;
      CHECK(direct.verdict == Verdict::Reached);
      REQUIRE(bwd.witness);
      // The witness projects to a run of the tested net reaching empty.
      std::set<int> t_alpha;
      for (size_t t = 0; t < np.net.transitions.size(); ++t)
        t_alpha.insert(static_cast<int>(t));
      auto replay =
          fire_word(np.net, np.net.initial, project(*bwd.witness, t_alpha));
      REQUIRE(replay);
      CHECK(replay->empty());
    }
    if (direct.verdict == Verdict::ExhaustedNo) {
      ++refutations;
      CHECK(bwd.verdict != Verdict::Reached);
    }
  }
  CHECK(hits > 8);
  CHECK(refutations > 8);
}
