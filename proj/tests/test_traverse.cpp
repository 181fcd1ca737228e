#include <random>

#include "doctest.h"
#include "ficfl/generators.hpp"
#include "ficfl/traverse.hpp"

using namespace ficfl;

namespace {

// p --t_a--> q
PetriNet pq_net() {
  PetriNet net;
  int p = net.add_place("p", 1);
  int q = net.add_place("q");
  Transition t;
  t.name = "t_a";
  t.in.add(p);
  t.out.add(q);
  net.add_transition(std::move(t));
  return net;
}

Grammar single_terminal_gk() {
  Grammar g;
  GSym X = g.var("X");
  g.add(X.id, {g.term("a")});
  return annotate(g, 0);
}

}  // namespace

TEST_CASE("parse_allowance") {
  CHECK(parse_allowance("X[0]") == 0);
  CHECK(parse_allowance("Foo[12]") == 12);
  CHECK(!parse_allowance("X"));
  CHECK(!parse_allowance("X[]"));
  CHECK(!parse_allowance("X[a]"));
}

TEST_CASE("single-terminal walk succeeds exactly on the fired marking") {
  PetriNet net = pq_net();
  Grammar gk = single_terminal_gk();
  int x0 = gk.variables.at("X[0]");
  SearchBudget budget;
  budget.token_cap = 1;

  auto hit = run_traverse(net, gk, x0, Multiset::of({0}), Multiset::of({1}),
                          {0}, budget);
  CHECK(hit.verdict == Verdict::Reached);
  REQUIRE(hit.witness);
  CHECK(*hit.witness == Word{gk.terminals.at("a")});
  CHECK(replay_trace(net, gk, x0, Multiset::of({0}), Multiset::of({1}), {0},
                     hit.trace));

  auto miss = run_traverse(net, gk, x0, Multiset::of({0}), Multiset::of({0}),
                           {0}, budget);
  CHECK(miss.verdict == Verdict::ExhaustedNo);
}

TEST_CASE("productionless annotated variable fails") {
  PetriNet net = pq_net();
  Transition t;
  t.name = "t_b";
  t.in.add(1);
  t.out.add(0);
  net.add_transition(std::move(t));
  Grammar g;
  GSym X = g.var("X"), Y = g.var("Y"), Z = g.var("Z");
  g.add(X.id, {Y, Z});
  g.add(Y.id, {g.term("a")});
  g.add(Z.id, {g.term("b")});
  Grammar gk = annotate(g, 1);
  SearchBudget budget;
  budget.token_cap = 1;
  // X[0] only exists through binary productions, which need allowance 1.
  auto r = run_traverse(net, gk, gk.variables.at("X[0]"), Multiset::of({0}),
                        Multiset::of({1}), {0, 1}, budget);
  CHECK(r.verdict == Verdict::ExhaustedNo);
  // X[1] can split: a then b, p -> q -> p.
  auto r1 = run_traverse(net, gk, gk.variables.at("X[1]"), Multiset::of({0}),
                         Multiset::of({0}), {0, 1}, budget);
  CHECK(r1.verdict == Verdict::Reached);
  CHECK(*r1.witness == Word({gk.terminals.at("a"), gk.terminals.at("b")}));
  CHECK(replay_trace(net, gk, gk.variables.at("X[1]"), Multiset::of({0}),
                     Multiset::of({0}), {0, 1}, r1.trace));
}

TEST_CASE("explicit context entry enforces the proper-call invariant") {
  PetriNet net = pq_net();
  Grammar gk = single_terminal_gk();
  TraverseState st;
  st.mi.resize(1);
  st.mf.resize(1);
  st.level = 0;
  st.mi[0] = Multiset::of({0});
  st.mf[0] = Multiset::of({1});
  CHECK(st.proper());
  SearchBudget budget;
  budget.token_cap = 1;
  auto r = run_traverse(net, gk, gk.variables.at("X[0]"), st, {0}, budget);
  CHECK(r.verdict == Verdict::Reached);

  TraverseState bad;
  bad.mi.resize(2);
  bad.mf.resize(2);
  bad.level = 1;
  bad.mi[0] = Multiset::of({0});  // dirt below the call level
  CHECK(!bad.proper());
  CHECK_THROWS_AS(run_traverse(net, gk, 0, bad, {0}, budget), ImproperCall);
}

TEST_CASE("tampered traces fail replay") {
  PetriNet net = pq_net();
  Grammar gk = single_terminal_gk();
  int x0 = gk.variables.at("X[0]");
  SearchBudget budget;
  budget.token_cap = 1;
  auto r = run_traverse(net, gk, x0, Multiset::of({0}), Multiset::of({1}),
                        {0}, budget);
  REQUIRE(r.verdict == Verdict::Reached);

  auto mutated = r.trace;
  mutated[0].mi = Multiset::of({1});
  CHECK(!replay_trace(net, gk, x0, Multiset::of({0}), Multiset::of({1}), {0},
                      mutated));
  CHECK(!replay_trace(net, gk, x0, Multiset::of({0}), Multiset::of({1}), {0},
                      {}));
  auto padded = r.trace;
  padded.push_back(r.trace[0]);
  CHECK(!replay_trace(net, gk, x0, Multiset::of({0}), Multiset::of({1}), {0},
                      padded));
}

TEST_CASE("trace serialization is stable") {
  PetriNet net = pq_net();
  Grammar gk = single_terminal_gk();
  int x0 = gk.variables.at("X[0]");
  SearchBudget budget;
  budget.token_cap = 1;
  auto r = run_traverse(net, gk, x0, Multiset::of({0}), Multiset::of({1}),
                        {0}, budget);
  REQUIRE(r.verdict == Verdict::Reached);
  std::string js = trace_to_json(r.trace, gk, net.places);
  CHECK(js.find("\"var\": \"X[0]\"") != std::string::npos);
  CHECK(js.find("{p:1}") != std::string::npos);
  CHECK(js == trace_to_json(r.trace, gk, net.places));
}

TEST_CASE("walk agrees with the brute-force language check") {
  std::mt19937 rng(211);
  SearchBudget budget;
  SearchBudget lang_budget;
  int reached = 0, refuted = 0;
  for (int trial = 0; trial < 120; ++trial) {
    PetriNet net = random_conservative_net(rng, 4, 3, 3);
    Grammar g = random_restricted_grammar(
        rng, 3, 7, static_cast<int>(net.transitions.size()));
    std::vector<int> binding;
    for (int t = 0; t < g.terminals.size(); ++t) binding.push_back(t);
    std::uniform_int_distribution<int> kdist(0, 2);
    int k = kdist(rng);
    Grammar gk = annotate(g, k);
    std::uniform_int_distribution<int> var(0, g.variables.size() - 1);
    std::uniform_int_distribution<int> lev(0, k);
    int x = gk.variables.at(
        annotated_name(g.variables.name(var(rng)), lev(rng)));

    Multiset m = net.initial;
    // Half the trials aim at a marking produced by firing a language word.
    auto words = enum_table(gk, 6, lang_budget).words(x, std::nullopt);
    Multiset mp = m;
    if (!words.empty() && trial % 2 == 0) {
      auto it = words.begin();
      std::advance(it, static_cast<long>(trial / 2 % words.size()));
      Word w;
      for (int s : *it) w.push_back(binding[static_cast<size_t>(s)]);
      if (auto fired = fire_word(net, m, w)) mp = *fired;
    }

    budget.token_cap = m.total();
    auto res = run_traverse(net, gk, x, m, mp, binding, budget);

    // Brute-force side: does some bounded language word fire m to mp?
    bool oracle_hit = false;
    for (const Word& w : words) {
      Word tw;
      for (int s : w) tw.push_back(binding[static_cast<size_t>(s)]);
      auto fired = fire_word(net, m, tw);
      if (fired && *fired == mp) {
        oracle_hit = true;
        break;
      }
    }

    if (res.verdict == Verdict::Reached) {
      ++reached;
      REQUIRE(res.witness);
      // The witness is independently validated: language membership plus
      // an exact replay of the firing sequence and of the trace.
      Derivation d = derive_word(gk, x, *res.witness, std::nullopt,
                                 lang_budget);
      CHECK(check_derivation_index(gk, d) >= 1);
      Word tw;
      for (int s : *res.witness) tw.push_back(binding[static_cast<size_t>(s)]);
      auto fired = fire_word(net, m, tw);
      REQUIRE(fired);
      CHECK(*fired == mp);
      CHECK(replay_trace(net, gk, x, m, mp, binding, res.trace));
    } else if (res.verdict == Verdict::ExhaustedNo) {
      ++refuted;
      CHECK(!oracle_hit);
    }
    if (oracle_hit) CHECK(res.verdict == Verdict::Reached);
  }
  CHECK(reached > 20);
  CHECK(refuted > 20);
}
