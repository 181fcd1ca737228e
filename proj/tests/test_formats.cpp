#include <random>

#include "doctest.h"
#include "ficfl/formats.hpp"
#include "ficfl/generators.hpp"
#include "ficfl/reduce_fwd.hpp"
#include "ficfl/report.hpp"

using namespace ficfl;

TEST_CASE("net files round-trip bit-exactly") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    PetriNet net = trial % 2 ? random_weak_net(rng, 4, 3, 3)
                             : random_conservative_net(rng, 3, 4, 2);
    std::string s = serialize_pn(net);
    PetriNet back = parse_pn(s);
    CHECK(serialize_pn(back) == s);
    CHECK(back.places == net.places);
    CHECK(back.initial == net.initial);
    REQUIRE(back.transitions.size() == net.transitions.size());
    for (size_t t = 0; t < net.transitions.size(); ++t) {
      CHECK(back.transitions[t].name == net.transitions[t].name);
      CHECK(back.transitions[t].in == net.transitions[t].in);
      CHECK(back.transitions[t].out == net.transitions[t].out);
      CHECK(back.transitions[t].zero == net.transitions[t].zero);
    }
  }
}

TEST_CASE("net file parse errors carry line numbers") {
  CHECK_THROWS_AS(parse_pn("place p\nplace p\n"), ParseError);
  try {
    parse_pn("place p\ntrans t in {p:1}\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
  }
  try {
    parse_pn("place p\nbogus x\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
  }
}

TEST_CASE("grammar files round-trip, keeping silent symbols") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    Grammar g = random_restricted_grammar(rng);
    // Annotated grammars exercise bracketed names and productionless
    // variables.
    if (trial % 2) g = annotate(g, 2);
    std::string s = serialize_cfg(g, g.variables.name(0));
    CfgFile back = parse_cfg(s);
    CHECK(serialize_cfg(back.grammar, back.start) == s);
    CHECK(back.grammar.variables == g.variables);
    CHECK(back.grammar.terminals == g.terminals);
    CHECK(back.grammar.productions == g.productions);
    CHECK(back.start == g.variables.name(0));
  }
}

TEST_CASE("grammar hand syntax: alternation and eps") {
  CfgFile f = parse_cfg("start S\nS -> a S b | eps\n");
  REQUIRE(f.start == "S");
  CHECK(f.grammar.variables.size() == 1);
  CHECK(f.grammar.terminals.size() == 2);
  REQUIRE(f.grammar.productions.size() == 2);
  CHECK(f.grammar.productions[0].body.size() == 3);
  CHECK(f.grammar.productions[1].body.empty());
}

TEST_CASE("program files round-trip bit-exactly") {
  ProblemInstance inst;
  int p = inst.net.add_place("p", 1);
  int q = inst.net.add_place("q");
  Transition t;
  t.name = "t_a";
  t.in.add(p);
  t.out.add(q);
  inst.net.add_transition(std::move(t));
  GSym X = inst.grammar.var("X"), Y = inst.grammar.var("Y");
  inst.grammar.add(X.id, {Y, Y});
  inst.grammar.add(Y.id, {inst.grammar.term("a")});
  inst.binding = {0};
  inst.m_final = Multiset::of({q});

  NetProgram prog =
      build_forward_program(inst, 1, inst.net.initial, inst.m_final);
  std::string s = serialize_np(prog);
  NetProgram back = parse_np(s);
  CHECK(serialize_np(back) == s);
  CHECK(check_program(back).ok());
  CHECK(back.counters == prog.counters);
  CHECK(back.entry == prog.entry);
  REQUIRE(back.subroutines.size() == prog.subroutines.size());
  for (size_t i = 0; i < prog.subroutines.size(); ++i) {
    CHECK(back.subroutines[i].name == prog.subroutines[i].name);
    CHECK(back.subroutines[i].level == prog.subroutines[i].level);
    CHECK(back.subroutines[i].commands.size() ==
          prog.subroutines[i].commands.size());
  }
  // The two interpreters see the same program.
  SearchBudget budget;
  budget.token_cap = 8;
  CHECK(run_program(back, budget).halts == run_program(prog, budget).halts);
}

TEST_CASE("program parse errors") {
  CHECK_THROWS_AS(parse_np("sub m level 0:\n  a: halt\n  a: halt\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_np("  a: halt\n"), ParseError);
  CHECK_THROWS_AS(parse_np("sub m level 0:\n  a: frobnicate\n"), ParseError);
}

TEST_CASE("instance bundles round-trip and assemble") {
  InstFile f;
  f.net_path = "tiny.pn";
  f.cfg_path = "tiny.cfg";
  f.start = "X";
  f.bind = {{"a", "t_a"}};
  f.k = 1;
  f.final_literal = "{q:1}";
  std::string s = serialize_inst(f);
  InstFile back = parse_inst(s);
  CHECK(serialize_inst(back) == s);

  PetriNet net = parse_pn("place p init=1\nplace q\n"
                          "trans t_a in {p:1} out {q:1}\n");
  CfgFile cfg = parse_cfg("var X\nterm a\nX -> a\n");
  ProblemInstance inst = assemble_instance(back, net, cfg.grammar);
  inst.validate();
  CHECK(inst.k == 1);
  CHECK(inst.m_final == Multiset::of({1}));
  CHECK(inst.binding == std::vector<int>{0});

  InstFile missing = back;
  missing.bind.clear();
  CHECK_THROWS_AS(assemble_instance(missing, net, cfg.grammar),
                  UnboundTerminal);
}

TEST_CASE("reports digest content and serialize stably") {
  CHECK(content_digest("") == "cbf29ce484222325");
  CHECK(content_digest("abc") != content_digest("abd"));

  RunReport r;
  r.command = "reach";
  r.inputs["net"] = content_digest("place p\n");
  r.verdict = "Reached";
  r.witness = "t_a t_b";
  r.witness_length = 2;
  r.seed = 42;
  std::string j = report_to_json(r);
  CHECK(j == report_to_json(r));
  CHECK(j.find("\"schema\": 1") != std::string::npos);
  CHECK(j.find("\"witness_length\": 2") != std::string::npos);
}
