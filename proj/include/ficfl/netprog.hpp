#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "ficfl/petri.hpp"

namespace ficfl {

struct Command {
  enum class Kind {
    Inc,            // x := x + 1
    Dec,            // x := x - 1 (blocks at zero)
    Goto,           // goto l
    IfAllZeroGoto,  // if x1,..,xn = 0 then goto l (blocks otherwise)
    NondetGoto,     // goto l1 or .. or goto lm
    Gosub,
    Return,
    Halt,
  };
  std::string label;
  Kind kind = Kind::Halt;
  std::string counter;                // Inc/Dec
  std::vector<std::string> counters;  // IfAllZeroGoto test set
  std::vector<std::string> targets;   // Goto/IfAllZeroGoto (1), NondetGoto (m)
  std::string callee;                 // Gosub
};

struct Subroutine {
  std::string name;
  int level = 0;
  std::vector<Command> commands;  // commands[0] is the entry; its label == name
};

// Stratified counter program: the entry subroutine sits at level 0 and a
// level-i subroutine may only gosub level-(i+1) subroutines.
struct NetProgram {
  std::vector<std::string> counters;
  std::vector<Subroutine> subroutines;
  std::string entry;

  const Subroutine* find(const std::string& name) const {
    for (const auto& s : subroutines)
      if (s.name == name) return &s;
    return nullptr;
  }
};

struct CheckIssue {
  std::string kind;  // DuplicateLabel, DanglingJump, CrossSubroutineJump,
                     // LevelViolation, MissingReturn, ...
  std::string detail;
};

struct CheckResult {
  std::vector<CheckIssue> issues;
  std::map<std::string, int> levels;  // per subroutine, when consistent
  bool ok() const { return issues.empty(); }
};

CheckResult check_program(const NetProgram& p);

enum class RunVerdict { Halted, Stuck, BudgetExceeded };

const char* run_verdict_name(RunVerdict v);

using Valuation = std::map<std::string, std::int64_t>;  // nonzero counters

struct RunResult {
  RunVerdict verdict = RunVerdict::BudgetExceeded;
  std::set<Valuation> halts;  // all halting valuations found
  bool exhaustive = false;    // full state space within the budget
  std::int64_t states = 0;
};

// Breadth-first interpreter over (call chain, counters) states.  Counter
// totals above budget.token_cap are pruned (clearing `exhaustive`).
RunResult run_program(const NetProgram& p, const SearchBudget& budget);

struct CompiledProgram {
  PetriNet net;
  std::map<std::string, int> counter_place;
  std::map<std::string, int> label_place;
  std::map<std::string, int> callsite_place;  // keyed by gosub label
  int halt_place = -1;
};

// One place per counter, per label, and per gosub call site, plus a halt
// place; the initial marking puts one control token on the entry label.
// Returns with inhibitor arcs on the zero tests (a PNI in general).
CompiledProgram compile_program(const NetProgram& p);

// Level certificate for the compiled net: counter places keep their given
// level, every control/call-site/halt place gets (max level) + 2.
IndexFunction program_index_function(const NetProgram& p,
                                     const CompiledProgram& c,
                                     const Valuation& counter_level);

}  // namespace ficfl
