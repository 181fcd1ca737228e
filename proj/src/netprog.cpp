#include "ficfl/netprog.hpp"

#include <algorithm>
#include <deque>
#include <utility>

namespace ficfl {

const char* run_verdict_name(RunVerdict v) {
  switch (v) {
    case RunVerdict::Halted: return "Halted";
    case RunVerdict::Stuck: return "Stuck";
    case RunVerdict::BudgetExceeded: return "BudgetExceeded";
  }
  return "?";
}

namespace {

struct Site {
  int sub = -1;  // subroutine index
  int pc = -1;   // command index
};

// Global label directory: label -> (sub, pc).
std::map<std::string, Site> label_sites(const NetProgram& p) {
  std::map<std::string, Site> sites;
  for (size_t s = 0; s < p.subroutines.size(); ++s)
    for (size_t c = 0; c < p.subroutines[s].commands.size(); ++c)
      sites.emplace(p.subroutines[s].commands[c].label,
                    Site{static_cast<int>(s), static_cast<int>(c)});
  return sites;
}

}  // namespace

CheckResult check_program(const NetProgram& p) {
  CheckResult r;
  auto issue = [&](const std::string& kind, const std::string& detail) {
    r.issues.push_back({kind, detail});
  };

  std::map<std::string, int> sub_index;
  for (size_t s = 0; s < p.subroutines.size(); ++s) {
    const auto& sub = p.subroutines[s];
    if (!sub_index.emplace(sub.name, static_cast<int>(s)).second)
      issue("DuplicateLabel", "subroutine name reused: " + sub.name);
    if (sub.level < 0)
      issue("LevelViolation", "negative level on " + sub.name);
  }
  auto entry_it = sub_index.find(p.entry);
  if (entry_it == sub_index.end()) {
    issue("DanglingJump", "entry subroutine missing: " + p.entry);
    return r;
  }
  if (p.subroutines[static_cast<size_t>(entry_it->second)].level != 0)
    issue("LevelViolation", "entry subroutine must sit at level 0");

  std::set<std::string> counters(p.counters.begin(), p.counters.end());
  if (counters.size() != p.counters.size())
    issue("DuplicateLabel", "counter declared twice");

  std::map<std::string, int> label_sub;  // label -> subroutine index
  for (size_t s = 0; s < p.subroutines.size(); ++s) {
    const auto& sub = p.subroutines[s];
    if (sub.commands.empty()) {
      issue("MissingReturn", "empty subroutine: " + sub.name);
      continue;
    }
    if (sub.commands.front().label != sub.name)
      issue("DanglingJump",
            "entry command of " + sub.name + " must carry the sub's name");
    for (const auto& cmd : sub.commands) {
      if (!label_sub.emplace(cmd.label, static_cast<int>(s)).second)
        issue("DuplicateLabel", cmd.label);
      if (counters.count(cmd.label))
        issue("DuplicateLabel", "label shadows a counter: " + cmd.label);
    }
  }

  auto check_counter = [&](const std::string& x, const std::string& at) {
    if (!counters.count(x))
      issue("UnknownCounter", x + " at " + at);
  };

  for (size_t s = 0; s < p.subroutines.size(); ++s) {
    const auto& sub = p.subroutines[s];
    bool is_entry = sub.name == p.entry;
    int returns = 0, halts = 0;
    for (size_t c = 0; c < sub.commands.size(); ++c) {
      const auto& cmd = sub.commands[c];
      switch (cmd.kind) {
        case Command::Kind::Inc:
        case Command::Kind::Dec:
          check_counter(cmd.counter, cmd.label);
          break;
        case Command::Kind::Goto:
        case Command::Kind::IfAllZeroGoto:
        case Command::Kind::NondetGoto:
          for (const auto& x : cmd.counters) check_counter(x, cmd.label);
          if (cmd.targets.empty())
            issue("DanglingJump", "no target at " + cmd.label);
          for (const auto& t : cmd.targets) {
            auto it = label_sub.find(t);
            if (it == label_sub.end())
              issue("DanglingJump", t + " from " + cmd.label);
            else if (it->second != static_cast<int>(s))
              issue("CrossSubroutineJump", t + " from " + cmd.label);
          }
          break;
        case Command::Kind::Gosub: {
          auto it = sub_index.find(cmd.callee);
          if (it == sub_index.end()) {
            issue("DanglingJump", "gosub " + cmd.callee + " at " + cmd.label);
          } else if (p.subroutines[static_cast<size_t>(it->second)].level !=
                     sub.level + 1) {
            issue("LevelViolation",
                  "gosub " + cmd.callee + " at " + cmd.label + " (level " +
                      std::to_string(sub.level) + " -> " +
                      std::to_string(
                          p.subroutines[static_cast<size_t>(it->second)]
                              .level) +
                      ")");
          }
          if (c + 1 == sub.commands.size())
            issue("DanglingJump",
                  "gosub has no continuation at " + cmd.label);
          break;
        }
        case Command::Kind::Return:
          ++returns;
          if (c == 0)
            issue("MissingReturn",
                  "entry of " + sub.name + " may not be its exit");
          break;
        case Command::Kind::Halt:
          ++halts;
          break;
      }
    }
    if (is_entry) {
      if (halts == 0)
        issue("MissingReturn", "entry subroutine never halts: " + sub.name);
      if (returns != 0)
        issue("MissingReturn",
              "entry subroutine may not return: " + sub.name);
    } else {
      if (returns == 0)
        issue("MissingReturn", sub.name);
      if (returns > 1)
        issue("MissingReturn", "multiple returns in " + sub.name);
      if (halts != 0)
        issue("MissingReturn", "halt outside the entry subroutine: " + sub.name);
    }
  }

  if (r.issues.empty())
    for (const auto& sub : p.subroutines) r.levels[sub.name] = sub.level;
  return r;
}

namespace {

// Interpreter state: the pending-call chain (bottom = entry subroutine) and
// the counter valuation.  pc of a suspended frame already points past its
// gosub command.
using ProgState = std::pair<std::vector<std::pair<int, int>>,
                            std::vector<std::int64_t>>;

}  // namespace

RunResult run_program(const NetProgram& p, const SearchBudget& budget) {
  auto chk = check_program(p);
  if (!chk.ok()) throw Error("run_program: " + chk.issues.front().kind +
                             ": " + chk.issues.front().detail);

  std::map<std::string, int> cidx;
  for (size_t i = 0; i < p.counters.size(); ++i)
    cidx[p.counters[i]] = static_cast<int>(i);
  auto sites = label_sites(p);
  std::map<std::string, int> sub_index;
  for (size_t s = 0; s < p.subroutines.size(); ++s)
    sub_index[p.subroutines[s].name] = static_cast<int>(s);

  RunResult res;
  bool pruned = false, capped = false;

  ProgState init{{{sub_index.at(p.entry), 0}},
                 std::vector<std::int64_t>(p.counters.size(), 0)};
  std::set<ProgState> seen{init};
  std::deque<ProgState> frontier{init};

  auto push = [&](ProgState st) {
    std::int64_t total = 0;
    for (auto n : st.second) total += n;
    if (total > budget.token_cap) {
      pruned = true;
      return;
    }
    if (seen.insert(st).second) frontier.push_back(std::move(st));
  };

  while (!frontier.empty()) {
    if (res.states >= budget.step_cap) {
      capped = true;
      break;
    }
    ProgState st = std::move(frontier.front());
    frontier.pop_front();
    ++res.states;

    auto [sub, pc] = st.first.back();
    const auto& cmds = p.subroutines[static_cast<size_t>(sub)].commands;
    if (pc >= static_cast<int>(cmds.size())) continue;  // fell off: stuck
    const Command& cmd = cmds[static_cast<size_t>(pc)];

    auto advance = [&](ProgState next) {
      next.first.back().second += 1;
      push(std::move(next));
    };

    switch (cmd.kind) {
      case Command::Kind::Inc: {
        ProgState next = st;
        next.second[static_cast<size_t>(cidx.at(cmd.counter))] += 1;
        advance(std::move(next));
        break;
      }
      case Command::Kind::Dec: {
        auto& n = st.second[static_cast<size_t>(cidx.at(cmd.counter))];
        if (n > 0) {
          ProgState next = st;
          next.second[static_cast<size_t>(cidx.at(cmd.counter))] -= 1;
          advance(std::move(next));
        }
        break;
      }
      case Command::Kind::Goto:
      case Command::Kind::NondetGoto:
        for (const auto& t : cmd.targets) {
          ProgState next = st;
          next.first.back().second = sites.at(t).pc;
          push(std::move(next));
        }
        break;
      case Command::Kind::IfAllZeroGoto: {
        bool all_zero = true;
        for (const auto& x : cmd.counters)
          if (st.second[static_cast<size_t>(cidx.at(x))] != 0) all_zero = false;
        if (all_zero) {
          ProgState next = st;
          next.first.back().second = sites.at(cmd.targets.front()).pc;
          push(std::move(next));
        }
        break;
      }
      case Command::Kind::Gosub: {
        ProgState next = st;
        next.first.back().second += 1;  // resume here on return
        next.first.emplace_back(sub_index.at(cmd.callee), 0);
        push(std::move(next));
        break;
      }
      case Command::Kind::Return: {
        ProgState next = st;
        next.first.pop_back();
        if (!next.first.empty()) push(std::move(next));
        break;
      }
      case Command::Kind::Halt: {
        Valuation v;
        for (size_t i = 0; i < p.counters.size(); ++i)
          if (st.second[i] != 0) v[p.counters[i]] = st.second[i];
        res.halts.insert(std::move(v));
        break;
      }
    }
  }

  res.exhaustive = !pruned && !capped;
  if (!res.halts.empty())
    res.verdict = RunVerdict::Halted;
  else
    res.verdict = res.exhaustive ? RunVerdict::Stuck
                                 : RunVerdict::BudgetExceeded;
  return res;
}

CompiledProgram compile_program(const NetProgram& p) {
  auto chk = check_program(p);
  if (!chk.ok())
    throw Error("compile_program: " + chk.issues.front().kind + ": " +
                chk.issues.front().detail);

  CompiledProgram c;
  for (const auto& x : p.counters)
    c.counter_place[x] = c.net.add_place(x);
  for (const auto& sub : p.subroutines)
    for (const auto& cmd : sub.commands) {
      c.label_place[cmd.label] = c.net.add_place(cmd.label);
      if (cmd.kind == Command::Kind::Gosub)
        c.callsite_place[cmd.label] = c.net.add_place("@ret_" + cmd.label);
    }
  c.halt_place = c.net.add_place("@halt");

  // (callee subroutine index) -> gosub commands targeting it, with the place
  // holding control after the call.
  std::map<std::string, std::vector<std::pair<int, int>>> callers;

  auto next_place = [&](const Subroutine& sub,
                        size_t pc) -> std::optional<int> {
    if (pc + 1 >= sub.commands.size()) return std::nullopt;
    return c.label_place.at(sub.commands[pc + 1].label);
  };

  for (const auto& sub : p.subroutines)
    for (size_t pc = 0; pc < sub.commands.size(); ++pc) {
      const Command& cmd = sub.commands[pc];
      if (cmd.kind != Command::Kind::Gosub) continue;
      auto nxt = next_place(sub, pc);
      callers[cmd.callee].push_back(
          {c.callsite_place.at(cmd.label), nxt ? *nxt : -1});
    }

  for (const auto& sub : p.subroutines)
    for (size_t pc = 0; pc < sub.commands.size(); ++pc) {
      const Command& cmd = sub.commands[pc];
      int lp = c.label_place.at(cmd.label);
      auto emit = [&](Transition t) { c.net.add_transition(std::move(t)); };
      switch (cmd.kind) {
        case Command::Kind::Inc:
        case Command::Kind::Dec: {
          auto nxt = next_place(sub, pc);
          if (!nxt) break;  // no continuation: the control token is dead
          Transition t;
          t.name = cmd.label;
          t.in.add(lp);
          t.out.add(*nxt);
          if (cmd.kind == Command::Kind::Inc)
            t.out.add(c.counter_place.at(cmd.counter));
          else
            t.in.add(c.counter_place.at(cmd.counter));
          emit(std::move(t));
          break;
        }
        case Command::Kind::Goto:
        case Command::Kind::NondetGoto:
          for (size_t i = 0; i < cmd.targets.size(); ++i) {
            Transition t;
            t.name = cmd.targets.size() == 1
                         ? cmd.label
                         : cmd.label + "#" + std::to_string(i);
            t.in.add(lp);
            t.out.add(c.label_place.at(cmd.targets[i]));
            emit(std::move(t));
          }
          break;
        case Command::Kind::IfAllZeroGoto: {
          Transition t;
          t.name = cmd.label;
          t.in.add(lp);
          t.out.add(c.label_place.at(cmd.targets.front()));
          for (const auto& x : cmd.counters)
            t.zero.insert(c.counter_place.at(x));
          emit(std::move(t));
          break;
        }
        case Command::Kind::Gosub: {
          Transition t;
          t.name = cmd.label;
          t.in.add(lp);
          t.out.add(c.label_place.at(cmd.callee));  // callee entry command
          t.out.add(c.callsite_place.at(cmd.label));
          emit(std::move(t));
          break;
        }
        case Command::Kind::Return:
          for (const auto& [site, resume] : callers[sub.name]) {
            if (resume < 0) continue;
            Transition t;
            t.name = cmd.label + "@" + c.net.places.name(site);
            t.in.add(lp);
            t.in.add(site);
            t.out.add(resume);
            emit(std::move(t));
          }
          break;
        case Command::Kind::Halt: {
          Transition t;
          t.name = cmd.label;
          t.in.add(lp);
          t.out.add(c.halt_place);
          emit(std::move(t));
          break;
        }
      }
    }

  c.net.initial = Multiset();
  c.net.initial.add(c.label_place.at(p.entry));
  return c;
}

IndexFunction program_index_function(const NetProgram& p,
                                     const CompiledProgram& c,
                                     const Valuation& counter_level) {
  std::int64_t lmax = 0;
  for (const auto& [x, lvl] : counter_level) {
    if (!c.counter_place.count(x))
      throw Error("program_index_function: unknown counter " + x);
    lmax = std::max(lmax, lvl);
  }
  IndexFunction f(c.net.places.size(), lmax + 2);
  for (const auto& [x, lvl] : counter_level)
    f[static_cast<size_t>(c.counter_place.at(x))] = lvl;

  std::vector<WeakViolation> viol;
  if (!is_weak(c.net, f, &viol)) {
    const auto& v = viol.front();
    throw NotWeak("zero-test set not downward closed: place " +
                  c.net.places.name(v.place) + " untested alongside " +
                  c.net.places.name(v.other) + " at transition " +
                  c.net.transitions[static_cast<size_t>(v.transition)].name);
  }
  (void)p;
  return f;
}

}  // namespace ficfl
