#include "ficfl/reduce_fwd.hpp"

#include <functional>
#include <string>

#include "ficfl/traverse.hpp"

namespace ficfl {

namespace {

std::string lvl(const std::string& base, int j) {
  return base + std::to_string(j);
}

struct Builder {
  const ProblemInstance& inst;
  int kb;
  Grammar gk;
  NetProgram prog;
  int d;  // number of places

  Builder(const ProblemInstance& i, int kb_)
      : inst(i), kb(kb_), gk(annotate(i.grammar, kb_)),
        d(i.net.places.size()) {}

  std::string mi(int j, int p) const {
    return lvl("i", j) + "." + inst.net.places.name(p);
  }
  std::string mf(int j, int p) const {
    return lvl("f", j) + "." + inst.net.places.name(p);
  }
  std::string call(int var) const { return "n." + gk.variables.name(var); }

  static Command cmd(std::string label, Command::Kind kind) {
    Command c;
    c.label = std::move(label);
    c.kind = kind;
    return c;
  }
  static Command counter_op(std::string label, Command::Kind kind,
                            std::string x) {
    Command c = cmd(std::move(label), kind);
    c.counter = std::move(x);
    return c;
  }
  static Command jump(std::string label, std::string target) {
    Command c = cmd(std::move(label), Command::Kind::Goto);
    c.targets = {std::move(target)};
    return c;
  }

  // Both marking matrices at levels 0..hi, in level-major order.
  std::vector<std::string> matrix_counters(int hi) const {
    std::vector<std::string> xs;
    for (int j = 0; j <= hi; ++j)
      for (int p = 0; p < d; ++p) {
        xs.push_back(mi(j, p));
        xs.push_back(mf(j, p));
      }
    return xs;
  }

  // Nondeterministic per-place loop: entry picks exit or one place, each
  // place step runs two counter ops and loops back.
  Subroutine helper(const std::string& name, int level,
                    const std::function<std::pair<Command, Command>(
                        const std::string&, int)>& ops) const {
    Subroutine s;
    s.name = name;
    s.level = level;
    Command entry = cmd(name, Command::Kind::NondetGoto);
    entry.targets.push_back(name + ".x");
    for (int p = 0; p < d; ++p)
      entry.targets.push_back(name + ".s" + std::to_string(p));
    s.commands.push_back(std::move(entry));
    for (int p = 0; p < d; ++p) {
      std::string base = name + ".s" + std::to_string(p);
      auto [a, b] = ops(base, p);
      s.commands.push_back(std::move(a));
      s.commands.push_back(std::move(b));
      s.commands.push_back(jump(base + "c", name));
    }
    s.commands.push_back(cmd(name + ".x", Command::Kind::Return));
    return s;
  }

  NetProgram build(const Multiset& m, const Multiset& m_prime, int start_var) {
    // Declare every counter up front: matrices at all levels plus one call
    // counter per annotated variable.
    prog.counters = matrix_counters(kb);
    for (int v = 0; v < gk.variables.size(); ++v)
      prog.counters.push_back(call(v));
    prog.entry = "main";

    build_main(m, m_prime, start_var);
    for (int j = 0; j <= kb; ++j) build_level(j);
    return std::move(prog);
  }

  void build_main(const Multiset& m, const Multiset& m_prime, int start_var) {
    Subroutine s;
    s.name = "main";
    s.level = 0;
    int seq = 0;
    auto label = [&] {
      return seq++ == 0 ? std::string("main") : "m." + std::to_string(seq);
    };
    auto pump = [&](const Multiset& mm, bool final_side) {
      for (auto [p, n] : mm)
        for (std::int64_t i = 0; i < n; ++i)
          s.commands.push_back(counter_op(
              label(), Command::Kind::Inc,
              final_side ? mf(kb, p) : mi(kb, p)));
    };
    pump(m, false);
    pump(m_prime, true);
    s.commands.push_back(
        counter_op(label(), Command::Kind::Inc, call(start_var)));
    Command g = cmd(label(), Command::Kind::Gosub);
    g.callee = lvl("walk", kb);
    s.commands.push_back(std::move(g));
    Command test = cmd(label(), Command::Kind::IfAllZeroGoto);
    test.counters = matrix_counters(kb);
    test.targets = {"success"};
    s.commands.push_back(std::move(test));
    s.commands.push_back(cmd("success", Command::Kind::Halt));
    prog.subroutines.push_back(std::move(s));
  }

  void build_level(int j) {
    int walk_level = kb - j + 1;
    Subroutine s;
    s.name = lvl("walk", j);
    s.level = walk_level;
    std::string exit = s.name + ".x";

    bool used_cancel = false, used_case1 = false, used_case2 = false;
    std::vector<Command> handlers;
    Command entry = cmd(s.name, Command::Kind::NondetGoto);

    for (size_t pi = 0; pi < gk.productions.size(); ++pi) {
      const Production& pr = gk.productions[pi];
      int head_level = *parse_allowance(gk.variables.name(pr.head));
      if (head_level != j) continue;
      std::string base = "w" + std::to_string(j) + ".p" + std::to_string(pi);
      entry.targets.push_back(base);
      int seq = 0;
      auto label = [&] {
        return seq++ == 0 ? base : base + "." + std::to_string(seq);
      };
      if (pr.body.size() == 2) {
        int lb = *parse_allowance(gk.variables.name(pr.body[0].id));
        bool case1 = lb == j;  // X[j] -> B[j] C[j-1]; else X[j] -> B[j-1] C[j]
        (case1 ? used_case1 : used_case2) = true;
        handlers.push_back(
            counter_op(label(), Command::Kind::Dec, call(pr.head)));
        Command h1 = cmd(label(), Command::Kind::Gosub);
        h1.callee = case1 ? lvl("dropf", j) : lvl("dropi", j);
        handlers.push_back(std::move(h1));
        Command h2 = cmd(label(), Command::Kind::Gosub);
        h2.callee = case1 ? lvl("glue1", j) : lvl("glue2", j);
        handlers.push_back(std::move(h2));
        // The lower-level body variable runs first (as a sub-walk); the
        // level-j one continues as the tail call.
        int first = case1 ? pr.body[1].id : pr.body[0].id;
        int tail = case1 ? pr.body[0].id : pr.body[1].id;
        handlers.push_back(counter_op(label(), Command::Kind::Inc, call(first)));
        Command g = cmd(label(), Command::Kind::Gosub);
        g.callee = lvl("walk", j - 1);
        handlers.push_back(std::move(g));
        Command test = cmd(label(), Command::Kind::IfAllZeroGoto);
        test.counters = matrix_counters(j - 1);
        std::string cont = base + ".t";
        test.targets = {cont};
        handlers.push_back(std::move(test));
        handlers.push_back(counter_op(cont, Command::Kind::Inc, call(tail)));
        ++seq;
        handlers.push_back(jump(label(), s.name));
      } else {
        // Terminal or empty body: fire the bound transition (if any) on the
        // level-j initial matrix, then cancel matched initial/final pairs.
        used_cancel = true;
        handlers.push_back(
            counter_op(label(), Command::Kind::Dec, call(pr.head)));
        if (!pr.body.empty()) {
          int t = inst.binding.at(static_cast<size_t>(pr.body[0].id));
          const Transition& tr = inst.net.transitions[static_cast<size_t>(t)];
          for (auto [p, n] : tr.in)
            for (std::int64_t i = 0; i < n; ++i)
              handlers.push_back(
                  counter_op(label(), Command::Kind::Dec, mi(j, p)));
          for (auto [p, n] : tr.out)
            for (std::int64_t i = 0; i < n; ++i)
              handlers.push_back(
                  counter_op(label(), Command::Kind::Inc, mi(j, p)));
        }
        Command g = cmd(label(), Command::Kind::Gosub);
        g.callee = lvl("cancel", j);
        handlers.push_back(std::move(g));
        handlers.push_back(jump(label(), exit));
      }
    }

    if (entry.targets.empty()) {
      // No production has a head at this level: the walk can only give up.
      entry.kind = Command::Kind::Goto;
      entry.targets = {exit};
    }
    s.commands.push_back(std::move(entry));
    for (auto& c : handlers) s.commands.push_back(std::move(c));
    s.commands.push_back(cmd(exit, Command::Kind::Return));
    prog.subroutines.push_back(std::move(s));

    int helper_level = walk_level + 1;
    if (used_cancel)
      prog.subroutines.push_back(helper(
          lvl("cancel", j), helper_level,
          [&](const std::string& b, int p) {
            return std::pair{counter_op(b, Command::Kind::Dec, mi(j, p)),
                             counter_op(b + "b", Command::Kind::Dec, mf(j, p))};
          }));
    if (used_case1) {
      prog.subroutines.push_back(helper(
          lvl("dropf", j), helper_level,
          [&](const std::string& b, int p) {
            return std::pair{
                counter_op(b, Command::Kind::Dec, mf(j, p)),
                counter_op(b + "b", Command::Kind::Inc, mf(j - 1, p))};
          }));
      prog.subroutines.push_back(helper(
          lvl("glue1", j), helper_level,
          [&](const std::string& b, int p) {
            return std::pair{
                counter_op(b, Command::Kind::Inc, mi(j - 1, p)),
                counter_op(b + "b", Command::Kind::Inc, mf(j, p))};
          }));
    }
    if (used_case2) {
      prog.subroutines.push_back(helper(
          lvl("dropi", j), helper_level,
          [&](const std::string& b, int p) {
            return std::pair{
                counter_op(b, Command::Kind::Dec, mi(j, p)),
                counter_op(b + "b", Command::Kind::Inc, mi(j - 1, p))};
          }));
      prog.subroutines.push_back(helper(
          lvl("glue2", j), helper_level,
          [&](const std::string& b, int p) {
            return std::pair{
                counter_op(b, Command::Kind::Inc, mi(j, p)),
                counter_op(b + "b", Command::Kind::Inc, mf(j - 1, p))};
          }));
    }
  }
};

}  // namespace

NetProgram build_forward_program(const ProblemInstance& inst, int kb,
                                 const Multiset& m, const Multiset& m_prime) {
  inst.validate();
  if (!inst.grammar.restricted())
    throw NotRestricted("forward reduction needs a restricted grammar");
  if (kb < 0) throw Error("negative annotation bound");
  Builder b(inst, kb);
  int start = b.gk.variables.at(
      annotated_name(inst.grammar.variables.name(inst.start), kb));
  return b.build(m, m_prime, start);
}

ForwardArtifact build_forward_artifact(const ProblemInstance& inst, int kb,
                                       const Multiset& m,
                                       const Multiset& m_prime) {
  ForwardArtifact a;
  a.program = build_forward_program(inst, kb, m, m_prime);
  a.annotated = annotate(inst.grammar, kb);
  auto chk = check_program(a.program);
  if (!chk.ok())
    throw Error("forward program malformed: " + chk.issues.front().kind +
                ": " + chk.issues.front().detail);
  a.compiled = compile_program(a.program);
  for (int j = 0; j <= kb; ++j)
    for (int p = 0; p < inst.net.places.size(); ++p) {
      std::string pn = inst.net.places.name(p);
      a.counter_level["i" + std::to_string(j) + "." + pn] = j;
      a.counter_level["f" + std::to_string(j) + "." + pn] = j;
    }
  a.f = program_index_function(a.program, a.compiled, a.counter_level);
  a.target.add(a.compiled.halt_place);
  for (int v = 0; v < a.annotated.variables.size(); ++v)
    a.call_counter[a.annotated.variables.name(v)] =
        "n." + a.annotated.variables.name(v);
  return a;
}

ForwardDecision forward_decide(const ProblemInstance& inst,
                               const SearchBudget& budget) {
  inst.validate();
  if (!inst.k) throw Error("forward_decide needs an index bound");
  ForwardDecision out;
  if (*inst.k <= 0) {
    // No derivation has index 0, so the bounded language is empty.
    out.result.verdict = Verdict::ExhaustedNo;
    return out;
  }
  out.artifact = build_forward_artifact(inst, *inst.k - 1, inst.net.initial,
                                        inst.m_final);
  out.result =
      bounded_reach(out.artifact->compiled.net, out.artifact->target, budget);
  return out;
}

}  // namespace ficfl
