#include <chrono>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "ficfl/formats.hpp"
#include "ficfl/generators.hpp"
#include "ficfl/reduce_bwd.hpp"
#include "ficfl/reduce_fwd.hpp"
#include "ficfl/report.hpp"
#include "ficfl/traverse.hpp"
#include "json.hpp"

using namespace ficfl;

namespace {

struct Common {
  SearchBudget budget;
  bool json = false;
  std::uint64_t seed = 1;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_flag("--json", c.json, "emit a JSON run report");
  cmd->add_option("--seed", c.seed, "random seed");
  cmd->add_option("--budget-tokens", c.budget.token_cap,
                  "max token sum per marking");
  cmd->add_option("--budget-steps", c.budget.step_cap,
                  "max states explored");
  cmd->add_option("--budget-len", c.budget.len_cap,
                  "max enumerated word length");
}

std::string words_to_names(const Word& w,
                           const std::vector<Transition>& transitions) {
  std::ostringstream out;
  for (size_t i = 0; i < w.size(); ++i)
    out << (i ? " " : "")
        << transitions[static_cast<size_t>(w[i])].name;
  return out.str();
}

std::string terminals_to_names(const Word& w, const SymbolTable& terms) {
  std::ostringstream out;
  for (size_t i = 0; i < w.size(); ++i)
    out << (i ? " " : "") << terms.name(w[i]);
  return out.str();
}

Word names_to_transitions(const std::string& text, const PetriNet& net) {
  Word w;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    auto t = net.find_transition(tok);
    if (!t) throw Error("unknown transition " + tok);
    w.push_back(*t);
  }
  return w;
}

// Loads an .inst bundle, resolving referenced files next to it.
ProblemInstance load_instance(const std::string& path) {
  InstFile f = parse_inst(read_file(path));
  auto dir = std::filesystem::path(path).parent_path();
  PetriNet net = parse_pn(read_file((dir / f.net_path).string()));
  CfgFile cfg = parse_cfg(read_file((dir / f.cfg_path).string()));
  return assemble_instance(f, net, cfg.grammar);
}

IndexFunction load_levels(const std::string& path, const PetriNet& net) {
  auto j = nlohmann::json::parse(read_file(path));
  IndexFunction f(static_cast<size_t>(net.places.size()), 0);
  for (auto& [name, lvl] : j.items())
    f[static_cast<size_t>(net.places.at(name))] = lvl.get<std::int64_t>();
  return f;
}

int emit(const Common& c, RunReport r, const std::string& plain,
         std::chrono::steady_clock::time_point t0) {
  r.budget = c.budget;
  r.seed = c.seed;
  r.wall_ms = std::chrono::duration<double, std::milli>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
  if (c.json)
    std::cout << report_to_json(r) << "\n";
  else
    std::cout << plain << "\n";
  return (r.verdict == "budget-exceeded" || r.verdict == "BudgetExceeded")
             ? 2
             : 0;
}

// One differential trial for xcheck, returning the three verdicts.
struct TrialVerdicts {
  Verdict oracle, walk, forward;
};

TrialVerdicts run_trial(const ProblemInstance& inst,
                        const SearchBudget& budget) {
  TrialVerdicts v{};
  v.oracle = reach_along(inst, budget).verdict;
  Grammar gk = annotate(inst.grammar, *inst.k - 1);
  int x = gk.variables.at(annotated_name(
      inst.grammar.variables.name(inst.start), *inst.k - 1));
  SearchBudget wb = budget;
  wb.token_cap = inst.net.initial.total();
  v.walk = run_traverse(inst.net, gk, x, inst.net.initial, inst.m_final,
                        inst.binding, wb)
               .verdict;
  SearchBudget fb = budget;
  fb.token_cap = 16;
  v.forward = forward_decide(inst, fb).result.verdict;
  return v;
}

bool disagrees(const TrialVerdicts& v) {
  auto dec = [](Verdict a) { return a != Verdict::BudgetExceeded; };
  if (dec(v.oracle) && dec(v.walk) && v.oracle != v.walk) return true;
  if (dec(v.oracle) && dec(v.forward) && v.oracle != v.forward) return true;
  if (dec(v.walk) && dec(v.forward) && v.walk != v.forward) return true;
  return false;
}

// Greedy shrink: drop productions, then transitions, then initial tokens,
// keeping the instance well-formed and the disagreement alive.
ProblemInstance shrink(ProblemInstance inst, const SearchBudget& budget) {
  auto still_bad = [&](const ProblemInstance& cand) {
    try {
      return disagrees(run_trial(cand, budget));
    } catch (const Error&) {
      return false;
    }
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t p = 0; p < inst.grammar.productions.size(); ++p) {
      ProblemInstance cand = inst;
      cand.grammar.productions.erase(cand.grammar.productions.begin() +
                                     static_cast<long>(p));
      if (still_bad(cand)) {
        inst = std::move(cand);
        changed = true;
        break;
      }
    }
    if (changed) continue;
    for (auto [place, count] : inst.net.initial) {
      ProblemInstance cand = inst;
      cand.net.initial.add(place, -1);
      if (still_bad(cand)) {
        inst = std::move(cand);
        changed = true;
        break;
      }
    }
  }
  return inst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bounded analysis of nets, grammars, and counter programs"};
  app.require_subcommand(1);

  Common c;
  std::string net_path, cfg_path, np_path, inst_path, levels_path;
  std::string word_text, from_text, target_text, final_text, start_name;
  std::string out_path, emit_prog, emit_net, emit_cfg;
  int k_opt = -1;
  int trials = 20;
  bool decide_flag = false;
  bool exhaustive = false;

  auto* fire_cmd = app.add_subcommand("fire", "fire a transition word");
  fire_cmd->add_option("--net", net_path)->required();
  fire_cmd->add_option("--word", word_text)->required();
  fire_cmd->add_option("--from", from_text);
  add_common(fire_cmd, c);

  auto* reach_cmd = app.add_subcommand("reach", "bounded reachability search");
  reach_cmd->add_option("--net", net_path)->required();
  reach_cmd->add_option("--target", target_text)->required();
  add_common(reach_cmd, c);

  auto* enum_cmd = app.add_subcommand("enum", "bounded language enumeration");
  enum_cmd->add_option("--cfg", cfg_path)->required();
  enum_cmd->add_option("--start", start_name);
  enum_cmd->add_option("--k", k_opt);
  add_common(enum_cmd, c);

  auto* ann_cmd = app.add_subcommand("annotate", "allowance-annotated grammar");
  ann_cmd->add_option("--cfg", cfg_path)->required();
  ann_cmd->add_option("--k", k_opt)->required();
  ann_cmd->add_option("--out", out_path);
  add_common(ann_cmd, c);

  auto* idx_cmd = app.add_subcommand("index-check",
                                     "certify a word's derivation index");
  idx_cmd->add_option("--cfg", cfg_path)->required();
  idx_cmd->add_option("--start", start_name);
  idx_cmd->add_option("--word", word_text)->required();
  idx_cmd->add_option("--k", k_opt);
  add_common(idx_cmd, c);

  auto* weak_cmd = app.add_subcommand("weak-check",
                                      "zero-test level certificate");
  weak_cmd->add_option("--net", net_path)->required();
  weak_cmd->add_option("--levels", levels_path);
  add_common(weak_cmd, c);

  auto* npc_cmd = app.add_subcommand("np-check", "counter program checks");
  npc_cmd->add_option("--np", np_path)->required();
  add_common(npc_cmd, c);

  auto* npo_cmd = app.add_subcommand("np-compile", "compile to a net");
  npo_cmd->add_option("--np", np_path)->required();
  npo_cmd->add_option("--out", out_path);
  add_common(npo_cmd, c);

  auto* npr_cmd = app.add_subcommand("np-run", "interpret a counter program");
  npr_cmd->add_option("--np", np_path)->required();
  add_common(npr_cmd, c);

  auto* fwd_cmd = app.add_subcommand("reduce-fwd",
                                     "instance to counter program and net");
  fwd_cmd->add_option("--inst", inst_path)->required();
  fwd_cmd->add_option("--emit", emit_prog);
  fwd_cmd->add_option("--emit-net", emit_net);
  fwd_cmd->add_flag("--decide", decide_flag);
  add_common(fwd_cmd, c);

  auto* bwd_cmd = app.add_subcommand("reduce-bwd",
                                     "tested net to widget net and grammar");
  bwd_cmd->add_option("--net", net_path)->required();
  bwd_cmd->add_option("--f", levels_path)->required();
  bwd_cmd->add_option("--final", final_text);
  bwd_cmd->add_option("--emit-cfg", emit_cfg);
  bwd_cmd->add_option("--emit-net", emit_net);
  bwd_cmd->add_flag("--decide", decide_flag);
  bwd_cmd->add_flag("--exhaustive", exhaustive);
  add_common(bwd_cmd, c);

  auto* dec_cmd = app.add_subcommand("decide", "bounded language search");
  dec_cmd->add_option("--inst", inst_path)->required();
  dec_cmd->add_flag("--exhaustive", exhaustive);
  add_common(dec_cmd, c);

  auto* x_cmd = app.add_subcommand("xcheck", "differential testing harness");
  x_cmd->add_option("--trials", trials);
  add_common(x_cmd, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? 1 : 1;
  }

  auto t0 = std::chrono::steady_clock::now();
  try {
    if (*fire_cmd) {
      PetriNet net = parse_pn(read_file(net_path));
      Multiset from = from_text.empty()
                          ? net.initial
                          : parse_literal(from_text, net.places);
      Word w = names_to_transitions(word_text, net);
      auto end = fire_word(net, from, w);
      RunReport r;
      r.command = "fire";
      r.inputs["net"] = content_digest(serialize_pn(net));
      r.verdict = end ? "Fired" : "Disabled";
      if (end) r.witness = to_literal(*end, net.places);
      return emit(c, r, end ? to_literal(*end, net.places) : "disabled", t0);
    }
    if (*reach_cmd) {
      PetriNet net = parse_pn(read_file(net_path));
      Multiset target = parse_literal(target_text, net.places);
      auto res = bounded_reach(net, target, c.budget);
      RunReport r;
      r.command = "reach";
      r.inputs["net"] = content_digest(serialize_pn(net));
      r.verdict = verdict_name(res.verdict);
      std::string plain = r.verdict;
      if (res.witness) {
        r.witness = words_to_names(*res.witness, net.transitions);
        r.witness_length = static_cast<std::int64_t>(res.witness->size());
        plain += ": " + *r.witness;
      }
      return emit(c, r, plain, t0);
    }
    if (*enum_cmd) {
      CfgFile f = parse_cfg(read_file(cfg_path));
      std::string sn = !start_name.empty() ? start_name
                       : f.start            ? *f.start
                                            : f.grammar.variables.name(0);
      auto res = enum_language(
          f.grammar, f.grammar.variables.at(sn), c.budget.len_cap,
          k_opt >= 0 ? std::optional<int>(k_opt) : std::nullopt, c.budget);
      std::ostringstream plain;
      for (const Word& w : res.words)
        plain << "\"" << terminals_to_names(w, f.grammar.terminals) << "\"\n";
      plain << (res.complete ? "complete" : "partial") << ", "
            << res.words.size() << " words";
      RunReport r;
      r.command = "enum";
      r.inputs["cfg"] = content_digest(serialize_cfg(f.grammar, f.start));
      r.verdict = res.complete ? "Complete" : "BudgetExceeded";
      r.witness_length = static_cast<std::int64_t>(res.words.size());
      return emit(c, r, plain.str(), t0);
    }
    if (*ann_cmd) {
      CfgFile f = parse_cfg(read_file(cfg_path));
      Grammar gk = annotate(f.grammar, k_opt);
      std::optional<std::string> start;
      if (f.start) start = annotated_name(*f.start, k_opt);
      std::string text = serialize_cfg(gk, start);
      if (!out_path.empty()) write_file(out_path, text);
      RunReport r;
      r.command = "annotate";
      r.inputs["cfg"] = content_digest(serialize_cfg(f.grammar, f.start));
      r.verdict = "Done";
      return emit(c, r, out_path.empty() ? text : "wrote " + out_path, t0);
    }
    if (*idx_cmd) {
      CfgFile f = parse_cfg(read_file(cfg_path));
      std::string sn = !start_name.empty() ? start_name
                       : f.start            ? *f.start
                                            : f.grammar.variables.name(0);
      Word w;
      std::istringstream in(word_text);
      std::string tok;
      while (in >> tok) w.push_back(f.grammar.terminals.at(tok));
      RunReport r;
      r.command = "index-check";
      r.inputs["cfg"] = content_digest(serialize_cfg(f.grammar, f.start));
      try {
        Derivation d = derive_word(
            f.grammar, f.grammar.variables.at(sn), w,
            k_opt >= 0 ? std::optional<int>(k_opt) : std::nullopt, c.budget);
        int idx = check_derivation_index(f.grammar, d);
        r.verdict = "Derivable";
        r.witness = "index " + std::to_string(idx);
        return emit(c, r, "derivable at index " + std::to_string(idx), t0);
      } catch (const Error&) {
        r.verdict = "NotDerivable";
        return emit(c, r, "not derivable within bounds", t0);
      }
    }
    if (*weak_cmd) {
      PetriNet net = parse_pn(read_file(net_path));
      RunReport r;
      r.command = "weak-check";
      r.inputs["net"] = content_digest(serialize_pn(net));
      if (!levels_path.empty()) {
        IndexFunction f = load_levels(levels_path, net);
        bool ok = is_weak(net, f);
        r.verdict = ok ? "Weak" : "NotWeak";
        return emit(c, r, r.verdict, t0);
      }
      auto f = infer_index_function(net);
      r.verdict = f ? "Weak" : "NotWeak";
      std::ostringstream plain;
      plain << r.verdict;
      if (f) {
        nlohmann::json j;
        for (int p = 0; p < net.places.size(); ++p)
          j[net.places.name(p)] = (*f)[static_cast<size_t>(p)];
        plain << " " << j.dump();
        r.witness = j.dump();
      }
      return emit(c, r, plain.str(), t0);
    }
    if (*npc_cmd) {
      NetProgram p = parse_np(read_file(np_path));
      auto chk = check_program(p);
      RunReport r;
      r.command = "np-check";
      r.inputs["np"] = content_digest(serialize_np(p));
      r.verdict = chk.ok() ? "Ok" : "Malformed";
      std::ostringstream plain;
      if (chk.ok()) {
        plain << "ok, levels:";
        for (auto& [name, lvl] : chk.levels)
          plain << " " << name << "=" << lvl;
      } else {
        for (auto& issue : chk.issues)
          plain << issue.kind << ": " << issue.detail << "\n";
        plain << chk.issues.size() << " issue(s)";
      }
      return emit(c, r, plain.str(), t0);
    }
    if (*npo_cmd) {
      NetProgram p = parse_np(read_file(np_path));
      auto compiled = compile_program(p);
      std::string text = serialize_pn(compiled.net);
      if (!out_path.empty()) write_file(out_path, text);
      RunReport r;
      r.command = "np-compile";
      r.inputs["np"] = content_digest(serialize_np(p));
      r.verdict = "Done";
      return emit(c, r, out_path.empty() ? text : "wrote " + out_path, t0);
    }
    if (*npr_cmd) {
      NetProgram p = parse_np(read_file(np_path));
      auto res = run_program(p, c.budget);
      RunReport r;
      r.command = "np-run";
      r.inputs["np"] = content_digest(serialize_np(p));
      r.verdict = run_verdict_name(res.verdict);
      std::ostringstream plain;
      plain << r.verdict;
      for (const auto& v : res.halts) {
        plain << " {";
        bool first = true;
        for (auto& [x, n] : v) {
          plain << (first ? "" : ", ") << x << ":" << n;
          first = false;
        }
        plain << "}";
      }
      return emit(c, r, plain.str(), t0);
    }
    if (*fwd_cmd) {
      ProblemInstance inst = load_instance(inst_path);
      if (!inst.k) throw Error("instance lacks k");
      RunReport r;
      r.command = "reduce-fwd";
      r.inputs["inst"] = content_digest(read_file(inst_path));
      std::ostringstream plain;
      if (*inst.k > 0) {
        auto art = build_forward_artifact(inst, *inst.k - 1,
                                          inst.net.initial, inst.m_final);
        if (!emit_prog.empty()) {
          write_file(emit_prog, serialize_np(art.program));
          plain << "wrote " << emit_prog << "\n";
        }
        if (!emit_net.empty()) {
          write_file(emit_net, serialize_pn(art.compiled.net));
          plain << "wrote " << emit_net << "\n";
        }
      }
      if (decide_flag) {
        auto d = forward_decide(inst, c.budget);
        r.verdict = verdict_name(d.result.verdict);
        plain << r.verdict;
      } else {
        r.verdict = "Done";
        plain << "done";
      }
      return emit(c, r, plain.str(), t0);
    }
    if (*bwd_cmd) {
      PetriNet net = parse_pn(read_file(net_path));
      IndexFunction f = load_levels(levels_path, net);
      Multiset m_final =
          final_text.empty() ? Multiset() : parse_literal(final_text, net.places);
      NormalizedPNW np = normalize_pnw(net, f, m_final);
      RunReport r;
      r.command = "reduce-bwd";
      r.inputs["net"] = content_digest(serialize_pn(net));
      std::ostringstream plain;
      if (!emit_cfg.empty()) {
        TraceGrammar tg = build_trace_grammar(np);
        write_file(emit_cfg, serialize_cfg(
                                 tg.grammar,
                                 tg.grammar.variables.name(tg.start)));
        plain << "wrote " << emit_cfg << "\n";
      }
      if (!emit_net.empty()) {
        write_file(emit_net, serialize_pn(build_nprime(np).net));
        plain << "wrote " << emit_net << "\n";
      }
      if (decide_flag) {
        auto res = backward_decide(net, f, m_final, c.budget, exhaustive);
        r.verdict = verdict_name(res.verdict);
        plain << r.verdict;
      } else {
        r.verdict = "Done";
        plain << "done";
      }
      return emit(c, r, plain.str(), t0);
    }
    if (*dec_cmd) {
      ProblemInstance inst = load_instance(inst_path);
      auto res = reach_along(inst, c.budget, exhaustive);
      RunReport r;
      r.command = "decide";
      r.inputs["inst"] = content_digest(read_file(inst_path));
      r.verdict = verdict_name(res.verdict);
      std::string plain = r.verdict;
      if (res.witness) {
        r.witness = terminals_to_names(*res.witness, inst.grammar.terminals);
        r.witness_length = static_cast<std::int64_t>(res.witness->size());
        plain += ": " + *r.witness;
      }
      return emit(c, r, plain, t0);
    }
    if (*x_cmd) {
      std::mt19937 rng(static_cast<std::uint32_t>(c.seed));
      int disagreements = 0;
      std::ostringstream plain;
      for (int trial = 0; trial < trials; ++trial) {
        ProblemInstance inst;
        inst.net = random_conservative_net(rng, 3, 2, 2);
        inst.grammar = random_restricted_grammar(
            rng, 2, 5, static_cast<int>(inst.net.transitions.size()));
        for (int t = 0; t < inst.grammar.terminals.size(); ++t)
          inst.binding.push_back(t);
        std::uniform_int_distribution<int> kdist(1, 2);
        inst.k = kdist(rng);
        std::uniform_int_distribution<int> vdist(
            0, inst.grammar.variables.size() - 1);
        inst.start = vdist(rng);
        Multiset target = inst.net.initial;
        std::uniform_int_distribution<int> tdist(
            0, static_cast<int>(inst.net.transitions.size()) - 1);
        if (auto m = fire(inst.net, target, tdist(rng))) target = *m;
        inst.m_final = target;

        TrialVerdicts v = run_trial(inst, c.budget);
        if (disagrees(v)) {
          ++disagreements;
          ProblemInstance small = shrink(inst, c.budget);
          plain << "disagreement (trial " << trial << "): oracle="
                << verdict_name(v.oracle) << " walk="
                << verdict_name(v.walk) << " forward="
                << verdict_name(v.forward) << "\n";
          plain << "shrunk grammar:\n"
                << serialize_cfg(small.grammar,
                                 small.grammar.variables.name(small.start));
          plain << "shrunk net:\n" << serialize_pn(small.net);
          plain << "final " << to_literal(small.m_final, small.net.places)
                << "\n";
        }
      }
      plain << trials << " trials, " << disagreements << " disagreement(s)";
      RunReport r;
      r.command = "xcheck";
      r.verdict = disagreements == 0 ? "Agreed" : "Disagreement";
      r.witness_length = disagreements;
      return emit(c, r, plain.str(), t0);
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
