#include "ficfl/formats.hpp"

#include <fstream>
#include <sstream>

namespace ficfl {

namespace {

// Lines with comments stripped, paired with their 1-based numbers.
std::vector<std::pair<int, std::string>> logical_lines(
    const std::string& text) {
  std::vector<std::pair<int, std::string>> out;
  std::istringstream in(text);
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    size_t a = line.find_first_not_of(" \t\r");
    if (a == std::string::npos) continue;
    size_t b = line.find_last_not_of(" \t\r");
    out.emplace_back(no, line.substr(a, b - a + 1));
  }
  return out;
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

// The brace-delimited chunk starting at `from`; advances past it.
std::string take_braces(const std::string& s, size_t& from, int line) {
  size_t open = s.find('{', from);
  if (open == std::string::npos) throw ParseError("expected '{'", line);
  size_t close = s.find('}', open);
  if (close == std::string::npos) throw ParseError("unterminated '{'", line);
  from = close + 1;
  return s.substr(open, close - open + 1);
}

std::set<std::string> parse_name_set(const std::string& lit, int line) {
  std::set<std::string> out;
  std::string body = lit;
  if (body.size() < 2 || body.front() != '{' || body.back() != '}')
    throw ParseError("expected a {..} set", line);
  body = body.substr(1, body.size() - 2);
  std::istringstream in(body);
  std::string item;
  while (std::getline(in, item, ',')) {
    auto ws = split_ws(item);
    if (ws.size() != 1) throw ParseError("bad set element", line);
    out.insert(ws[0]);
  }
  return out;
}

}  // namespace

std::string serialize_pn(const PetriNet& net) {
  std::ostringstream out;
  for (int p = 0; p < net.places.size(); ++p) {
    out << "place " << net.places.name(p);
    if (net.initial.count(p) > 0) out << " init=" << net.initial.count(p);
    out << "\n";
  }
  for (const auto& t : net.transitions) {
    out << "trans " << t.name << " in " << to_literal(t.in, net.places)
        << " out " << to_literal(t.out, net.places);
    if (!t.zero.empty()) {
      out << " zero {";
      bool first = true;
      for (int p : t.zero) {
        if (!first) out << ", ";
        first = false;
        out << net.places.name(p);
      }
      out << "}";
    }
    out << "\n";
  }
  return out.str();
}

PetriNet parse_pn(const std::string& text) {
  PetriNet net;
  for (const auto& [no, line] : logical_lines(text)) {
    auto toks = split_ws(line);
    if (toks[0] == "place") {
      if (toks.size() < 2) throw ParseError("place needs a name", no);
      if (net.places.find(toks[1]))
        throw ParseError("duplicate place " + toks[1], no);
      std::int64_t init = 0;
      if (toks.size() >= 3) {
        if (toks[2].rfind("init=", 0) != 0)
          throw ParseError("expected init=<n>", no);
        try {
          init = std::stoll(toks[2].substr(5));
        } catch (...) {
          throw ParseError("bad init count", no);
        }
      }
      net.add_place(toks[1], init);
    } else if (toks[0] == "trans") {
      if (toks.size() < 2) throw ParseError("trans needs a name", no);
      Transition t;
      t.name = toks[1];
      size_t pos = line.find(toks[1]) + toks[1].size();
      auto expect_kw = [&](const std::string& kw) {
        size_t at = line.find(kw, pos);
        if (at == std::string::npos)
          throw ParseError("transition missing '" + kw + "'", no);
        pos = at + kw.size();
      };
      try {
        expect_kw(" in ");
        t.in = parse_literal(take_braces(line, pos, no), net.places);
        expect_kw(" out ");
        t.out = parse_literal(take_braces(line, pos, no), net.places);
        if (line.find(" zero ", pos) != std::string::npos) {
          pos = line.find(" zero ", pos) + 6;
          for (const auto& name :
               parse_name_set(take_braces(line, pos, no), no))
            t.zero.insert(net.places.at(name));
        }
      } catch (const ParseError&) {
        throw;
      } catch (const Error& e) {
        throw ParseError(e.what(), no);
      }
      net.add_transition(std::move(t));
    } else {
      throw ParseError("unknown directive '" + toks[0] + "'", no);
    }
  }
  return net;
}

std::string serialize_cfg(const Grammar& g, std::optional<std::string> start) {
  std::ostringstream out;
  for (int v = 0; v < g.variables.size(); ++v)
    out << "var " << g.variables.name(v) << "\n";
  for (int t = 0; t < g.terminals.size(); ++t)
    out << "term " << g.terminals.name(t) << "\n";
  if (start) out << "start " << *start << "\n";
  for (const auto& p : g.productions) {
    out << g.variables.name(p.head) << " ->";
    if (p.body.empty()) {
      out << " eps";
    } else {
      for (const auto& s : p.body)
        out << " "
            << (s.terminal ? g.terminals.name(s.id) : g.variables.name(s.id));
    }
    out << "\n";
  }
  return out.str();
}

CfgFile parse_cfg(const std::string& text) {
  CfgFile f;
  Grammar& g = f.grammar;
  for (const auto& [no, line] : logical_lines(text)) {
    auto toks = split_ws(line);
    if (toks[0] == "var" && toks.size() == 2) {
      g.variables.intern(toks[1]);
    } else if (toks[0] == "term" && toks.size() == 2) {
      if (g.variables.find(toks[1]))
        throw ParseError("symbol is already a variable: " + toks[1], no);
      g.terminals.intern(toks[1]);
    } else if (toks[0] == "start" && toks.size() == 2) {
      f.start = toks[1];
      g.variables.intern(toks[1]);
    } else {
      // Production line(s): H -> body [| body]...
      if (toks.size() < 2 || toks[1] != "->")
        throw ParseError("expected '<head> -> <body>'", no);
      int head = g.variables.find(toks[0])
                     ? *g.variables.find(toks[0])
                     : (g.terminals.find(toks[0])
                            ? throw ParseError(
                                  "head is a declared terminal: " + toks[0],
                                  no)
                            : g.variables.intern(toks[0]));
      std::vector<std::vector<GSym>> alts(1);
      bool saw_eps = false;
      for (size_t i = 2; i < toks.size(); ++i) {
        if (toks[i] == "|") {
          alts.emplace_back();
          continue;
        }
        if (toks[i] == "eps") {
          saw_eps = true;
          continue;
        }
        if (auto v = g.variables.find(toks[i]))
          alts.back().push_back({false, *v});
        else
          alts.back().push_back({true, g.terminals.intern(toks[i])});
      }
      if (saw_eps && alts.size() == 1 && !alts.back().empty())
        throw ParseError("eps mixed with symbols", no);
      for (auto& body : alts) g.add(head, std::move(body));
    }
  }
  if (f.start && !g.variables.find(*f.start))
    throw ParseError("unknown start variable", 0);
  return f;
}

std::string serialize_np(const NetProgram& p) {
  std::ostringstream out;
  out << "counters";
  for (size_t i = 0; i < p.counters.size(); ++i)
    out << (i ? ", " : " ") << p.counters[i];
  out << "\n";
  out << "entry " << p.entry << "\n";
  for (const auto& s : p.subroutines) {
    out << "sub " << s.name << " level " << s.level << ":\n";
    for (const auto& c : s.commands) {
      out << "  " << c.label << ": ";
      switch (c.kind) {
        case Command::Kind::Inc:
          out << c.counter << " := " << c.counter << " + 1";
          break;
        case Command::Kind::Dec:
          out << c.counter << " := " << c.counter << " - 1";
          break;
        case Command::Kind::Goto:
        case Command::Kind::NondetGoto:
          for (size_t i = 0; i < c.targets.size(); ++i)
            out << (i ? " or goto " : "goto ") << c.targets[i];
          break;
        case Command::Kind::IfAllZeroGoto:
          out << "if ";
          for (size_t i = 0; i < c.counters.size(); ++i)
            out << (i ? ", " : "") << c.counters[i];
          out << " = 0 then goto " << c.targets.front();
          break;
        case Command::Kind::Gosub:
          out << "gosub " << c.callee;
          break;
        case Command::Kind::Return:
          out << "return";
          break;
        case Command::Kind::Halt:
          out << "halt";
          break;
      }
      out << "\n";
    }
  }
  return out.str();
}

NetProgram parse_np(const std::string& text) {
  NetProgram p;
  Subroutine* cur = nullptr;
  std::set<std::string> labels_seen;
  for (const auto& [no, line] : logical_lines(text)) {
    auto toks = split_ws(line);
    if (toks[0] == "counters") {
      std::string rest = line.substr(std::string("counters").size());
      std::istringstream in(rest);
      std::string item;
      while (std::getline(in, item, ',')) {
        auto ws = split_ws(item);
        if (ws.size() != 1) throw ParseError("bad counter list", no);
        p.counters.push_back(ws[0]);
      }
      continue;
    }
    if (toks[0] == "entry" && toks.size() == 2) {
      p.entry = toks[1];
      continue;
    }
    if (toks[0] == "sub") {
      if (toks.size() != 4 || toks[2] != "level" || toks[3].empty() ||
          toks[3].back() != ':')
        throw ParseError("expected 'sub <name> level <n>:'", no);
      Subroutine s;
      s.name = toks[1];
      try {
        s.level = std::stoi(toks[3].substr(0, toks[3].size() - 1));
      } catch (...) {
        throw ParseError("bad level", no);
      }
      p.subroutines.push_back(std::move(s));
      cur = &p.subroutines.back();
      continue;
    }
    // Labelled command.
    if (!cur) throw ParseError("command outside a subroutine", no);
    if (toks[0].empty() || toks[0].back() != ':')
      throw ParseError("expected '<label>:'", no);
    Command c;
    c.label = toks[0].substr(0, toks[0].size() - 1);
    if (labels_seen.count(c.label))
      throw ParseError("duplicate label " + c.label, no);
    labels_seen.insert(c.label);
    std::vector<std::string> rest(toks.begin() + 1, toks.end());
    if (rest.empty()) throw ParseError("empty command", no);
    if (rest[0] == "halt" && rest.size() == 1) {
      c.kind = Command::Kind::Halt;
    } else if (rest[0] == "return" && rest.size() == 1) {
      c.kind = Command::Kind::Return;
    } else if (rest[0] == "gosub" && rest.size() == 2) {
      c.kind = Command::Kind::Gosub;
      c.callee = rest[1];
    } else if (rest[0] == "goto") {
      // goto l [or goto l2]...
      c.kind = Command::Kind::Goto;
      for (size_t i = 0; i < rest.size(); i += 3) {
        if (rest[i] != "goto" || i + 1 >= rest.size())
          throw ParseError("bad goto", no);
        c.targets.push_back(rest[i + 1]);
        if (i + 2 < rest.size() && rest[i + 2] != "or")
          throw ParseError("expected 'or'", no);
      }
      if (c.targets.size() > 1) c.kind = Command::Kind::NondetGoto;
    } else if (rest[0] == "if") {
      // if x, y = 0 then goto l
      c.kind = Command::Kind::IfAllZeroGoto;
      size_t eq = line.find(" = 0 then goto ");
      size_t ifat = line.find("if ");
      if (eq == std::string::npos || ifat == std::string::npos)
        throw ParseError("expected 'if <x,..> = 0 then goto <l>'", no);
      std::string vars = line.substr(ifat + 3, eq - (ifat + 3));
      std::istringstream in(vars);
      std::string item;
      while (std::getline(in, item, ',')) {
        auto ws = split_ws(item);
        if (ws.size() != 1) throw ParseError("bad test list", no);
        c.counters.push_back(ws[0]);
      }
      auto tgt = split_ws(line.substr(eq + std::string(" = 0 then goto ").size()));
      if (tgt.size() != 1) throw ParseError("bad test target", no);
      c.targets = {tgt[0]};
    } else if (rest.size() == 5 && rest[1] == ":=" && rest[0] == rest[2] &&
               rest[4] == "1" && (rest[3] == "+" || rest[3] == "-")) {
      c.kind = rest[3] == "+" ? Command::Kind::Inc : Command::Kind::Dec;
      c.counter = rest[0];
    } else {
      throw ParseError("unrecognized command", no);
    }
    cur->commands.push_back(std::move(c));
  }
  if (p.entry.empty() && !p.subroutines.empty())
    p.entry = p.subroutines.front().name;
  return p;
}

std::string serialize_inst(const InstFile& f) {
  std::ostringstream out;
  out << "net " << f.net_path << "\n";
  out << "grammar " << f.cfg_path << "\n";
  out << "start " << f.start << "\n";
  for (const auto& [term, trans] : f.bind)
    out << "bind " << term << " " << trans << "\n";
  if (f.k) out << "k " << *f.k << "\n";
  out << "final " << f.final_literal << "\n";
  return out.str();
}

InstFile parse_inst(const std::string& text) {
  InstFile f;
  for (const auto& [no, line] : logical_lines(text)) {
    auto toks = split_ws(line);
    if (toks[0] == "net" && toks.size() == 2) {
      f.net_path = toks[1];
    } else if (toks[0] == "grammar" && toks.size() == 2) {
      f.cfg_path = toks[1];
    } else if (toks[0] == "start" && toks.size() == 2) {
      f.start = toks[1];
    } else if (toks[0] == "bind" && toks.size() == 3) {
      f.bind.emplace_back(toks[1], toks[2]);
    } else if (toks[0] == "k" && toks.size() == 2) {
      try {
        f.k = std::stoi(toks[1]);
      } catch (...) {
        throw ParseError("bad k", no);
      }
    } else if (toks[0] == "final") {
      f.final_literal = line.substr(std::string("final ").size());
    } else {
      throw ParseError("unknown directive '" + toks[0] + "'", no);
    }
  }
  if (f.net_path.empty() || f.cfg_path.empty() || f.start.empty())
    throw ParseError("instance needs net, grammar, and start", 0);
  return f;
}

ProblemInstance assemble_instance(const InstFile& f, const PetriNet& net,
                                  const Grammar& grammar) {
  ProblemInstance inst;
  inst.net = net;
  inst.grammar = grammar;
  inst.start = grammar.variables.at(f.start);
  inst.k = f.k;
  inst.binding.assign(static_cast<size_t>(grammar.terminals.size()), -1);
  for (const auto& [term, trans] : f.bind) {
    int tid = grammar.terminals.at(term);
    auto tr = net.find_transition(trans);
    if (!tr) throw Error("binding names unknown transition " + trans);
    inst.binding[static_cast<size_t>(tid)] = *tr;
  }
  for (size_t i = 0; i < inst.binding.size(); ++i)
    if (inst.binding[i] < 0)
      throw UnboundTerminal("terminal " +
                            grammar.terminals.name(static_cast<int>(i)) +
                            " has no binding");
  if (!f.final_literal.empty())
    inst.m_final = parse_literal(f.final_literal, net.places);
  return inst;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << content;
}

}  // namespace ficfl
