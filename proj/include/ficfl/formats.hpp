#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ficfl/netprog.hpp"
#include "ficfl/oracle.hpp"

namespace ficfl {

// Net file: `place <name> [init=<n>]` then
// `trans <name> in {..} out {..} [zero {..}]`, comments with '#'.
// serialize o parse is the identity on serializer output.
std::string serialize_pn(const PetriNet& net);
PetriNet parse_pn(const std::string& text);

// Grammar file: `var <X>` / `term <a>` declarations (emitted for every
// symbol so productionless variables and unused terminals survive the
// round trip), optional `start <X>`, then `X -> Y Z | a | eps` lines.
struct CfgFile {
  Grammar grammar;
  std::optional<std::string> start;
};
std::string serialize_cfg(const Grammar& g,
                          std::optional<std::string> start = std::nullopt);
CfgFile parse_cfg(const std::string& text);

// Counter-program file: `counters x, y`, `entry main`, and per-subroutine
// blocks `sub <name> level <n>:` with one labelled command per line.
std::string serialize_np(const NetProgram& p);
NetProgram parse_np(const std::string& text);

// Instance bundle: textual references to a net file and a grammar file
// plus binding, index bound, and target marking.  Paths stay as written;
// assemble_instance ties the loaded pieces together.
struct InstFile {
  std::string net_path;
  std::string cfg_path;
  std::string start;
  std::vector<std::pair<std::string, std::string>> bind;  // terminal, transition
  std::optional<int> k;
  std::string final_literal;  // multiset literal over place names
};
std::string serialize_inst(const InstFile& f);
InstFile parse_inst(const std::string& text);
ProblemInstance assemble_instance(const InstFile& f, const PetriNet& net,
                                  const Grammar& grammar);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace ficfl
