#include "ficfl/multiset.hpp"

#include <cctype>
#include <sstream>

namespace ficfl {

std::string to_literal(const Multiset& m, const SymbolTable& symbols) {
  std::ostringstream out;
  out << '{';
  bool first = true;
  for (auto& [s, n] : m) {
    if (!first) out << ", ";
    first = false;
    out << symbols.name(s) << ':' << n;
  }
  out << '}';
  return out.str();
}

namespace {

void skip_ws(const std::string& t, size_t& i) {
  while (i < t.size() && std::isspace(static_cast<unsigned char>(t[i]))) ++i;
}

std::string read_name(const std::string& t, size_t& i) {
  size_t start = i;
  while (i < t.size() &&
         (std::isalnum(static_cast<unsigned char>(t[i])) || t[i] == '_' ||
          t[i] == '.' || t[i] == '@' || t[i] == '[' || t[i] == ']'))
    ++i;
  return t.substr(start, i - start);
}

}  // namespace

Multiset parse_literal(const std::string& text, const SymbolTable& symbols) {
  Multiset m;
  size_t i = 0;
  skip_ws(text, i);
  if (i >= text.size() || text[i] != '{') throw Error("multiset literal must start with '{': " + text);
  ++i;
  skip_ws(text, i);
  while (i < text.size() && text[i] != '}') {
    std::string name = read_name(text, i);
    if (name.empty()) throw Error("bad multiset literal: " + text);
    std::int64_t count = 1;
    skip_ws(text, i);
    if (i < text.size() && text[i] == ':') {
      ++i;
      skip_ws(text, i);
      size_t start = i;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
      if (start == i) throw Error("missing count in multiset literal: " + text);
      count = std::stoll(text.substr(start, i - start));
    }
    m.add(symbols.at(name), count);
    skip_ws(text, i);
    if (i < text.size() && text[i] == ',') {
      ++i;
      skip_ws(text, i);
    }
  }
  if (i >= text.size() || text[i] != '}') throw Error("unterminated multiset literal: " + text);
  ++i;
  skip_ws(text, i);
  if (i != text.size()) throw Error("trailing input after multiset literal: " + text);
  return m;
}

}  // namespace ficfl
