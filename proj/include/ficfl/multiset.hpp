#pragma once

#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ficfl/errors.hpp"
#include "ficfl/symtab.hpp"

namespace ficfl {

// Finitely supported map from symbol ids to counts.  Canonical form: zero
// counts are never stored, so structural equality is semantic equality and
// multisets can be used directly as hash/map keys.
class Multiset {
 public:
  Multiset() = default;

  static Multiset of(std::initializer_list<int> symbols) {
    Multiset m;
    for (int s : symbols) m.add(s);
    return m;
  }

  std::int64_t count(int symbol) const {
    auto it = entries_.find(symbol);
    return it == entries_.end() ? 0 : it->second;
  }

  void set(int symbol, std::int64_t n) {
    if (n < 0) throw Error("negative multiset count");
    if (n == 0)
      entries_.erase(symbol);
    else
      entries_[symbol] = n;
  }

  void add(int symbol, std::int64_t n = 1) { set(symbol, count(symbol) + n); }

  std::int64_t total() const {
    std::int64_t t = 0;
    for (auto& [s, n] : entries_) t += n;
    return t;
  }

  bool empty() const { return entries_.empty(); }

  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  bool operator==(const Multiset&) const = default;
  bool operator<(const Multiset& o) const { return entries_ < o.entries_; }

  struct Hash {
    size_t operator()(const Multiset& m) const {
      size_t h = 1469598103934665603ull;
      for (auto& [s, n] : m.entries_) {
        h = (h ^ static_cast<size_t>(s)) * 1099511628211ull;
        h = (h ^ static_cast<size_t>(n)) * 1099511628211ull;
      }
      return h;
    }
  };

 private:
  std::map<int, std::int64_t> entries_;
};

inline Multiset msum(const Multiset& a, const Multiset& b) {
  Multiset r = a;
  for (auto& [s, n] : b) r.add(s, n);
  return r;
}

inline bool mleq(const Multiset& a, const Multiset& b) {
  for (auto& [s, n] : a)
    if (n > b.count(s)) return false;
  return true;
}

inline std::optional<Multiset> mdiff_opt(const Multiset& a, const Multiset& b) {
  if (!mleq(b, a)) return std::nullopt;
  Multiset r = a;
  for (auto& [s, n] : b) r.set(s, r.count(s) - n);
  return r;
}

inline Multiset mdiff(const Multiset& a, const Multiset& b) {
  auto r = mdiff_opt(a, b);
  if (!r) throw NotSubsumed("multiset difference undefined");
  return *r;
}

// Word over some alphabet of interned symbols.
using Word = std::vector<int>;

// Order-preserving subsequence keeping exactly the symbols in theta.
inline Word project(const Word& v, const std::set<int>& theta) {
  Word r;
  for (int s : v)
    if (theta.count(s)) r.push_back(s);
  return r;
}

// Text literal: {p:2, q:1}; {} is the empty multiset.
std::string to_literal(const Multiset& m, const SymbolTable& symbols);
Multiset parse_literal(const std::string& text, const SymbolTable& symbols);

}  // namespace ficfl
