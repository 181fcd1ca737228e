#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ficfl/errors.hpp"

namespace ficfl {

// Interns names as dense small integers.  Ids are assigned in insertion
// order, which keeps serialization and search order stable.
class SymbolTable {
 public:
  int intern(const std::string& name) {
    auto it = ids_.find(name);
    if (it != ids_.end()) return it->second;
    int id = static_cast<int>(names_.size());
    names_.push_back(name);
    ids_.emplace(name, id);
    return id;
  }

  std::optional<int> find(const std::string& name) const {
    auto it = ids_.find(name);
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }

  int at(const std::string& name) const {
    auto id = find(name);
    if (!id) throw Error("unknown symbol: " + name);
    return *id;
  }

  const std::string& name(int id) const { return names_.at(static_cast<size_t>(id)); }

  int size() const { return static_cast<int>(names_.size()); }

  bool operator==(const SymbolTable& o) const { return names_ == o.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, int> ids_;
};

}  // namespace ficfl
