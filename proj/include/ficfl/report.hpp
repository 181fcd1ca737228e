#pragma once

#include <map>
#include <optional>
#include <string>

#include "ficfl/budget.hpp"

namespace ficfl {

// Machine-readable run summary.  Inputs are recorded as content digests so
// a report doubles as a cache key: identical digests + budgets must
// reproduce the verdict and witness length.
struct RunReport {
  std::string command;
  std::map<std::string, std::string> inputs;  // role -> content digest
  std::string verdict;
  std::optional<std::string> witness;     // rendered witness, if any
  std::optional<std::int64_t> witness_length;
  SearchBudget budget;
  std::optional<std::uint64_t> seed;
  double wall_ms = 0;
};

// FNV-1a 64-bit content hash, rendered as 16 hex digits.
std::string content_digest(const std::string& content);

// Versioned JSON rendering (schema field included), stable across runs.
std::string report_to_json(const RunReport& r);

}  // namespace ficfl
