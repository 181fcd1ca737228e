#include "ficfl/report.hpp"

#include <cstdio>

#include "json.hpp"

namespace ficfl {

std::string content_digest(const std::string& content) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : content) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

std::string report_to_json(const RunReport& r) {
  nlohmann::json j;
  j["schema"] = 1;
  j["command"] = r.command;
  j["inputs"] = r.inputs;
  j["verdict"] = r.verdict;
  if (r.witness) {
    j["witness"] = *r.witness;
    j["witness_length"] = r.witness_length ? *r.witness_length : 0;
  }
  j["budget"] = {{"tokens", r.budget.token_cap},
                 {"steps", r.budget.step_cap},
                 {"len", r.budget.len_cap},
                 {"derivation_steps", r.budget.derivation_step_cap}};
  if (r.seed) j["seed"] = *r.seed;
  j["wall_ms"] = r.wall_ms;
  return j.dump(2);
}

}  // namespace ficfl
