#pragma once

#include <string>
#include <vector>

#include "odeinv/compare.hpp"

namespace odeinv {

struct ScalarEntry {
  std::string name;
  std::string value;
  std::string mode;  // "exact" or "numeric"
};

/// Full result of one CLI run; serializes to JSON deterministically.
struct RunReport {
  std::string verdict;
  std::vector<ScalarEntry> scalars_sd;
  std::vector<ScalarEntry> scalars_bgd;
  std::vector<IdentityReport> identities;
  long timing_ms = 0;

  bool all_passed() const {
    for (const auto& r : identities)
      if (!r.passed()) return false;
    return true;
  }
};

std::string report_to_json(const RunReport& r);
RunReport report_from_json(const std::string& text);
std::string report_to_text(const RunReport& r);

}  // namespace odeinv
