#include "odeinv/report.hpp"

#include <sstream>

#include "json.hpp"

namespace odeinv {

namespace {

using Json = nlohmann::ordered_json;

CheckStatus status_from_name(const std::string& s) {
  if (s == "exact-zero") return CheckStatus::ExactZero;
  if (s == "numeric-zero") return CheckStatus::NumericZero;
  return CheckStatus::Failed;
}

Json scalars_to_json(const std::vector<ScalarEntry>& entries) {
  Json out = Json::object();
  for (const auto& e : entries)
    out[e.name] = Json{{"value", e.value}, {"mode", e.mode}};
  return out;
}

std::vector<ScalarEntry> scalars_from_json(const Json& j) {
  std::vector<ScalarEntry> out;
  for (auto it = j.begin(); it != j.end(); ++it)
    out.push_back({it.key(), it.value().at("value").get<std::string>(),
                   it.value().at("mode").get<std::string>()});
  return out;
}

}  // namespace

std::string report_to_json(const RunReport& r) {
  Json j;
  j["verdict"] = r.verdict;
  j["scalars_sd"] = scalars_to_json(r.scalars_sd);
  j["scalars_bgd"] = scalars_to_json(r.scalars_bgd);
  Json ids = Json::array();
  for (const auto& id : r.identities) {
    Json e;
    e["name"] = id.name;
    e["status"] = status_name(id.status);
    e["residual"] = id.residual;
    if (id.status == CheckStatus::NumericZero) e["tolerance"] = id.tolerance;
    ids.push_back(e);
  }
  j["identities"] = ids;
  j["timing_ms"] = r.timing_ms;
  return j.dump(2) + "\n";
}

RunReport report_from_json(const std::string& text) {
  Json j = Json::parse(text);
  RunReport r;
  r.verdict = j.at("verdict").get<std::string>();
  r.scalars_sd = scalars_from_json(j.at("scalars_sd"));
  r.scalars_bgd = scalars_from_json(j.at("scalars_bgd"));
  for (const auto& e : j.at("identities")) {
    IdentityReport id;
    id.name = e.at("name").get<std::string>();
    id.status = status_from_name(e.at("status").get<std::string>());
    id.residual = e.at("residual").get<std::string>();
    if (e.contains("tolerance")) id.tolerance = e.at("tolerance").get<double>();
    r.identities.push_back(id);
  }
  r.timing_ms = j.at("timing_ms").get<long>();
  return r;
}

std::string report_to_text(const RunReport& r) {
  std::ostringstream os;
  os << "verdict: " << r.verdict << "\n";
  auto dump_scalars = [&](const char* title,
                          const std::vector<ScalarEntry>& entries) {
    if (entries.empty()) return;
    os << title << ":\n";
    for (const auto& e : entries)
      os << "  " << e.name << " = " << e.value << "  [" << e.mode << "]\n";
  };
  dump_scalars("scalars (Sharipov-Dmitrieva)", r.scalars_sd);
  dump_scalars("scalars (Bagderina)", r.scalars_bgd);
  if (!r.identities.empty()) {
    os << "identities:\n";
    for (const auto& id : r.identities) {
      os << "  [" << (id.passed() ? "pass" : "FAIL") << "] " << id.name << " ("
         << status_name(id.status) << ")";
      if (!id.passed()) os << "  residual: " << id.residual;
      os << "\n";
    }
  }
  if (r.timing_ms > 0) os << "timing_ms: " << r.timing_ms << "\n";
  return os.str();
}

}  // namespace odeinv
