#pragma once
// Machine-readable verification reports. Every check names the mathematical
// identity it certifies in `anchor` and carries a pass/fail/inapplicable status.
#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace qeuclid {

struct Check {
  std::string id, anchor, status, details;
  nlohmann::json extra = nlohmann::json::object();
};

struct Report {
  std::string suite;
  std::vector<Check> checks;

  void add(bool ok, const std::string& id, const std::string& anchor, const std::string& details,
           nlohmann::json extra = nlohmann::json::object()) {
    checks.push_back({id, anchor, ok ? "pass" : "fail", details, std::move(extra)});
  }
  void add_inapplicable(const std::string& id, const std::string& anchor, const std::string& reason) {
    Check c{id, anchor, "inapplicable", "", nlohmann::json::object()};
    c.extra["inapplicable_reason"] = reason;
    checks.push_back(std::move(c));
  }

  bool pass() const {
    for (const auto& c : checks)
      if (c.status == "fail") return false;
    return true;
  }
  std::string verdict() const { return pass() ? "pass" : "fail"; }

  nlohmann::json to_json() const {
    nlohmann::json out;
    out["suite"] = suite;
    out["checks"] = nlohmann::json::array();
    for (const auto& c : checks) {
      nlohmann::json j;
      j["check_id"] = c.id;
      j["anchor"] = c.anchor;
      j["status"] = c.status;
      if (!c.details.empty()) j["details"] = c.details;
      for (auto it = c.extra.begin(); it != c.extra.end(); ++it) j[it.key()] = it.value();
      out["checks"].push_back(std::move(j));
    }
    out["verdict"] = verdict();
    return out;
  }
};

}  // namespace qeuclid
