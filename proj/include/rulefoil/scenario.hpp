#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rulefoil/domain.hpp"
#include "rulefoil/explain.hpp"

namespace rulefoil {

struct User {
  std::string id;
  std::string name;

  bool operator==(const User&) const = default;
};

struct Device {
  std::string id;
  std::string name;

  bool operator==(const Device&) const = default;
};

// Phrase entry of a scenario file: wording for one canonical condition.
struct PhraseEntry {
  AtomicCondition atom;
  std::string text;

  bool operator==(const PhraseEntry&) const = default;
};

// Everything one scenario file describes: the registries, the rules, the
// event history and the embedded explanation request(s).
struct Scenario {
  std::vector<User> users;
  std::vector<Device> devices;
  std::vector<Rule> rules;
  std::vector<PhraseEntry> phrases;
  std::vector<SystemEvent> history;
  std::vector<ExplanationRequest> requests;

  bool has_user(const std::string& id) const {
    for (const auto& u : users) {
      if (u.id == id) return true;
    }
    return false;
  }

  bool has_device(const std::string& id) const {
    for (const auto& d : devices) {
      if (d.id == id) return true;
    }
    return false;
  }

  RuleSet rule_set() const { return RuleSet(rules); }

  PhraseBook phrase_book() const {
    PhraseBook book;
    for (const auto& p : phrases) book.add(p.atom, p.text);
    return book;
  }

  std::map<std::string, std::string> device_names() const {
    std::map<std::string, std::string> names;
    for (const auto& d : devices) {
      names[d.id] = d.name.empty() ? d.id : d.name;
    }
    return names;
  }
};

// ---------------------------------------------------------------------------
// JSON encoding
// ---------------------------------------------------------------------------

namespace detail {

inline std::string require_string(const nlohmann::json& j, const char* field,
                                  const char* what) {
  if (!j.contains(field) || !j.at(field).is_string()) {
    throw ValidationError(std::string(what) + " needs a string field '" +
                          field + "'");
  }
  return j.at(field).get<std::string>();
}

inline std::string optional_string(const nlohmann::json& j,
                                   const char* field) {
  if (!j.contains(field)) return {};
  if (!j.at(field).is_string()) {
    throw ValidationError(std::string("field '") + field +
                          "' must be a string");
  }
  return j.at(field).get<std::string>();
}

}  // namespace detail

inline nlohmann::json rule_to_json(const Rule& r) {
  nlohmann::json j{{"id", r.id},
                   {"name", r.name},
                   {"owner", r.owner},
                   {"enabled", r.enabled}};
  if (r.precondition) j["precondition"] = tree_to_json(*r.precondition);
  nlohmann::json actions = nlohmann::json::array();
  for (const auto& a : r.actions) {
    nlohmann::json ja{{"device", a.device}, {"state", a.state}};
    if (!a.description.empty()) ja["description"] = a.description;
    actions.push_back(std::move(ja));
  }
  j["actions"] = std::move(actions);
  return j;
}

inline Rule rule_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("a rule must be an object");
  Rule r;
  r.id = detail::require_string(j, "id", "a rule");
  r.name = detail::optional_string(j, "name");
  r.owner = detail::require_string(j, "owner", "a rule");
  if (j.contains("enabled")) {
    if (!j.at("enabled").is_boolean()) {
      throw ValidationError("rule field 'enabled' must be a boolean");
    }
    r.enabled = j.at("enabled").get<bool>();
  }
  if (j.contains("precondition") && !j.at("precondition").is_null()) {
    r.precondition = tree_from_json(j.at("precondition"));
  }
  if (j.contains("actions")) {
    if (!j.at("actions").is_array()) {
      throw ValidationError("rule field 'actions' must be an array");
    }
    for (const auto& ja : j.at("actions")) {
      if (!ja.is_object()) throw ValidationError("an action must be an object");
      Action a;
      a.device = detail::require_string(ja, "device", "an action");
      a.state = detail::require_string(ja, "state", "an action");
      a.description = detail::optional_string(ja, "description");
      r.actions.push_back(std::move(a));
    }
  }
  return r;
}

inline Scenario scenario_from_json(const nlohmann::json& j) {
  if (!j.is_object()) {
    throw ValidationError("a scenario file must contain a JSON object");
  }
  Scenario s;
  const auto require_array = [&](const char* field) -> const nlohmann::json& {
    if (!j.at(field).is_array()) {
      throw ValidationError(std::string("'") + field + "' must be an array");
    }
    return j.at(field);
  };
  if (j.contains("users")) {
    for (const auto& ju : require_array("users")) {
      User u;
      u.id = detail::require_string(ju, "id", "a user");
      u.name = detail::optional_string(ju, "name");
      s.users.push_back(std::move(u));
    }
  }
  if (j.contains("devices")) {
    for (const auto& jd : require_array("devices")) {
      Device d;
      d.id = detail::require_string(jd, "id", "a device");
      d.name = detail::optional_string(jd, "name");
      s.devices.push_back(std::move(d));
    }
  }
  if (j.contains("rules")) {
    if (!j.at("rules").is_array()) {
      throw ValidationError("'rules' must be an array");
    }
    for (const auto& jr : j.at("rules")) s.rules.push_back(rule_from_json(jr));
  }
  if (j.contains("phrases")) {
    if (!j.at("phrases").is_array()) {
      throw ValidationError("'phrases' must be an array");
    }
    for (const auto& jp : j.at("phrases")) {
      PhraseEntry p;
      p.atom.entity = detail::require_string(jp, "entity", "a phrase");
      p.atom.op = op_from_token(detail::require_string(jp, "op", "a phrase"));
      if (!jp.contains("value")) {
        throw ValidationError("a phrase needs a 'value'");
      }
      p.atom.value = scalar_from_json(jp.at("value"));
      p.atom = canonicalize(p.atom);
      p.text = detail::require_string(jp, "text", "a phrase");
      s.phrases.push_back(std::move(p));
    }
  }
  if (j.contains("history")) {
    if (!j.at("history").is_array()) {
      throw ValidationError("'history' must be an array");
    }
    for (const auto& je : j.at("history")) {
      s.history.push_back(SystemEvent::from_json(je));
    }
  }
  if (j.contains("request")) {
    s.requests.push_back(ExplanationRequest::from_json(j.at("request")));
  }
  if (j.contains("requests")) {
    if (!j.at("requests").is_array()) {
      throw ValidationError("'requests' must be an array");
    }
    for (const auto& jr : j.at("requests")) {
      s.requests.push_back(ExplanationRequest::from_json(jr));
    }
  }
  return s;
}

inline nlohmann::json scenario_to_json(const Scenario& s) {
  nlohmann::json j;
  nlohmann::json users = nlohmann::json::array();
  for (const auto& u : s.users) {
    nlohmann::json ju{{"id", u.id}};
    if (!u.name.empty()) ju["name"] = u.name;
    users.push_back(std::move(ju));
  }
  j["users"] = std::move(users);

  nlohmann::json devices = nlohmann::json::array();
  for (const auto& d : s.devices) {
    nlohmann::json jd{{"id", d.id}};
    if (!d.name.empty()) jd["name"] = d.name;
    devices.push_back(std::move(jd));
  }
  j["devices"] = std::move(devices);

  nlohmann::json rules = nlohmann::json::array();
  for (const auto& r : s.rules) rules.push_back(rule_to_json(r));
  j["rules"] = std::move(rules);

  nlohmann::json phrases = nlohmann::json::array();
  for (const auto& p : s.phrases) {
    phrases.push_back(nlohmann::json{{"entity", p.atom.entity},
                                     {"op", std::string(op_token(p.atom.op))},
                                     {"value", scalar_to_json(p.atom.value)},
                                     {"text", p.text}});
  }
  j["phrases"] = std::move(phrases);

  nlohmann::json history = nlohmann::json::array();
  for (const auto& e : s.history) history.push_back(e.to_json());
  j["history"] = std::move(history);

  if (s.requests.size() == 1) {
    j["request"] = s.requests.front().to_json();
  } else if (!s.requests.empty()) {
    nlohmann::json requests = nlohmann::json::array();
    for (const auto& r : s.requests) requests.push_back(r.to_json());
    j["requests"] = std::move(requests);
  }
  return j;
}

inline std::string dump_scenario(const Scenario& s) {
  return scenario_to_json(s).dump(2) + "\n";
}

namespace detail {

inline std::pair<std::size_t, std::size_t> line_and_column(
    const std::string& text, std::size_t byte_offset) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < byte_offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

}  // namespace detail

inline Scenario parse_scenario_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, column] = detail::line_and_column(text, e.byte);
    throw ParseError(e.what(), line, column);
  }
  return scenario_from_json(j);
}

inline Scenario load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw StorageError("cannot read scenario file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario_text(buffer.str());
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct ValidationReport {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }

  nlohmann::json to_json() const {
    return nlohmann::json{{"ok", ok()}, {"violations", violations}};
  }
};

// Referential-integrity check of a loaded scenario: every id resolves,
// rules are well-formed, history timestamps are ordered. Returns the full
// list of violations instead of stopping at the first.
inline ValidationReport validate_scenario(const Scenario& s) {
  ValidationReport report;
  auto flag = [&report](std::string message) {
    report.violations.push_back(std::move(message));
  };

  std::set<std::string> user_ids;
  for (const auto& u : s.users) {
    if (u.id.empty()) flag("user with empty id");
    if (!user_ids.insert(u.id).second) flag("duplicate user id: " + u.id);
  }
  std::set<std::string> device_ids;
  for (const auto& d : s.devices) {
    if (d.id.empty()) flag("device with empty id");
    if (!device_ids.insert(d.id).second) flag("duplicate device id: " + d.id);
  }

  std::set<std::string> rule_ids;
  for (const auto& r : s.rules) {
    if (r.id.empty()) flag("rule with empty id");
    if (!rule_ids.insert(r.id).second) flag("duplicate rule id: " + r.id);
    if (!user_ids.count(r.owner)) {
      flag("rule '" + r.id + "' is owned by unknown user '" + r.owner + "'");
    }
    if (r.actions.empty()) flag("rule '" + r.id + "' has no actions");
    for (const auto& a : r.actions) {
      if (a.device.empty() || a.state.empty()) {
        flag("rule '" + r.id + "' has an action with empty device or state");
      } else if (!device_ids.count(a.device)) {
        flag("rule '" + r.id + "' acts on unknown device '" + a.device + "'");
      }
    }
    if (r.precondition) {
      std::vector<std::string> issues;
      collect_tree_issues(*r.precondition, issues);
      for (auto& issue : issues) {
        flag("rule '" + r.id + "': " + issue);
      }
    }
  }

  std::optional<Instant> previous;
  std::size_t index = 0;
  for (const auto& e : s.history) {
    const std::string where = "history[" + std::to_string(index) + "]";
    if (previous && e.ts < *previous) {
      flag(where + " is older than its predecessor");
    }
    previous = e.ts;
    if (const auto* f = e.as_fired()) {
      if (!rule_ids.count(f->rule_id)) {
        flag(where + " fires unknown rule '" + f->rule_id + "'");
      }
    } else if (const auto* err = e.as_error()) {
      if (!device_ids.count(err->device)) {
        flag(where + " reports an error on unknown device '" + err->device +
             "'");
      }
    } else if (const auto* x = e.as_explained()) {
      if (!rule_ids.count(x->rule_id)) {
        flag(where + " explains unknown rule '" + x->rule_id + "'");
      }
      if (!user_ids.count(x->user)) {
        flag(where + " was delivered to unknown user '" + x->user + "'");
      }
      if (!device_ids.count(x->device)) {
        flag(where + " concerns unknown device '" + x->device + "'");
      }
    }
    ++index;
  }

  index = 0;
  for (const auto& r : s.requests) {
    const std::string where = "request[" + std::to_string(index) + "]";
    if (!user_ids.count(r.user)) {
      flag(where + " names unknown user '" + r.user + "'");
    }
    if (!device_ids.count(r.device)) {
      flag(where + " names unknown device '" + r.device + "'");
    }
    if (r.about_rule && !rule_ids.count(*r.about_rule)) {
      flag(where + " pins unknown rule '" + *r.about_rule + "'");
    }
    ++index;
  }
  return report;
}

inline ValidationReport validate_scenario_file(
    const std::filesystem::path& path) {
  return validate_scenario(load_scenario_file(path));
}

}  // namespace rulefoil
