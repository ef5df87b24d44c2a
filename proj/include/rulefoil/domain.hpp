#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "rulefoil/errors.hpp"
#include "rulefoil/time.hpp"

namespace rulefoil {

// ---------------------------------------------------------------------------
// Comparison operators
// ---------------------------------------------------------------------------

enum class CompareOp { Equals, NotEquals, Greater, Less, GreaterEq, LessEq };

// Logical complement: negating an atom swaps its operator.
inline CompareOp inverted(CompareOp op) {
  switch (op) {
    case CompareOp::Equals: return CompareOp::NotEquals;
    case CompareOp::NotEquals: return CompareOp::Equals;
    case CompareOp::Greater: return CompareOp::LessEq;
    case CompareOp::LessEq: return CompareOp::Greater;
    case CompareOp::Less: return CompareOp::GreaterEq;
    case CompareOp::GreaterEq: return CompareOp::Less;
  }
  throw ContractError("unreachable comparison operator");
}

inline std::string_view op_token(CompareOp op) {
  switch (op) {
    case CompareOp::Equals: return "eq";
    case CompareOp::NotEquals: return "ne";
    case CompareOp::Greater: return "gt";
    case CompareOp::Less: return "lt";
    case CompareOp::GreaterEq: return "ge";
    case CompareOp::LessEq: return "le";
  }
  throw ContractError("unreachable comparison operator");
}

inline std::string_view op_symbol(CompareOp op) {
  switch (op) {
    case CompareOp::Equals: return "=";
    case CompareOp::NotEquals: return "!=";
    case CompareOp::Greater: return ">";
    case CompareOp::Less: return "<";
    case CompareOp::GreaterEq: return ">=";
    case CompareOp::LessEq: return "<=";
  }
  throw ContractError("unreachable comparison operator");
}

// Wording used by the mechanical fallback phrase of the renderer.
inline std::string_view op_phrase(CompareOp op) {
  switch (op) {
    case CompareOp::Equals: return "is";
    case CompareOp::NotEquals: return "is not";
    case CompareOp::Greater: return "is greater than";
    case CompareOp::Less: return "is less than";
    case CompareOp::GreaterEq: return "is at least";
    case CompareOp::LessEq: return "is at most";
  }
  throw ContractError("unreachable comparison operator");
}

inline CompareOp op_from_token(std::string_view token) {
  if (token == "eq" || token == "==" || token == "=" || token == "equals") {
    return CompareOp::Equals;
  }
  if (token == "ne" || token == "!=" || token == "not-equals") {
    return CompareOp::NotEquals;
  }
  if (token == "gt" || token == ">" || token == "greater") {
    return CompareOp::Greater;
  }
  if (token == "lt" || token == "<" || token == "less") {
    return CompareOp::Less;
  }
  if (token == "ge" || token == ">=" || token == "greater-eq") {
    return CompareOp::GreaterEq;
  }
  if (token == "le" || token == "<=" || token == "less-eq") {
    return CompareOp::LessEq;
  }
  throw ValidationError("unknown comparison operator: '" + std::string(token) +
                        "'");
}

// ---------------------------------------------------------------------------
// Scalar literals
// ---------------------------------------------------------------------------

using ScalarValue = std::variant<bool, double, std::string>;

namespace detail {

inline std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return s;
}

inline std::optional<double> parse_number(std::string_view s) {
  if (s.empty()) return std::nullopt;
  double value = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return value;
}

// Shortest representation that parses back to the same double.
inline std::string format_number(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw ValidationError("unprintable number");
  return std::string(buf, ptr);
}

}  // namespace detail

inline std::string scalar_text(const ScalarValue& v) {
  if (const auto* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
  if (const auto* n = std::get_if<double>(&v)) return detail::format_number(*n);
  return std::get<std::string>(v);
}

inline ScalarValue scalar_from_json(const nlohmann::json& j) {
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  throw ValidationError("condition value must be a boolean, number or string");
}

inline nlohmann::json scalar_to_json(const ScalarValue& v) {
  if (const auto* b = std::get_if<bool>(&v)) return *b;
  if (const auto* n = std::get_if<double>(&v)) {
    // Integral values are emitted as JSON integers so files stay as
    // humans wrote them.
    if (std::floor(*n) == *n && std::abs(*n) < 9.0e15) {
      return static_cast<std::int64_t>(*n);
    }
    return *n;
  }
  return std::get<std::string>(v);
}

// ---------------------------------------------------------------------------
// Atomic conditions
// ---------------------------------------------------------------------------

// One binary statement about a device or sensor state.
struct AtomicCondition {
  std::string entity;
  CompareOp op{CompareOp::Equals};
  ScalarValue value{false};

  bool operator==(const AtomicCondition&) const = default;

  // Deterministic ordering key; also used by phrase lookup.
  std::string key() const {
    std::string k = entity;
    k += '\x1f';
    k += op_token(op);
    k += '\x1f';
    k += static_cast<char>('0' + value.index());
    k += scalar_text(value);
    return k;
  }

  bool operator<(const AtomicCondition& other) const {
    return key() < other.key();
  }

  std::string display() const {
    std::string s = entity;
    s += ' ';
    s += op_symbol(op);
    s += ' ';
    s += scalar_text(value);
    return s;
  }
};

// Canonical form: entity case-folded, numeric strings turned into
// normalized numbers, boolean words turned into booleans. Idempotent;
// makes set membership over conditions well-defined.
inline AtomicCondition canonicalize(const AtomicCondition& c) {
  AtomicCondition out;
  out.entity = detail::lower(c.entity);
  if (out.entity.empty()) {
    throw ValidationError("condition entity must be non-empty");
  }
  out.op = c.op;
  if (const auto* b = std::get_if<bool>(&c.value)) {
    out.value = *b;
  } else if (const auto* n = std::get_if<double>(&c.value)) {
    if (!std::isfinite(*n)) {
      throw ValidationError("condition value must be finite");
    }
    out.value = *n == 0.0 ? 0.0 : *n;  // normalizes -0.0
  } else {
    std::string s = detail::lower(std::get<std::string>(c.value));
    if (s.empty()) {
      throw ValidationError("condition value must be non-empty");
    }
    if (s == "true") {
      out.value = true;
    } else if (s == "false") {
      out.value = false;
    } else if (const auto num = detail::parse_number(s)) {
      if (!std::isfinite(*num)) {
        throw ValidationError("condition value must be finite");
      }
      out.value = *num == 0.0 ? 0.0 : *num;
    } else {
      out.value = std::move(s);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Condition trees
// ---------------------------------------------------------------------------

// Boolean combination of atomic conditions. AND/OR carry >= 2 children,
// NOT exactly one; Atom is a leaf.
struct ConditionTree {
  enum class Kind { Atom, And, Or, Not };

  Kind kind{Kind::Atom};
  AtomicCondition atom{};
  std::vector<ConditionTree> children;

  bool operator==(const ConditionTree&) const = default;

  static ConditionTree leaf(AtomicCondition a) {
    ConditionTree t;
    t.kind = Kind::Atom;
    t.atom = std::move(a);
    return t;
  }

  static ConditionTree all_of(std::vector<ConditionTree> children) {
    if (children.size() < 2) {
      throw ValidationError("an AND node needs at least two children");
    }
    ConditionTree t;
    t.kind = Kind::And;
    t.children = std::move(children);
    return t;
  }

  static ConditionTree any_of(std::vector<ConditionTree> children) {
    if (children.size() < 2) {
      throw ValidationError("an OR node needs at least two children");
    }
    ConditionTree t;
    t.kind = Kind::Or;
    t.children = std::move(children);
    return t;
  }

  static ConditionTree negation(ConditionTree child) {
    ConditionTree t;
    t.kind = Kind::Not;
    t.children.push_back(std::move(child));
    return t;
  }
};

inline constexpr std::size_t kMaxConditionDepth = 64;

// Structural check: arities, nesting depth, canonicalizable atoms.
// Returns problems instead of throwing so validators can report them all.
inline void collect_tree_issues(const ConditionTree& t,
                                std::vector<std::string>& out,
                                std::size_t depth = 0) {
  if (depth > kMaxConditionDepth) {
    out.push_back("condition tree exceeds maximum nesting depth");
    return;
  }
  switch (t.kind) {
    case ConditionTree::Kind::Atom:
      try {
        (void)canonicalize(t.atom);
      } catch (const ValidationError& e) {
        out.push_back(e.what());
      }
      break;
    case ConditionTree::Kind::And:
    case ConditionTree::Kind::Or:
      if (t.children.size() < 2) {
        out.push_back("AND/OR nodes need at least two children");
      }
      break;
    case ConditionTree::Kind::Not:
      if (t.children.size() != 1) {
        out.push_back("NOT nodes need exactly one child");
      }
      break;
  }
  for (const auto& child : t.children) {
    collect_tree_issues(child, out, depth + 1);
  }
}

inline void check_tree(const ConditionTree& t) {
  std::vector<std::string> issues;
  collect_tree_issues(t, issues);
  if (!issues.empty()) throw ValidationError(issues.front());
}

namespace detail {

inline ConditionTree to_negation_normal_form(const ConditionTree& t,
                                             bool negated, std::size_t depth) {
  if (depth > kMaxConditionDepth) {
    throw ValidationError("condition tree exceeds maximum nesting depth");
  }
  switch (t.kind) {
    case ConditionTree::Kind::Atom: {
      AtomicCondition a = canonicalize(t.atom);
      if (negated) a.op = inverted(a.op);
      return ConditionTree::leaf(std::move(a));
    }
    case ConditionTree::Kind::Not:
      if (t.children.size() != 1) {
        throw ValidationError("NOT nodes need exactly one child");
      }
      return to_negation_normal_form(t.children.front(), !negated, depth + 1);
    case ConditionTree::Kind::And:
    case ConditionTree::Kind::Or: {
      if (t.children.size() < 2) {
        throw ValidationError("AND/OR nodes need at least two children");
      }
      std::vector<ConditionTree> children;
      children.reserve(t.children.size());
      for (const auto& child : t.children) {
        children.push_back(to_negation_normal_form(child, negated, depth + 1));
      }
      const bool was_and = t.kind == ConditionTree::Kind::And;
      // De Morgan: negation swaps the connective.
      const bool is_and = negated ? !was_and : was_and;
      ConditionTree out;
      out.kind = is_and ? ConditionTree::Kind::And : ConditionTree::Kind::Or;
      out.children = std::move(children);
      return out;
    }
  }
  throw ContractError("unreachable condition node kind");
}

inline void collect_atoms(const ConditionTree& t,
                          std::set<AtomicCondition>& out) {
  if (t.kind == ConditionTree::Kind::Atom) {
    out.insert(t.atom);
    return;
  }
  for (const auto& child : t.children) collect_atoms(child, out);
}

}  // namespace detail

// NOT-free equivalent of t; atoms come out canonicalized.
inline ConditionTree negation_normal_form(const ConditionTree& t) {
  return detail::to_negation_normal_form(t, false, 0);
}

// The set of unique canonical atoms of a precondition. Negations are
// folded into the atoms' operators, so "door open" and "door not open"
// stay distinct; AND/OR structure is discarded.
inline std::set<AtomicCondition> flatten_conditions(const ConditionTree& t) {
  std::set<AtomicCondition> atoms;
  detail::collect_atoms(negation_normal_form(t), atoms);
  return atoms;
}

inline std::size_t leaf_count(const ConditionTree& t) {
  if (t.kind == ConditionTree::Kind::Atom) return 1;
  std::size_t n = 0;
  for (const auto& child : t.children) n += leaf_count(child);
  return n;
}

namespace detail {

inline ConditionTree tree_from_json_impl(const nlohmann::json& j,
                                         std::size_t depth) {
  if (depth > kMaxConditionDepth) {
    throw ValidationError("condition tree exceeds maximum nesting depth");
  }
  if (!j.is_object()) {
    throw ValidationError("a condition must be a JSON object");
  }
  const auto children_of = [&](const nlohmann::json& arr) {
    if (!arr.is_array()) {
      throw ValidationError("'and'/'or' expect an array of conditions");
    }
    std::vector<ConditionTree> children;
    children.reserve(arr.size());
    for (const auto& c : arr) {
      children.push_back(tree_from_json_impl(c, depth + 1));
    }
    return children;
  };
  if (j.contains("and")) {
    if (j.size() != 1) throw ValidationError("'and' must be the only key");
    ConditionTree t;
    t.kind = ConditionTree::Kind::And;
    t.children = children_of(j.at("and"));
    return t;
  }
  if (j.contains("or")) {
    if (j.size() != 1) throw ValidationError("'or' must be the only key");
    ConditionTree t;
    t.kind = ConditionTree::Kind::Or;
    t.children = children_of(j.at("or"));
    return t;
  }
  if (j.contains("not")) {
    if (j.size() != 1) throw ValidationError("'not' must be the only key");
    ConditionTree t;
    t.kind = ConditionTree::Kind::Not;
    t.children.push_back(tree_from_json_impl(j.at("not"), depth + 1));
    return t;
  }
  if (!j.contains("entity") || !j.contains("op") || !j.contains("value") ||
      j.size() != 3) {
    throw ValidationError(
        "a condition atom needs exactly the keys 'entity', 'op' and 'value'");
  }
  if (!j.at("entity").is_string() || !j.at("op").is_string()) {
    throw ValidationError("'entity' and 'op' must be strings");
  }
  AtomicCondition atom;
  atom.entity = j.at("entity").get<std::string>();
  atom.op = op_from_token(j.at("op").get<std::string>());
  atom.value = scalar_from_json(j.at("value"));
  return ConditionTree::leaf(canonicalize(atom));
}

}  // namespace detail

inline ConditionTree tree_from_json(const nlohmann::json& j) {
  return detail::tree_from_json_impl(j, 0);
}

inline nlohmann::json tree_to_json(const ConditionTree& t) {
  switch (t.kind) {
    case ConditionTree::Kind::Atom:
      return nlohmann::json{{"entity", t.atom.entity},
                            {"op", std::string(op_token(t.atom.op))},
                            {"value", scalar_to_json(t.atom.value)}};
    case ConditionTree::Kind::And:
    case ConditionTree::Kind::Or: {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& child : t.children) arr.push_back(tree_to_json(child));
      return nlohmann::json{
          {t.kind == ConditionTree::Kind::And ? "and" : "or", std::move(arr)}};
    }
    case ConditionTree::Kind::Not:
      return nlohmann::json{{"not", tree_to_json(t.children.front())}};
  }
  throw ContractError("unreachable condition node kind");
}

// ---------------------------------------------------------------------------
// Rules
// ---------------------------------------------------------------------------

// What a rule does to one device when it fires.
struct Action {
  std::string device;
  std::string state;
  std::string description;  // optional wording used in explanations

  bool operator==(const Action&) const = default;
};

// A named automation. The precondition is optional: a rule without one is
// triggered manually and contributes no conditions to similarity.
struct Rule {
  std::string id;
  std::string name;
  std::string owner;
  std::optional<ConditionTree> precondition;
  std::vector<Action> actions;
  bool enabled{true};

  bool operator==(const Rule&) const = default;

  bool targets(const std::string& device) const {
    return action_on(device) != nullptr;
  }

  const Action* action_on(const std::string& device) const {
    for (const auto& a : actions) {
      if (a.device == device) return &a;
    }
    return nullptr;
  }

  std::set<AtomicCondition> condition_set() const {
    if (!precondition) return {};
    return flatten_conditions(*precondition);
  }
};

// Rules indexed by id; rejects duplicates.
class RuleSet {
 public:
  RuleSet() = default;

  explicit RuleSet(std::vector<Rule> rules) : rules_(std::move(rules)) {
    for (std::size_t i = 0; i < rules_.size(); ++i) {
      const auto [it, inserted] = index_.emplace(rules_[i].id, i);
      if (!inserted) {
        throw ValidationError("duplicate rule id: '" + rules_[i].id + "'");
      }
    }
  }

  const std::vector<Rule>& rules() const { return rules_; }
  std::size_t size() const { return rules_.size(); }

  const Rule* find(const std::string& id) const {
    const auto it = index_.find(id);
    return it == index_.end() ? nullptr : &rules_[it->second];
  }

  const Rule& at(const std::string& id) const {
    if (const Rule* r = find(id)) return *r;
    throw IntegrityError("unknown rule id: '" + id + "'");
  }

 private:
  std::vector<Rule> rules_;
  std::map<std::string, std::size_t> index_;
};

// ---------------------------------------------------------------------------
// System events
// ---------------------------------------------------------------------------

struct RuleFiredEvent {
  std::string rule_id;
  bool operator==(const RuleFiredEvent&) const = default;
};

struct ErrorEvent {
  std::string code;
  std::string device;
  bool operator==(const ErrorEvent&) const = default;
};

struct ExplainedEvent {
  std::string rule_id;
  std::string user;
  std::string device;
  bool operator==(const ExplainedEvent&) const = default;
};

// One entry of the system history: a rule fired, an error occurred, or an
// explanation was delivered to a user.
struct SystemEvent {
  Instant ts;
  std::variant<RuleFiredEvent, ErrorEvent, ExplainedEvent> kind;

  bool operator==(const SystemEvent&) const = default;

  const RuleFiredEvent* as_fired() const {
    return std::get_if<RuleFiredEvent>(&kind);
  }
  const ErrorEvent* as_error() const { return std::get_if<ErrorEvent>(&kind); }
  const ExplainedEvent* as_explained() const {
    return std::get_if<ExplainedEvent>(&kind);
  }

  static SystemEvent fired(Instant ts, std::string rule_id) {
    return SystemEvent{ts, RuleFiredEvent{std::move(rule_id)}};
  }
  static SystemEvent error(Instant ts, std::string code, std::string device) {
    return SystemEvent{ts, ErrorEvent{std::move(code), std::move(device)}};
  }
  static SystemEvent explained(Instant ts, std::string rule_id,
                               std::string user, std::string device) {
    return SystemEvent{
        ts, ExplainedEvent{std::move(rule_id), std::move(user),
                           std::move(device)}};
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["ts"] = ts.to_string();
    if (const auto* f = as_fired()) {
      j["kind"] = "rule_fired";
      j["rule"] = f->rule_id;
    } else if (const auto* e = as_error()) {
      j["kind"] = "error";
      j["code"] = e->code;
      j["device"] = e->device;
    } else {
      const auto* x = as_explained();
      j["kind"] = "explained";
      j["rule"] = x->rule_id;
      j["user"] = x->user;
      j["device"] = x->device;
    }
    return j;
  }

  static SystemEvent from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("ts") || !j.contains("kind") ||
        !j.at("ts").is_string() || !j.at("kind").is_string()) {
      throw ValidationError("an event needs string fields 'ts' and 'kind'");
    }
    const auto require = [&](const char* field) -> std::string {
      if (!j.contains(field) || !j.at(field).is_string()) {
        throw ValidationError(std::string("event field '") + field +
                              "' must be a string");
      }
      return j.at(field).get<std::string>();
    };
    const auto check_size = [&](std::size_t expected) {
      if (j.size() != expected) {
        throw ValidationError("event carries unexpected fields");
      }
    };
    const Instant ts = Instant::parse(j.at("ts").get<std::string>());
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "rule_fired") {
      check_size(3);
      return fired(ts, require("rule"));
    }
    if (kind == "error") {
      check_size(4);
      return error(ts, require("code"), require("device"));
    }
    if (kind == "explained") {
      check_size(5);
      return explained(ts, require("rule"), require("user"),
                       require("device"));
    }
    throw ValidationError("unknown event kind: '" + kind + "'");
  }

  // Canonical NDJSON line (sorted keys, no whitespace).
  std::string to_line() const { return to_json().dump(); }

  static SystemEvent parse_line(std::string_view line) {
    return from_json(nlohmann::json::parse(line));
  }
};

// ---------------------------------------------------------------------------
// Explanation requests
// ---------------------------------------------------------------------------

// A user asking why a device is in a confusing state. `about_rule`
// optionally pins the fact to a specific rule's most recent firing
// instead of the latest device event.
struct ExplanationRequest {
  std::string user;
  std::string device;
  Instant at;
  std::optional<std::string> about_rule;

  bool operator==(const ExplanationRequest&) const = default;

  nlohmann::json to_json() const {
    nlohmann::json j{{"user", user}, {"device", device}, {"at", at.to_string()}};
    if (about_rule) j["about_rule"] = *about_rule;
    return j;
  }

  static ExplanationRequest from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ValidationError("a request must be an object");
    const auto require = [&](const char* field) -> std::string {
      if (!j.contains(field) || !j.at(field).is_string()) {
        throw ValidationError(std::string("request field '") + field +
                              "' must be a string");
      }
      return j.at(field).get<std::string>();
    };
    ExplanationRequest r;
    r.user = require("user");
    r.device = require("device");
    r.at = Instant::parse(require("at"));
    if (j.contains("about_rule")) {
      if (!j.at("about_rule").is_string()) {
        throw ValidationError("request field 'about_rule' must be a string");
      }
      r.about_rule = j.at("about_rule").get<std::string>();
    }
    return r;
  }
};

}  // namespace rulefoil
