#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <utility>

#include "rulefoil/domain.hpp"
#include "rulefoil/history.hpp"

namespace rulefoil {

// The determined fact: what the user actually observed.
struct HappenedEvent {
  enum class Variant { RuleFired, Error, Nothing };

  Variant variant{Variant::Nothing};
  std::optional<Rule> rule;  // set for RuleFired
  std::string error_code;    // set for Error
  std::string error_device;  // set for Error
  Instant at;                // meaningless for Nothing

  bool operator==(const HappenedEvent&) const = default;

  static HappenedEvent nothing() { return HappenedEvent{}; }

  static HappenedEvent fired(Rule rule, Instant at) {
    HappenedEvent h;
    h.variant = Variant::RuleFired;
    h.rule = std::move(rule);
    h.at = at;
    return h;
  }

  static HappenedEvent error(std::string code, std::string device,
                             Instant at) {
    HappenedEvent h;
    h.variant = Variant::Error;
    h.error_code = std::move(code);
    h.error_device = std::move(device);
    h.at = at;
    return h;
  }

  nlohmann::json to_json() const {
    switch (variant) {
      case Variant::RuleFired:
        return nlohmann::json{{"variant", "rule_fired"},
                              {"rule", rule->id},
                              {"at", at.to_string()}};
      case Variant::Error:
        return nlohmann::json{{"variant", "error"},
                              {"code", error_code},
                              {"device", error_device},
                              {"at", at.to_string()}};
      case Variant::Nothing:
        return nlohmann::json{{"variant", "nothing"}};
    }
    throw ContractError("unreachable happened-event variant");
  }
};

// The three shapes a confusing observation can take.
enum class ConfusingCase { CC1, CC2, CC3 };

inline std::string_view to_string(ConfusingCase c) {
  switch (c) {
    case ConfusingCase::CC1: return "CC1";
    case ConfusingCase::CC2: return "CC2";
    case ConfusingCase::CC3: return "CC3";
  }
  throw ContractError("unreachable confusing case");
}

// An unexpected action is CC1, a missing action is CC2, an error is CC3.
inline ConfusingCase classify(const HappenedEvent& h) {
  switch (h.variant) {
    case HappenedEvent::Variant::RuleFired: return ConfusingCase::CC1;
    case HappenedEvent::Variant::Nothing: return ConfusingCase::CC2;
    case HappenedEvent::Variant::Error: return ConfusingCase::CC3;
  }
  throw ContractError("unreachable happened-event variant");
}

// Determines the fact for a request: the most recent event involving the
// requested device within `recency` before the request, or the most
// recent firing of `about_rule` when the request pins one.
inline HappenedEvent determine_fact(const EventLog& log, const RuleSet& rules,
                                    const ExplanationRequest& req,
                                    std::chrono::milliseconds recency) {
  const TimeWindow window = TimeWindow::ending_at(req.at, recency);

  if (req.about_rule) {
    const Rule* rule = rules.find(*req.about_rule);
    if (!rule) {
      throw ValidationError("request pins unknown rule: '" + *req.about_rule +
                            "'");
    }
    std::optional<Instant> latest;
    for (const auto& e : log.events()) {
      if (!window.contains(e.ts)) continue;
      const auto* f = e.as_fired();
      if (f && f->rule_id == rule->id) latest = e.ts;
    }
    if (!latest) {
      throw ValidationError("rule '" + rule->id +
                            "' has not fired within the recency window");
    }
    return HappenedEvent::fired(*rule, *latest);
  }

  const auto event =
      log.last_event_for_device(rules, req.device, req.at, window);
  if (!event) return HappenedEvent::nothing();
  if (const auto* f = event->as_fired()) {
    return HappenedEvent::fired(rules.at(f->rule_id), event->ts);
  }
  const auto* e = event->as_error();
  return HappenedEvent::error(e->code, e->device, event->ts);
}

}  // namespace rulefoil
