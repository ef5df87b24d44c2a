#pragma once

#include <algorithm>
#include <chrono>
#include <string>
#include <utility>
#include <vector>

#include "rulefoil/scenario.hpp"

namespace rulefoil {

// The bundled office scenario: an LED status light at the meeting room
// door, six rules owned by Alice and Bob, and synthesized histories whose
// firing and explanation counts drive the expectation factors. Four
// variants differ only in who asks and in the events right before the
// request.
enum class OfficeTest { Test1, Test2, Test3, Test4 };

inline OfficeTest fixture_from_name(const std::string& name) {
  if (name == "test1") return OfficeTest::Test1;
  if (name == "test2") return OfficeTest::Test2;
  if (name == "test3") return OfficeTest::Test3;
  if (name == "test4") return OfficeTest::Test4;
  throw ValidationError("unknown fixture: '" + name +
                        "' (expected test1..test4)");
}

inline std::vector<std::string> fixture_names() {
  return {"test1", "test2", "test3", "test4"};
}

namespace office {

inline const std::string kLight = "meeting-room-status-light";
inline const std::string kAlice = "alice";
inline const std::string kBob = "bob";
inline const std::string kErrorCode = "incorrect-installation";

inline Instant request_time() {
  return Instant::parse("2026-03-02T17:00:00.000Z");
}

inline AtomicCondition occupancy(bool value) {
  return AtomicCondition{"meeting-room-occupancy", CompareOp::Equals, value};
}

inline AtomicCondition door_closed() {
  return AtomicCondition{"meeting-room-door-contact", CompareOp::Equals,
                         std::string("closed")};
}

inline std::vector<Rule> rules() {
  std::vector<Rule> out;

  Rule not_occupied;
  not_occupied.id = "meeting-room-not-occupied";
  not_occupied.name = "Meeting room not occupied";
  not_occupied.owner = kAlice;
  not_occupied.precondition = ConditionTree::all_of(
      {ConditionTree::leaf(occupancy(false)),
       ConditionTree::leaf(door_closed())});
  not_occupied.actions = {{kLight, "green", "the green light"}};
  out.push_back(std::move(not_occupied));

  Rule occupied;
  occupied.id = "meeting-room-occupied";
  occupied.name = "Meeting room occupied";
  occupied.owner = kAlice;
  occupied.precondition = ConditionTree::all_of(
      {ConditionTree::leaf(occupancy(true)),
       ConditionTree::leaf(door_closed())});
  occupied.actions = {{kLight, "orange", "the orange light"}};
  out.push_back(std::move(occupied));

  Rule rain;
  rain.id = "rain-at-lunch";
  rain.name = "Rain at lunch";
  rain.owner = kBob;
  rain.precondition = ConditionTree::all_of(
      {ConditionTree::leaf({"weather-forecast", CompareOp::Equals,
                            std::string("rain")}),
       ConditionTree::leaf(
           {"daypart", CompareOp::Equals, std::string("lunch")})});
  rain.actions = {{kLight, "blue", "the blue light"}};
  out.push_back(std::move(rain));

  Rule sun;
  sun.id = "sun-at-lunch";
  sun.name = "Sun at lunch";
  sun.owner = kBob;
  sun.precondition = ConditionTree::all_of(
      {ConditionTree::leaf({"weather-forecast", CompareOp::Equals,
                            std::string("sun")}),
       ConditionTree::leaf(
           {"daypart", CompareOp::Equals, std::string("lunch")})});
  sun.actions = {{kLight, "orange", "the orange light"}};
  out.push_back(std::move(sun));

  Rule danger;
  danger.id = "danger";
  danger.name = "Danger";
  danger.owner = kAlice;
  danger.precondition = ConditionTree::leaf(
      {"danger-detected", CompareOp::Equals, true});
  danger.actions = {{kLight, "orange", "the orange light"}};
  out.push_back(std::move(danger));

  Rule closing;
  closing.id = "closing-time";
  closing.name = "Closing time";
  closing.owner = kAlice;
  closing.precondition = ConditionTree::leaf(
      {"daypart", CompareOp::Equals, std::string("evening")});
  closing.actions = {{kLight, "off", "all lights off"}};
  out.push_back(std::move(closing));

  return out;
}

inline std::vector<PhraseEntry> phrases() {
  const auto entry = [](AtomicCondition atom, std::string text) {
    return PhraseEntry{canonicalize(atom), std::move(text)};
  };
  std::vector<PhraseEntry> out;
  out.push_back(entry(occupancy(true),
                      "the occupancy of the meeting room was detected"));
  out.push_back(entry({"meeting-room-occupancy", CompareOp::NotEquals, false},
                      "there was motion in the meeting room"));
  out.push_back(entry(occupancy(false), "the meeting room was not occupied"));
  out.push_back(entry({"meeting-room-occupancy", CompareOp::NotEquals, true},
                      "no motion was detected in the meeting room"));
  out.push_back(entry(door_closed(),
                      "the contact sensor for the meeting room door is "
                      "turned off"));
  out.push_back(entry({"meeting-room-door-contact", CompareOp::NotEquals,
                       std::string("closed")},
                      "the contact sensor for the meeting room was not "
                      "closed"));
  out.push_back(entry(
      {"weather-forecast", CompareOp::Equals, std::string("rain")},
      "rain was expected"));
  out.push_back(entry(
      {"weather-forecast", CompareOp::Equals, std::string("sun")},
      "sunny weather was expected"));
  out.push_back(entry({"daypart", CompareOp::Equals, std::string("lunch")},
                      "it was lunchtime"));
  out.push_back(entry({"daypart", CompareOp::Equals, std::string("evening")},
                      "it was evening"));
  out.push_back(entry({"danger-detected", CompareOp::Equals, true},
                      "a dangerous situation was detected"));
  return out;
}

// Synthesized 29-day history ending two days before the request, so no
// base event falls inside the fact-finder's recency horizon. The counts
// are what matters: they are the frequency and occurrence scores the
// decision matrices pick up.
inline std::vector<SystemEvent> base_history(Instant request_at) {
  using std::chrono::hours;
  using std::chrono::milliseconds;
  using std::chrono::minutes;

  const Instant start = request_at - hours(24) * 29;
  const milliseconds span =
      std::chrono::duration_cast<milliseconds>(hours(24) * 27);

  std::vector<SystemEvent> events;
  const auto spread_fired = [&](const std::string& rule_id, int count,
                                minutes phase) {
    const milliseconds step(span.count() / count);
    for (int i = 0; i < count; ++i) {
      const Instant ts = start + phase + milliseconds(step.count() * i);
      events.push_back(SystemEvent::fired(ts, rule_id));
    }
  };
  const auto spread_explained = [&](const std::string& rule_id,
                                    const std::string& user, int count,
                                    minutes phase) {
    const milliseconds step(span.count() / count);
    for (int i = 0; i < count; ++i) {
      const Instant ts = start + phase + milliseconds(step.count() * i);
      events.push_back(SystemEvent::explained(ts, rule_id, user, kLight));
    }
  };

  spread_fired("meeting-room-not-occupied", 65, minutes(3));
  spread_fired("meeting-room-occupied", 58, minutes(7));
  spread_fired("rain-at-lunch", 4, minutes(11));
  spread_fired("sun-at-lunch", 14, minutes(13));
  spread_fired("danger", 1, minutes(17));
  spread_fired("closing-time", 90, minutes(23));

  spread_explained("meeting-room-not-occupied", kAlice, 3, minutes(29));
  spread_explained("meeting-room-occupied", kAlice, 1, minutes(31));
  spread_explained("rain-at-lunch", kAlice, 4, minutes(37));
  spread_explained("rain-at-lunch", kBob, 4, minutes(41));

  std::stable_sort(events.begin(), events.end(),
                   [](const SystemEvent& a, const SystemEvent& b) {
                     return a.ts < b.ts;
                   });
  return events;
}

}  // namespace office

// Builds one of the four bundled scenarios, request included. Every
// fixture passes validation.
inline Scenario load_fixture(OfficeTest test) {
  using std::chrono::minutes;

  const Instant at = office::request_time();
  Scenario s;
  s.users = {{office::kAlice, "Alice"}, {office::kBob, "Bob"}};
  s.devices = {{office::kLight, "the meeting room status light"}};
  s.rules = office::rules();
  s.phrases = office::phrases();
  s.history = office::base_history(at);

  switch (test) {
    case OfficeTest::Test1:
      s.history.push_back(
          SystemEvent::fired(at - minutes(5), "meeting-room-occupied"));
      s.requests = {{office::kAlice, office::kLight, at, std::nullopt}};
      break;
    case OfficeTest::Test2:
      s.history.push_back(
          SystemEvent::fired(at - minutes(5), "meeting-room-occupied"));
      s.requests = {{office::kBob, office::kLight, at, std::nullopt}};
      break;
    case OfficeTest::Test3:
      s.history.push_back(
          SystemEvent::fired(at - minutes(10), "meeting-room-occupied"));
      s.history.push_back(SystemEvent::error(at - minutes(5),
                                             office::kErrorCode,
                                             office::kLight));
      s.requests = {{office::kBob, office::kLight, at, std::nullopt}};
      break;
    case OfficeTest::Test4:
      // Nothing touched the light within the recency horizon.
      s.requests = {{office::kAlice, office::kLight, at, std::nullopt}};
      break;
  }
  return s;
}

inline Scenario load_fixture(const std::string& name) {
  return load_fixture(fixture_from_name(name));
}

}  // namespace rulefoil
