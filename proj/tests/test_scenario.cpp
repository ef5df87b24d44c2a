#include <catch2/catch.hpp>

#include "rulefoil/fixtures.hpp"
#include "rulefoil/scenario.hpp"

using namespace rulefoil;

TEST_CASE("the office scenario dumps and reloads identically") {
  const Scenario s = load_fixture(OfficeTest::Test1);
  const std::string text = dump_scenario(s);
  const Scenario round = parse_scenario_text(text);
  CHECK(dump_scenario(round) == text);
  CHECK(round.rules == s.rules);
  CHECK(round.history == s.history);
  CHECK(round.requests == s.requests);
  CHECK(validate_scenario(round).ok());
}

TEST_CASE("parse errors carry line and column") {
  const std::string bad = "{\n  \"users\": [\n    {broken\n";
  try {
    parse_scenario_text(bad);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(e.column() > 1);
  }
}

TEST_CASE("top-level junk is rejected") {
  CHECK_THROWS_AS(parse_scenario_text("[1,2,3]"), ValidationError);
  CHECK_THROWS_AS(parse_scenario_text("{\"rules\": 4}"), ValidationError);
  CHECK_THROWS_AS(parse_scenario_text("{\"history\": {}}"), ValidationError);
}

TEST_CASE("validation flags dangling references") {
  Scenario s = load_fixture(OfficeTest::Test1);

  SECTION("event firing a deleted rule") {
    std::erase_if(s.rules, [](const Rule& r) { return r.id == "danger"; });
    Scenario trimmed = s;
    trimmed.history = {SystemEvent::fired(office::request_time(), "danger")};
    const auto report = validate_scenario(trimmed);
    REQUIRE(report.violations.size() == 1);
    CHECK(report.violations.front().find("danger") != std::string::npos);
  }

  SECTION("rule owned by an unknown user") {
    s.rules.front().owner = "mallory";
    CHECK_FALSE(validate_scenario(s).ok());
  }

  SECTION("rule acting on an unknown device") {
    s.rules.front().actions.front().device = "toaster";
    CHECK_FALSE(validate_scenario(s).ok());
  }

  SECTION("rule without actions") {
    s.rules.front().actions.clear();
    CHECK_FALSE(validate_scenario(s).ok());
  }

  SECTION("out-of-order history") {
    std::swap(s.history.front(), s.history.back());
    CHECK_FALSE(validate_scenario(s).ok());
  }

  SECTION("request naming unknown ids") {
    s.requests.front().user = "mallory";
    s.requests.front().about_rule = "no-such-rule";
    const auto report = validate_scenario(s);
    CHECK(report.violations.size() == 2);
  }

  SECTION("duplicate ids") {
    s.users.push_back(s.users.front());
    s.devices.push_back(s.devices.front());
    s.rules.push_back(s.rules.front());
    const auto report = validate_scenario(s);
    CHECK(report.violations.size() >= 3);
  }

  SECTION("explanation delivered to an unknown user") {
    s.history.push_back(SystemEvent::explained(
        office::request_time(), "danger", "mallory", office::kLight));
    CHECK_FALSE(validate_scenario(s).ok());
  }
}

TEST_CASE("malformed preconditions are reported, not thrown") {
  Scenario s = load_fixture(OfficeTest::Test1);
  ConditionTree broken;
  broken.kind = ConditionTree::Kind::And;  // zero children, built by hand
  s.rules.front().precondition = broken;
  const auto report = validate_scenario(s);
  CHECK_FALSE(report.ok());
}

TEST_CASE("scenarios accept both request and requests sections") {
  const Scenario base = load_fixture(OfficeTest::Test1);
  nlohmann::json j = scenario_to_json(base);
  const nlohmann::json single = j.at("request");
  j.erase("request");
  j["requests"] = nlohmann::json::array({single, single});
  const Scenario two = scenario_from_json(j);
  CHECK(two.requests.size() == 2);
}

TEST_CASE("a rule may omit its precondition") {
  const std::string text = R"({
    "users": [{"id": "alice"}],
    "devices": [{"id": "lamp"}],
    "rules": [{"id": "manual", "owner": "alice",
               "actions": [{"device": "lamp", "state": "on"}]}],
    "history": [],
    "request": {"user": "alice", "device": "lamp",
                "at": "2026-01-01T00:00:00Z"}
  })";
  const Scenario s = parse_scenario_text(text);
  CHECK(validate_scenario(s).ok());
  CHECK_FALSE(s.rules.front().precondition.has_value());
  CHECK(s.rules.front().enabled);
}
