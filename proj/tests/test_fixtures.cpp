#include <catch2/catch.hpp>

#include <fstream>
#include <sstream>

#include "rulefoil/fixtures.hpp"

using namespace rulefoil;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

TEST_CASE("every fixture validates cleanly") {
  for (const auto& name : fixture_names()) {
    const Scenario s = load_fixture(name);
    const auto report = validate_scenario(s);
    INFO(name);
    CHECK(report.ok());
    REQUIRE(s.requests.size() == 1);
  }
}

TEST_CASE("fixture lookup rejects unknown names") {
  CHECK_THROWS_AS(load_fixture("test5"), ValidationError);
  CHECK_THROWS_AS(fixture_from_name(""), ValidationError);
}

TEST_CASE("the embedded requests resolve to the documented fact shapes") {
  struct Expectation {
    OfficeTest test;
    std::string user;
    HappenedEvent::Variant variant;
  };
  const Expectation table[] = {
      {OfficeTest::Test1, "alice", HappenedEvent::Variant::RuleFired},
      {OfficeTest::Test2, "bob", HappenedEvent::Variant::RuleFired},
      {OfficeTest::Test3, "bob", HappenedEvent::Variant::Error},
      {OfficeTest::Test4, "alice", HappenedEvent::Variant::Nothing},
  };
  for (const auto& row : table) {
    const Scenario s = load_fixture(row.test);
    CHECK(s.requests.front().user == row.user);
    const EventLog log(s.history);
    const auto fact = determine_fact(log, s.rule_set(), s.requests.front(),
                                     std::chrono::minutes(60));
    CHECK(fact.variant == row.variant);
  }
}

TEST_CASE("the synthesized histories reproduce the published counts") {
  const Scenario s = load_fixture(OfficeTest::Test1);
  const EventLog log(s.history);
  const TimeWindow month = TimeWindow::ending_at(office::request_time(),
                                                 std::chrono::hours(24) * 30);

  CHECK(log.count_fired("meeting-room-not-occupied", month) == 65);
  CHECK(log.count_fired("rain-at-lunch", month) == 4);
  CHECK(log.count_fired("closing-time", month) == 90);

  CHECK(log.count_explained("meeting-room-not-occupied", "alice", month) == 3);
  CHECK(log.count_explained("rain-at-lunch", "alice", month) == 4);
  CHECK(log.count_explained("closing-time", "alice", month) == 0);
}

TEST_CASE("the rule table matches the scenario description") {
  const Scenario s = load_fixture(OfficeTest::Test1);
  const RuleSet rules = s.rule_set();
  CHECK(rules.size() == 6);
  CHECK(rules.at("meeting-room-not-occupied").owner == "alice");
  CHECK(rules.at("meeting-room-occupied").owner == "alice");
  CHECK(rules.at("rain-at-lunch").owner == "bob");
  CHECK(rules.at("sun-at-lunch").owner == "bob");
  CHECK(rules.at("danger").owner == "alice");
  CHECK(rules.at("closing-time").owner == "alice");

  // Every rule acts on the status light, per the light-focused scenario.
  for (const auto& rule : rules.rules()) {
    CHECK(rule.targets(office::kLight));
  }
  CHECK(rules.at("meeting-room-not-occupied").action_on(office::kLight)->state ==
        "green");
  CHECK(rules.at("meeting-room-occupied").action_on(office::kLight)->state ==
        "orange");
  CHECK(rules.at("rain-at-lunch").action_on(office::kLight)->state == "blue");
}

TEST_CASE("the shipped scenario files match the in-code fixtures") {
  const std::string data_dir = RULEFOIL_DATA_DIR;
  for (const auto& name : fixture_names()) {
    const std::string path = data_dir + "/office_" + name + ".json";
    INFO(path);
    CHECK(read_file(path) == dump_scenario(load_fixture(name)));
  }
}

TEST_CASE("the shipped matrix file carries the test case 1 scores") {
  const std::string path =
      std::string(RULEFOIL_DATA_DIR) + "/office_test1_matrix.json";
  const auto matrix =
      topsis::DecisionMatrix::from_json(nlohmann::json::parse(read_file(path)));
  REQUIRE(matrix.rows() == 3);
  CHECK(matrix.values[0][0] == 1.0 / 3.0);
  CHECK(matrix.values[2][2] == 90.0);
}
