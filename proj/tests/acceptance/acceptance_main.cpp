// Acceptance suite: runs every acceptance criterion at its stated
// tolerance and prints one PASS/FAIL line per criterion. Exits non-zero
// if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rulefoil/rulefoil.hpp"
#include "../support/generators.hpp"

using namespace rulefoil;

namespace {

int g_failures = 0;

void report(int number, const std::string& name, bool ok,
            const std::string& detail = "") {
  std::printf("[%s] criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", number,
              name.c_str(), detail.empty() ? "" : " -- ",
              detail.c_str());
  if (!ok) ++g_failures;
}

bool near(double actual, double expected, double tolerance) {
  return std::abs(actual - expected) <= tolerance;
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

std::string data_path(const std::string& file) {
  return std::string(RULEFOIL_DATA_DIR) + "/" + file;
}

// ---------------------------------------------------------------------------
// 1. Quantitative ranking reproduction
// ---------------------------------------------------------------------------

void criterion_1() {
  topsis::DecisionMatrix matrix;
  matrix.alternatives = {"Meeting room not occupied", "Rain at lunch",
                         "Closing time"};
  matrix.criteria = {"similarity", "ownership", "frequency", "occurrence"};
  matrix.values = {{1.0 / 3.0, 1, 65, 3}, {0, 0, 4, 4}, {0, 1, 90, 0}};
  const auto weights = topsis::Weights::uniform(4);

  const double tol = 1e-3;
  const std::vector<double> expected_best{0.075, 0.362, 0.320};
  const std::vector<double> expected_worst{0.368, 0.200, 0.262};
  const std::vector<double> expected_closeness{0.830, 0.356, 0.450};

  const auto result = topsis::rank(matrix, weights);
  bool ok = matrix.alternatives[result.winner] == "Meeting room not occupied";
  for (std::size_t i = 0; i < 3; ++i) {
    ok = ok && near(result.d_best[i], expected_best[i], tol);
    ok = ok && near(result.d_worst[i], expected_worst[i], tol);
    ok = ok && near(result.closeness[i], expected_closeness[i], tol);
  }

  // Best of 20 runs, to keep scheduler noise out of the timing.
  double best_us = 1e9;
  for (int i = 0; i < 20; ++i) {
    const auto start = std::chrono::steady_clock::now();
    const auto timed = topsis::rank(matrix, weights);
    const auto stop = std::chrono::steady_clock::now();
    (void)timed;
    const double us =
        std::chrono::duration<double, std::micro>(stop - start).count();
    best_us = std::min(best_us, us);
  }
  ok = ok && best_us < 1000.0;

  std::ostringstream detail;
  detail << "closeness [" << result.closeness[0] << ", "
         << result.closeness[1] << ", " << result.closeness[2] << "], "
         << best_us << " us";
  report(1, "published ranking reproduced within 0.001", ok, detail.str());
}

// ---------------------------------------------------------------------------
// 2. Jaccard worked example
// ---------------------------------------------------------------------------

void criterion_2() {
  Rule fan;
  fan.id = "fan-on";
  fan.owner = "alice";
  fan.precondition = ConditionTree::all_of(
      {ConditionTree::leaf({"room-temperature", CompareOp::Greater, 25.0}),
       ConditionTree::leaf({"room-occupied", CompareOp::Equals, true})});
  fan.actions = {{"fan", "on", ""}};

  Rule ac;
  ac.id = "ac-on";
  ac.owner = "alice";
  ac.precondition = ConditionTree::all_of(
      {ConditionTree::leaf({"room-temperature", CompareOp::Greater, 25.0}),
       ConditionTree::leaf({"season", CompareOp::Equals,
                            std::string("summer")}),
       ConditionTree::leaf({"room-occupied", CompareOp::Equals, true})});
  ac.actions = {{"ac", "on", ""}};

  const double s = precondition_similarity(fan, ac);
  const bool ok = std::abs(s - 2.0 / 3.0) <= 1e-12;
  std::ostringstream detail;
  detail.precision(17);
  detail << "similarity " << s;
  report(2, "two-of-three condition overlap scores exactly 2/3", ok,
         detail.str());
}

// ---------------------------------------------------------------------------
// 3. End-to-end test cases
// ---------------------------------------------------------------------------

struct FixtureExpectation {
  std::string file;
  std::string foil;
  ConfusingCase cc;
  std::vector<std::string> fill_needles;
};

void criterion_3() {
  const std::vector<FixtureExpectation> table = {
      {"office_test1.json",
       "meeting-room-not-occupied",
       ConfusingCase::CC1,
       {"the orange light", " occurred instead of ", "the green light",
        " because "}},
      {"office_test2.json",
       "rain-at-lunch",
       ConfusingCase::CC1,
       {"the orange light", " occurred instead of ", "the blue light",
        " because "}},
      {"office_test3.json",
       "meeting-room-occupied",
       ConfusingCase::CC3,
       {"the orange light", " did not occur because error ",
        "incorrect installation", " occurred"}},
      {"office_test4.json",
       "meeting-room-not-occupied",
       ConfusingCase::CC2,
       {"the green light", " did not occur because "}},
  };

  bool ok = true;
  std::string problem;
  const auto start = std::chrono::steady_clock::now();
  for (const auto& expected : table) {
    const Scenario scenario = load_scenario_file(data_path(expected.file));
    Engine engine(scenario, EngineConfig{});
    bool fixture_ok = true;
    for (const auto& request : scenario.requests) {
      const auto outcome = engine.explain(request);
      fixture_ok = fixture_ok && outcome.ok();
      if (!outcome.ok()) break;
      const auto& e = *outcome.explanation;
      fixture_ok = fixture_ok && e.foil.id == expected.foil;
      fixture_ok = fixture_ok && e.cc == expected.cc;
      for (const auto& needle : expected.fill_needles) {
        fixture_ok = fixture_ok && contains(e.pattern_fill, needle);
      }
      if (expected.cc == ConfusingCase::CC3) {
        fixture_ok = fixture_ok && !e.matrix.has_value() &&
                     !outcome.trace.matrix.has_value();
      } else {
        fixture_ok = fixture_ok && e.matrix.has_value();
      }
    }
    if (!fixture_ok && problem.empty()) problem = expected.file;
    ok = ok && fixture_ok;
  }
  const auto stop = std::chrono::steady_clock::now();
  const double ms =
      std::chrono::duration<double, std::milli>(stop - start).count();
  ok = ok && ms < 1000.0;

  std::ostringstream detail;
  detail << ms << " ms for all four";
  if (!problem.empty()) detail << ", first failing fixture: " << problem;
  report(3, "all four bundled test cases select the documented foil", ok,
         detail.str());
}

// ---------------------------------------------------------------------------
// 4. CC2 negation structure
// ---------------------------------------------------------------------------

void criterion_4() {
  const Scenario scenario = load_scenario_file(data_path("office_test4.json"));
  Engine engine(scenario, EngineConfig{});
  const auto outcome = engine.explain(scenario.requests.front());
  bool ok = outcome.ok();
  std::string fill;
  if (ok) {
    fill = outcome.explanation->pattern_fill;
    const Rule& foil = outcome.explanation->foil;

    // Structure: the negated precondition is a disjunction of inverted
    // atoms.
    const ConditionTree negated = negate(*foil.precondition);
    ok = ok && negated.kind == ConditionTree::Kind::Or;
    for (const auto& child : negated.children) {
      ok = ok && child.kind == ConditionTree::Kind::Atom &&
           child.atom.op == CompareOp::NotEquals;
    }

    // The rendered clause is exactly that disjunction.
    const PhraseBook phrases = engine.scenario().phrase_book();
    RenderContext ctx;
    ctx.phrases = &phrases;
    ctx.device_names = engine.scenario().device_names();
    const std::string clause = detail::condition_clause(negated, ctx, false);
    ok = ok && fill == "the green light did not occur because " + clause + ".";
    ok = ok && contains(clause, "there was motion in the meeting room") &&
         contains(clause, " or ") &&
         contains(clause,
                  "the contact sensor for the meeting room was not closed");
  }
  report(4, "missing-action explanation negates the foil's precondition", ok,
         fill);
}

// ---------------------------------------------------------------------------
// 5. Property suites
// ---------------------------------------------------------------------------

bool topsis_oracle_equivalence() {
  std::mt19937 rng(1001);
  for (int round = 0; round < 500; ++round) {
    const std::size_t m = 2 + rng() % 4;
    const std::size_t n = 2 + rng() % 4;
    const auto values = testsupport::random_matrix(rng, m, n);
    topsis::DecisionMatrix matrix;
    matrix.values = values;
    for (std::size_t i = 0; i < m; ++i) {
      matrix.alternatives.push_back("a" + std::to_string(i));
    }
    for (std::size_t j = 0; j < n; ++j) {
      matrix.criteria.push_back("c" + std::to_string(j));
    }
    const auto weights = topsis::Weights::uniform(n);
    const auto result = topsis::rank(matrix, weights);
    const auto expected =
        testsupport::reference_closeness(values, weights.values);
    for (std::size_t i = 0; i < m; ++i) {
      if (std::abs(result.closeness[i] - expected[i]) > 1e-12) return false;
    }
  }
  return true;
}

bool topsis_scale_invariance() {
  std::mt19937 rng(1002);
  std::uniform_real_distribution<double> scale_dist(0.001, 1000.0);
  for (int round = 0; round < 500; ++round) {
    const std::size_t m = 2 + rng() % 4;
    const std::size_t n = 2 + rng() % 4;
    auto values = testsupport::random_matrix(rng, m, n);
    topsis::DecisionMatrix matrix;
    for (std::size_t i = 0; i < m; ++i) {
      matrix.alternatives.push_back("a" + std::to_string(i));
    }
    for (std::size_t j = 0; j < n; ++j) {
      matrix.criteria.push_back("c" + std::to_string(j));
    }
    matrix.values = values;
    const auto baseline = topsis::rank(matrix, topsis::Weights::uniform(n));

    const std::size_t column = rng() % n;
    const double factor = scale_dist(rng);
    for (auto& row : values) row[column] *= factor;
    matrix.values = values;
    const auto scaled = topsis::rank(matrix, topsis::Weights::uniform(n));

    if (scaled.winner != baseline.winner) return false;
    for (std::size_t i = 0; i < m; ++i) {
      if (std::abs(scaled.closeness[i] - baseline.closeness[i]) > 1e-12) {
        return false;
      }
    }
  }
  return true;
}

bool topsis_dominance_and_range() {
  std::mt19937 rng(1003);
  for (int round = 0; round < 500; ++round) {
    const std::size_t m = 2 + rng() % 4;
    const std::size_t n = 2 + rng() % 4;
    auto values = testsupport::random_matrix(rng, m, n);
    for (std::size_t j = 0; j < n; ++j) {
      double best = values[0][j];
      for (std::size_t i = 1; i < m; ++i) best = std::max(best, values[i][j]);
      values[0][j] = best;
    }
    values[0][0] += 1.0;
    topsis::DecisionMatrix matrix;
    for (std::size_t i = 0; i < m; ++i) {
      matrix.alternatives.push_back("a" + std::to_string(i));
    }
    for (std::size_t j = 0; j < n; ++j) {
      matrix.criteria.push_back("c" + std::to_string(j));
    }
    matrix.values = values;
    const auto result = topsis::rank(matrix, topsis::Weights::uniform(n));
    if (result.winner != 0) return false;
    if (std::abs(result.closeness[0] - 1.0) > 1e-12) return false;
    for (std::size_t i = 0; i < m; ++i) {
      if (result.closeness[i] < 0.0 || result.closeness[i] > 1.0) return false;
      if ((result.closeness[i] == 1.0) != (result.d_best[i] == 0.0)) {
        return false;
      }
    }
  }
  return true;
}

bool jaccard_properties() {
  std::mt19937 rng(1004);
  for (int round = 0; round < 500; ++round) {
    const Rule a = testsupport::random_rule(rng, "a");
    const Rule b = testsupport::random_rule(rng, "b");
    const double ab = precondition_similarity(a, b);
    if (ab != precondition_similarity(b, a)) return false;
    if (ab < 0.0 || ab > 1.0) return false;
    if (precondition_similarity(a, a) != 1.0) return false;
  }
  return true;
}

bool negate_truth_tables() {
  std::mt19937 rng(1005);
  for (int round = 0; round < 200; ++round) {
    const auto tree = testsupport::random_tree(rng, 4);
    const auto negated = negate(tree);
    for (int trial = 0; trial < 200; ++trial) {
      const auto assignment = testsupport::random_assignment(rng);
      if (testsupport::eval_tree(tree, assignment) ==
          testsupport::eval_tree(negated, assignment)) {
        return false;
      }
    }
  }
  return true;
}

bool history_counts_vs_oracle() {
  std::mt19937 rng(1006);
  for (int round = 0; round < 500; ++round) {
    const auto random = testsupport::random_log(rng, 1 + rng() % 60);
    const EventLog log(random.events);
    const auto w = testsupport::random_window(rng, random.events.front().ts,
                                              random.events.back().ts);
    for (const auto& rule : random.rules) {
      std::int64_t fired = 0;
      std::int64_t explained = 0;
      for (const auto& e : random.events) {
        if (!w.contains(e.ts)) continue;
        if (const auto* f = e.as_fired()) {
          if (f->rule_id == rule.id) ++fired;
        } else if (const auto* x = e.as_explained()) {
          if (x->rule_id == rule.id && x->user == "bob") ++explained;
        }
      }
      if (log.count_fired(rule.id, w) != fired) return false;
      if (log.count_explained(rule.id, "bob", w) != explained) return false;
    }
  }
  return true;
}

bool explain_determinism() {
  std::string fill;
  std::string trace;
  for (int i = 0; i < 10; ++i) {
    const Scenario s = load_fixture(OfficeTest::Test1);
    Engine engine(s, EngineConfig{});
    const auto outcome = engine.explain(s.requests.front());
    if (!outcome.ok()) return false;
    const std::string this_fill = outcome.explanation->pattern_fill;
    const std::string this_trace = outcome.trace.to_json().dump();
    if (i == 0) {
      fill = this_fill;
      trace = this_trace;
    } else if (this_fill != fill || this_trace != trace) {
      return false;
    }
  }
  return true;
}

void criterion_5() {
  struct Suite {
    const char* name;
    bool (*run)();
  };
  const Suite suites[] = {
      {"ranking matches reference", topsis_oracle_equivalence},
      {"column scaling", topsis_scale_invariance},
      {"dominance and closeness range", topsis_dominance_and_range},
      {"similarity symmetry/range/identity", jaccard_properties},
      {"negation truth tables", negate_truth_tables},
      {"history counts", history_counts_vs_oracle},
      {"explain determinism", explain_determinism},
  };
  bool ok = true;
  std::string failing;
  for (const auto& suite : suites) {
    if (!suite.run()) {
      ok = false;
      if (failing.empty()) failing = suite.name;
    }
  }
  report(5, "randomized property suites", ok,
         failing.empty() ? "7 suites" : "failed: " + failing);
}

// ---------------------------------------------------------------------------
// 6. Robustness
// ---------------------------------------------------------------------------

std::string mutate(std::string text, std::mt19937& rng) {
  const int strategy = static_cast<int>(rng() % 6);
  if (text.empty()) return text;
  switch (strategy) {
    case 0: {  // flip bytes
      for (int i = 0; i < 8; ++i) {
        text[rng() % text.size()] = static_cast<char>(rng() % 256);
      }
      break;
    }
    case 1:  // truncate
      text.resize(rng() % text.size());
      break;
    case 2: {  // delete a slice
      const std::size_t from = rng() % text.size();
      const std::size_t len = 1 + rng() % 64;
      text.erase(from, len);
      break;
    }
    case 3: {  // duplicate a slice
      const std::size_t from = rng() % text.size();
      const std::size_t len = std::min<std::size_t>(1 + rng() % 64,
                                                    text.size() - from);
      text.insert(rng() % text.size(), text.substr(from, len));
      break;
    }
    case 4: {  // dangling references
      const char* needles[] = {"meeting-room-occupied", "alice",
                               "meeting-room-status-light"};
      const char* replacements[] = {"ghost-rule", "nobody", "ghost-device"};
      const int pick = static_cast<int>(rng() % 3);
      const auto pos = text.find(needles[pick]);
      if (pos != std::string::npos) {
        text.replace(pos, std::string(needles[pick]).size(),
                     replacements[pick]);
      }
      break;
    }
    case 5: {  // corrupt a timestamp digit
      const auto pos = text.find("2026-");
      if (pos != std::string::npos && pos + 20 < text.size()) {
        text[pos + 1 + rng() % 20] = static_cast<char>('0' + rng() % 10);
      }
      break;
    }
  }
  return text;
}

bool fuzz_survival(std::string& detail) {
  const Scenario base = load_fixture(OfficeTest::Test1);
  const std::string seed_text = dump_scenario(base);
  std::mt19937 rng(1007);
  int parsed = 0;
  int valid = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::string text = mutate(seed_text, rng);
    try {
      const Scenario scenario = parse_scenario_text(text);
      ++parsed;
      const auto validation = validate_scenario(scenario);
      if (!validation.ok()) continue;
      ++valid;
      Engine engine(scenario, EngineConfig{});
      for (const auto& request : scenario.requests) {
        (void)engine.explain(request);
      }
    } catch (const Error&) {
      // Rejecting garbage loudly is the expected behavior.
    } catch (const std::exception& e) {
      detail = std::string("unexpected exception: ") + e.what();
      return false;
    }
  }
  std::ostringstream out;
  out << "1000 mutants, " << parsed << " parsed, " << valid
      << " validated clean";
  detail = out.str();
  return true;
}

bool degenerate_inputs(std::string& detail) {
  // Single candidate: the lone rule wins with closeness 1.
  {
    Scenario s;
    s.users = {{"alice", "Alice"}};
    s.devices = {{"lamp", ""}};
    Rule only;
    only.id = "only-rule";
    only.owner = "alice";
    only.precondition =
        ConditionTree::leaf({"switch", CompareOp::Equals, true});
    only.actions = {{"lamp", "on", ""}};
    s.rules = {only};
    s.requests = {{"alice", "lamp", Instant::parse("2026-01-01T10:00:00Z"),
                   std::nullopt}};
    Engine engine(s, EngineConfig{});
    const auto outcome = engine.explain(s.requests.front());
    if (!outcome.ok() || outcome.explanation->foil.id != "only-rule" ||
        outcome.explanation->ranking->closeness[0] != 1.0) {
      detail = "single-candidate scenario did not pick the lone rule";
      return false;
    }
  }

  // All-zero column: inert, finite closeness.
  {
    topsis::DecisionMatrix matrix;
    matrix.alternatives = {"a", "b"};
    matrix.criteria = {"c0", "c1"};
    matrix.values = {{0.0, 3.0}, {0.0, 1.0}};
    const auto result = topsis::rank(matrix, topsis::Weights::uniform(2));
    for (const double c : result.closeness) {
      if (!std::isfinite(c)) {
        detail = "zero column produced a non-finite closeness";
        return false;
      }
    }
    if (result.winner != 0) {
      detail = "zero column flipped the winner";
      return false;
    }
  }

  // Empty log: counts are zero, the pipeline still answers.
  {
    Scenario s = load_fixture(OfficeTest::Test4);
    s.history.clear();
    Engine engine(s, EngineConfig{});
    const auto outcome = engine.explain(s.requests.front());
    if (!outcome.ok()) {
      detail = "empty history broke the CC2 pipeline";
      return false;
    }
    const auto& values = outcome.explanation->matrix->values;
    for (const auto& row : values) {
      if (row[1] != 0.0 || row[2] != 0.0) {
        detail = "empty history produced non-zero counts";
        return false;
      }
    }
  }
  detail = "single candidate, zero column, empty log";
  return true;
}

void criterion_6() {
  std::string fuzz_detail;
  const bool fuzz_ok = fuzz_survival(fuzz_detail);
  std::string degenerate_detail;
  const bool degenerate_ok = degenerate_inputs(degenerate_detail);
  report(6, "fuzzed corpus and degenerate inputs", fuzz_ok && degenerate_ok,
         fuzz_ok ? (degenerate_ok ? fuzz_detail + "; " + degenerate_detail
                                  : degenerate_detail)
                 : fuzz_detail);
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  if (g_failures == 0) {
    std::printf("all acceptance criteria passed\n");
  } else {
    std::printf("%d criterion(s) failed\n", g_failures);
  }
  return g_failures == 0 ? 0 : 1;
}
