#pragma once

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rulefoil/explain.hpp"
#include "rulefoil/fact.hpp"
#include "rulefoil/history.hpp"
#include "rulefoil/rephrase.hpp"
#include "rulefoil/scenario.hpp"
#include "rulefoil/scoring.hpp"
#include "rulefoil/topsis.hpp"

namespace rulefoil {

// Tunables of the pipeline. Environment variables RULEFOIL_REPHRASE_ENDPOINT
// and RULEFOIL_REPHRASE_TOKEN override the rephrase settings.
struct EngineConfig {
  std::chrono::milliseconds recency_window{std::chrono::minutes(60)};
  std::chrono::milliseconds counting_window{std::chrono::hours(24) * 30};
  std::optional<std::vector<double>> weights;  // uniform when absent
  bool occurrence_per_user{true};
  std::optional<RephraseConfig> rephrase;
  std::optional<std::filesystem::path> log_path;  // delivery audit sink

  void check() const {
    if (recency_window.count() <= 0 || counting_window.count() <= 0) {
      throw ValidationError("config windows must be positive durations");
    }
    if (weights) (void)topsis::Weights::of(*weights);
  }

  static EngineConfig from_json(const nlohmann::json& j) {
    if (!j.is_object()) {
      throw ValidationError("a config file must contain a JSON object");
    }
    EngineConfig c;
    const auto number = [&](const char* field) -> std::optional<double> {
      if (!j.contains(field)) return std::nullopt;
      if (!j.at(field).is_number()) {
        throw ValidationError(std::string("config field '") + field +
                              "' must be a number");
      }
      return j.at(field).get<double>();
    };
    if (const auto minutes = number("recency_window_minutes")) {
      c.recency_window = std::chrono::milliseconds(
          static_cast<std::int64_t>(*minutes * 60'000.0));
    }
    if (const auto days = number("counting_window_days")) {
      c.counting_window = std::chrono::milliseconds(
          static_cast<std::int64_t>(*days * 86'400'000.0));
    }
    if (j.contains("weights")) {
      try {
        c.weights = j.at("weights").get<std::vector<double>>();
      } catch (const nlohmann::json::exception&) {
        throw ValidationError("config field 'weights' must be a number array");
      }
    }
    if (j.contains("occurrence_scope")) {
      const std::string scope =
          detail::require_string(j, "occurrence_scope", "config");
      if (scope == "per-user") {
        c.occurrence_per_user = true;
      } else if (scope == "global") {
        c.occurrence_per_user = false;
      } else {
        throw ValidationError(
            "config field 'occurrence_scope' must be 'per-user' or 'global'");
      }
    }
    RephraseConfig rephrase;
    bool has_rephrase = false;
    if (j.contains("rephrase_endpoint")) {
      rephrase.endpoint =
          detail::require_string(j, "rephrase_endpoint", "config");
      has_rephrase = true;
    }
    if (j.contains("rephrase_token")) {
      rephrase.token = detail::require_string(j, "rephrase_token", "config");
    }
    if (const auto seconds = number("rephrase_timeout_seconds")) {
      rephrase.timeout_seconds = static_cast<int>(*seconds);
    }
    if (has_rephrase) c.rephrase = rephrase;
    if (j.contains("log_path")) {
      c.log_path = std::filesystem::path(
          detail::require_string(j, "log_path", "config"));
    }
    c.check();
    return c;
  }

  static EngineConfig load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw StorageError("cannot read config file: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(buffer.str());
    } catch (const nlohmann::json::parse_error& e) {
      const auto [line, column] =
          detail::line_and_column(buffer.str(), e.byte);
      throw ParseError(e.what(), line, column);
    }
    return from_json(j);
  }

  // Environment overrides; applied after file/defaults.
  void apply_env() {
    if (const char* endpoint = std::getenv("RULEFOIL_REPHRASE_ENDPOINT")) {
      if (!rephrase) rephrase = RephraseConfig{};
      rephrase->endpoint = endpoint;
    }
    if (const char* token = std::getenv("RULEFOIL_REPHRASE_TOKEN")) {
      if (!rephrase) rephrase = RephraseConfig{};
      rephrase->token = token;
    }
  }
};

// Why an explanation could not be produced.
struct Failure {
  std::string kind;  // validation | no-candidate | integrity | storage | internal
  std::string message;

  nlohmann::json to_json() const {
    return nlohmann::json{{"kind", kind}, {"message", message}};
  }
};

// Audit trail of one pipeline run.
struct Trace {
  ExplanationRequest request;
  std::optional<ConfusingCase> cc;
  std::optional<HappenedEvent> fact;
  std::vector<std::string> candidates;
  std::optional<topsis::DecisionMatrix> matrix;
  std::optional<topsis::RankingResult> ranking;
  std::optional<std::vector<double>> weights_used;
  std::string pattern_fill;
  bool polished{false};
  std::vector<std::string> warnings;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["request"] = request.to_json();
    if (cc) j["case"] = std::string(to_string(*cc));
    if (fact) j["fact"] = fact->to_json();
    j["candidates"] = candidates;
    if (matrix) j["matrix"] = matrix->to_json();
    if (ranking) j["ranking"] = ranking->to_json();
    if (weights_used) j["weights"] = *weights_used;
    if (!pattern_fill.empty()) j["pattern_fill"] = pattern_fill;
    j["polished"] = polished;
    j["warnings"] = warnings;
    return j;
  }
};

// Exactly one of `explanation` and `failure` is populated.
struct ExplanationOutcome {
  std::optional<Explanation> explanation;
  std::optional<Failure> failure;
  Trace trace;

  bool ok() const { return explanation.has_value(); }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["status"] = ok() ? "ok" : "failure";
    if (explanation) {
      nlohmann::json je;
      je["case"] = std::string(to_string(explanation->cc));
      je["text"] = explanation->text;
      je["pattern_fill"] = explanation->pattern_fill;
      je["polished"] = explanation->polished;
      je["foil_rule"] = explanation->foil.id;
      je["fact"] = explanation->fact.to_json();
      j["explanation"] = std::move(je);
    }
    if (failure) j["failure"] = failure->to_json();
    j["trace"] = trace.to_json();
    return j;
  }
};

// Runs the whole pipeline over one scenario: fact determination, case
// classification, candidate scoring, TOPSIS ranking, pattern rendering,
// optional polishing, and the occurrence feedback append. Requests for
// distinct users may run concurrently; each computes over a log snapshot
// and appends are serialized by the log itself.
class Engine {
 public:
  Engine(Scenario scenario, EngineConfig config)
      : scenario_(std::move(scenario)),
        config_(std::move(config)),
        phrases_(scenario_.phrase_book()) {
    config_.check();
    const ValidationReport report = validate_scenario(scenario_);
    if (!report.ok()) {
      std::string message = "scenario is not valid:";
      for (const auto& v : report.violations) message += "\n  - " + v;
      throw ValidationError(message);
    }
    rules_ = scenario_.rule_set();
    log_ = std::make_unique<EventLog>(scenario_.history);
    if (config_.log_path) {
      audit_ = std::make_unique<EventLog>();
      audit_->attach_file(*config_.log_path);
    }
    render_ctx_.phrases = &phrases_;
    render_ctx_.device_names = scenario_.device_names();
  }

  const Scenario& scenario() const { return scenario_; }
  const RuleSet& rules() const { return rules_; }
  const EventLog& log() const { return *log_; }
  const EngineConfig& config() const { return config_; }

  std::optional<ExplanationRequest> default_request() const {
    if (scenario_.requests.empty()) return std::nullopt;
    return scenario_.requests.front();
  }

  ExplanationOutcome explain(const ExplanationRequest& req) {
    ExplanationOutcome outcome;
    outcome.trace.request = req;
    try {
      run_pipeline(req, outcome);
    } catch (const NoCandidateError& e) {
      outcome.failure = Failure{"no-candidate", e.what()};
    } catch (const IntegrityError& e) {
      outcome.failure = Failure{"integrity", e.what()};
    } catch (const ValidationError& e) {
      outcome.failure = Failure{"validation", e.what()};
    } catch (const StorageError& e) {
      outcome.failure = Failure{"storage", e.what()};
    } catch (const Error& e) {
      outcome.failure = Failure{"internal", e.what()};
    }
    return outcome;
  }

 private:
  void run_pipeline(const ExplanationRequest& req,
                    ExplanationOutcome& outcome) {
    if (!scenario_.has_user(req.user)) {
      throw ValidationError("unknown user: '" + req.user + "'");
    }
    if (!scenario_.has_device(req.device)) {
      throw ValidationError("unknown device: '" + req.device + "'");
    }

    // Every computation below runs over this snapshot; concurrent
    // requests cannot tear a half-built matrix.
    const EventLog snapshot(log_->events());

    const HappenedEvent fact =
        determine_fact(snapshot, rules_, req, config_.recency_window);
    const ConfusingCase cc = classify(fact);
    outcome.trace.fact = fact;
    outcome.trace.cc = cc;

    Explanation explanation;
    explanation.cc = cc;
    explanation.fact = fact;

    if (cc == ConfusingCase::CC3) {
      // The expected rule is the last rule fired before the error; no
      // expectation scores are involved.
      const auto foil_id =
          snapshot.last_rule_before(rules_, req.device, fact.at);
      if (!foil_id) {
        throw NoCandidateError(
            "no rule fired on device '" + req.device +
            "' before the error, so no expected rule can be determined");
      }
      explanation.foil = rules_.at(*foil_id);
      outcome.trace.candidates = {*foil_id};
    } else {
      const std::vector<Rule> candidates =
          candidate_rules(rules_, req.device, fact);
      for (const auto& rule : candidates) {
        outcome.trace.candidates.push_back(rule.id);
      }

      ScoringContext ctx{
          snapshot,
          req.user,
          TimeWindow::ending_at(req.at, config_.counting_window),
          fact.rule,
          config_.occurrence_per_user};
      const topsis::DecisionMatrix matrix = build_matrix(candidates, cc, ctx);

      topsis::Weights weights = topsis::Weights::uniform(matrix.cols());
      if (config_.weights) {
        if (config_.weights->size() != matrix.cols()) {
          throw ValidationError(
              "configured weights have " +
              std::to_string(config_.weights->size()) + " entries but the " +
              std::string(to_string(cc)) + " matrix has " +
              std::to_string(matrix.cols()) + " criteria");
        }
        weights = topsis::Weights::of(*config_.weights);
      }

      const topsis::RankingResult ranking = topsis::rank(matrix, weights);
      explanation.foil = candidates[ranking.winner];
      explanation.matrix = matrix;
      explanation.ranking = ranking;
      outcome.trace.matrix = matrix;
      outcome.trace.ranking = ranking;
      outcome.trace.weights_used = weights.values;
    }

    explanation.pattern_fill =
        render(cc, fact, explanation.foil, req.device, render_ctx_);
    outcome.trace.pattern_fill = explanation.pattern_fill;

    const PolishOutcome polish_result =
        polish(explanation.pattern_fill, config_.rephrase);
    explanation.text = polish_result.text;
    explanation.polished = polish_result.polished;
    outcome.trace.polished = polish_result.polished;
    if (polish_result.warning) {
      outcome.trace.warnings.push_back(*polish_result.warning);
    }

    record_delivery(req, explanation.foil.id, outcome.trace);
    outcome.explanation = std::move(explanation);
  }

  // Delivered explanations feed the occurrence factor of later requests.
  void record_delivery(const ExplanationRequest& req,
                       const std::string& foil_id, Trace& trace) {
    const SystemEvent event =
        SystemEvent::explained(req.at, foil_id, req.user, req.device);
    try {
      log_->append(event);
    } catch (const OrderingError&) {
      trace.warnings.push_back(
          "delivery not recorded: request predates the log tail");
      return;
    }
    if (audit_) {
      try {
        audit_->append(event);
      } catch (const Error& e) {
        trace.warnings.push_back(std::string("audit log append failed: ") +
                                 e.what());
      }
    }
  }

  Scenario scenario_;
  EngineConfig config_;
  PhraseBook phrases_;
  RuleSet rules_;
  std::unique_ptr<EventLog> log_;
  std::unique_ptr<EventLog> audit_;
  RenderContext render_ctx_;
};

}  // namespace rulefoil
