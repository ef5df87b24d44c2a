// Command-line front end: explain, rank, replay, validate and serve.
//
// Exit codes: 0 success, 1 validation failure, 2 pipeline failure.

#include <exception>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rulefoil/rulefoil.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitPipeline = 2;

struct CommonOptions {
  std::string format{"text"};

  bool json() const { return format == "json"; }
};

rulefoil::EngineConfig load_config(const std::string& config_path) {
  rulefoil::EngineConfig config;
  if (!config_path.empty()) {
    config = rulefoil::EngineConfig::load_file(config_path);
  }
  config.apply_env();
  return config;
}

void print_outcome_text(const rulefoil::ExplanationOutcome& outcome,
                        bool with_trace) {
  if (outcome.ok()) {
    const auto& e = *outcome.explanation;
    std::cout << "case:        " << rulefoil::to_string(e.cc) << "\n";
    std::cout << "foil rule:   " << e.foil.id << " (" << e.foil.name << ")\n";
    std::cout << "explanation: " << e.text << "\n";
    if (e.polished) {
      std::cout << "pattern:     " << e.pattern_fill << "\n";
    }
  } else {
    std::cout << "failure (" << outcome.failure->kind
              << "): " << outcome.failure->message << "\n";
  }
  for (const auto& warning : outcome.trace.warnings) {
    std::cout << "warning:     " << warning << "\n";
  }
  if (with_trace) {
    std::cout << "trace:\n" << outcome.trace.to_json().dump(2) << "\n";
  }
}

int run_explain(const std::string& scenario_path, const std::string& config_path,
                const std::string& user, const std::string& device,
                const std::string& at, bool with_trace,
                const CommonOptions& common) {
  const rulefoil::Scenario scenario =
      rulefoil::load_scenario_file(scenario_path);
  const auto report = rulefoil::validate_scenario(scenario);
  if (!report.ok()) {
    for (const auto& v : report.violations) {
      std::cerr << "violation: " << v << "\n";
    }
    return kExitValidation;
  }

  rulefoil::ExplanationRequest request;
  if (!scenario.requests.empty()) request = scenario.requests.front();
  if (!user.empty()) request.user = user;
  if (!device.empty()) request.device = device;
  if (!at.empty()) request.at = rulefoil::Instant::parse(at);
  if (request.user.empty() || request.device.empty()) {
    std::cerr << "no request: scenario embeds none, pass --user and --device"
              << "\n";
    return kExitValidation;
  }

  rulefoil::Engine engine(scenario, load_config(config_path));
  const auto outcome = engine.explain(request);
  if (common.json()) {
    std::cout << outcome.to_json().dump(2) << "\n";
  } else {
    print_outcome_text(outcome, with_trace);
  }
  if (outcome.ok()) return kExitOk;
  return outcome.failure->kind == "validation" ? kExitValidation
                                               : kExitPipeline;
}

int run_rank(const std::string& matrix_path, const std::string& weights_csv,
             const CommonOptions& common) {
  std::ifstream in(matrix_path);
  if (!in) {
    std::cerr << "cannot read matrix file: " << matrix_path << "\n";
    return kExitValidation;
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(buffer.str());
  } catch (const nlohmann::json::parse_error& e) {
    std::cerr << "invalid matrix file: " << e.what() << "\n";
    return kExitValidation;
  }
  const auto matrix = rulefoil::topsis::DecisionMatrix::from_json(j);

  rulefoil::topsis::Weights weights =
      rulefoil::topsis::Weights::uniform(matrix.cols());
  if (!weights_csv.empty()) {
    std::vector<double> values;
    std::stringstream ss(weights_csv);
    std::string item;
    while (std::getline(ss, item, ',')) values.push_back(std::stod(item));
    weights = rulefoil::topsis::Weights::of(values);
  }

  const auto result = rulefoil::topsis::rank(matrix, weights);
  if (common.json()) {
    nlohmann::json out = result.to_json();
    out["alternatives"] = matrix.alternatives;
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "alternative                          d_best   d_worst  "
                 "closeness\n";
    for (std::size_t i = 0; i < matrix.rows(); ++i) {
      std::printf("%-36s %8.4f %8.4f %10.4f%s\n",
                  matrix.alternatives[i].c_str(), result.d_best[i],
                  result.d_worst[i], result.closeness[i],
                  i == result.winner ? "  <- winner" : "");
    }
  }
  return kExitOk;
}

int run_replay(const std::string& scenario_path,
               const std::string& config_path, const CommonOptions& common) {
  const rulefoil::Scenario scenario =
      rulefoil::load_scenario_file(scenario_path);
  const auto report = rulefoil::validate_scenario(scenario);
  if (!report.ok()) {
    for (const auto& v : report.violations) {
      std::cerr << "violation: " << v << "\n";
    }
    return kExitValidation;
  }
  if (scenario.requests.empty()) {
    std::cerr << "scenario embeds no requests\n";
    return kExitValidation;
  }

  rulefoil::Engine engine(scenario, load_config(config_path));
  nlohmann::json all = nlohmann::json::array();
  bool any_failed = false;
  std::size_t index = 1;
  for (const auto& request : scenario.requests) {
    const auto outcome = engine.explain(request);
    any_failed = any_failed || !outcome.ok();
    if (common.json()) {
      all.push_back(outcome.to_json());
    } else {
      std::cout << "request " << index << " (" << request.user << " / "
                << request.device << "):\n";
      print_outcome_text(outcome, false);
    }
    ++index;
  }
  if (common.json()) std::cout << all.dump(2) << "\n";
  return any_failed ? kExitPipeline : kExitOk;
}

int run_validate(const std::string& scenario_path,
                 const CommonOptions& common) {
  const auto report = rulefoil::validate_scenario_file(scenario_path);
  if (common.json()) {
    std::cout << report.to_json().dump(2) << "\n";
  } else if (report.ok()) {
    std::cout << "scenario is valid\n";
  } else {
    for (const auto& v : report.violations) {
      std::cout << "violation: " << v << "\n";
    }
  }
  return report.ok() ? kExitOk : kExitValidation;
}

int run_serve(const std::string& scenario_path, const std::string& config_path,
              int port) {
  const rulefoil::Scenario scenario =
      rulefoil::load_scenario_file(scenario_path);
  rulefoil::Engine engine(scenario, load_config(config_path));
  httplib::Server server;
  rulefoil::attach_routes(server, engine);
  std::cout << "listening on port " << port << "\n";
  if (!server.listen("0.0.0.0", port)) {
    std::cerr << "cannot listen on port " << port << "\n";
    return kExitPipeline;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contrastive explanations for rule-based automations"};
  app.require_subcommand(1);

  CommonOptions common;

  std::string scenario_path;
  std::string config_path;
  std::string user;
  std::string device;
  std::string at;
  bool with_trace = false;

  auto* explain = app.add_subcommand(
      "explain", "Explain one request against a scenario");
  explain->add_option("--scenario", scenario_path, "Scenario file")
      ->required();
  explain->add_option("--user", user, "Explainee (default: embedded request)");
  explain->add_option("--device", device, "Device the confusion concerns");
  explain->add_option("--at", at, "Request time, RFC 3339");
  explain->add_option("--config", config_path, "Engine config file");
  explain->add_flag("--trace", with_trace, "Print the full audit trace");
  explain->add_option("--format", common.format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));

  std::string matrix_path;
  std::string weights_csv;
  auto* rank = app.add_subcommand(
      "rank", "Rank a decision matrix from a file");
  rank->add_option("--matrix", matrix_path, "Matrix file")->required();
  rank->add_option("--weights", weights_csv,
                   "Comma-separated weights (default: uniform)");
  rank->add_option("--format", common.format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));

  auto* replay = app.add_subcommand(
      "replay", "Run every request embedded in a scenario");
  replay->add_option("--scenario", scenario_path, "Scenario file")
      ->required();
  replay->add_option("--config", config_path, "Engine config file");
  replay->add_option("--format", common.format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));

  auto* validate = app.add_subcommand(
      "validate", "Check a scenario file for integrity violations");
  validate->add_option("--scenario", scenario_path, "Scenario file")
      ->required();
  validate->add_option("--format", common.format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));

  int port = 8080;
  auto* serve = app.add_subcommand(
      "serve", "Serve the explanation engine over HTTP");
  serve->add_option("--scenario", scenario_path, "Scenario file")->required();
  serve->add_option("--config", config_path, "Engine config file");
  serve->add_option("--port", port, "Listening port");

  CLI11_PARSE(app, argc, argv);

  try {
    if (explain->parsed()) {
      return run_explain(scenario_path, config_path, user, device, at,
                         with_trace, common);
    }
    if (rank->parsed()) return run_rank(matrix_path, weights_csv, common);
    if (replay->parsed()) return run_replay(scenario_path, config_path, common);
    if (validate->parsed()) return run_validate(scenario_path, common);
    if (serve->parsed()) return run_serve(scenario_path, config_path, port);
  } catch (const rulefoil::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const rulefoil::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const rulefoil::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPipeline;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPipeline;
  }
  return kExitOk;
}
