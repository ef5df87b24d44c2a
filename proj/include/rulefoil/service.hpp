#pragma once

#include <string>

#include <httplib.h>
#include <json.hpp>

#include "rulefoil/engine.hpp"

namespace rulefoil {

// Wires the engine's HTTP surface onto a server:
//   POST /explanations  -- ExplanationRequest body, returns the outcome
//   GET  /rules         -- the scenario's rules
//   GET  /history       -- the event log, ?device= filters by involvement
// Handlers run concurrently on the server's pool; the engine is safe for
// that.
inline void attach_routes(httplib::Server& server, Engine& engine) {
  server.Post("/explanations", [&engine](const httplib::Request& req,
                                         httplib::Response& res) {
    nlohmann::json body;
    try {
      body = nlohmann::json::parse(req.body);
    } catch (const nlohmann::json::parse_error& e) {
      res.status = 400;
      res.set_content(
          nlohmann::json{{"error", std::string("invalid JSON: ") + e.what()}}
              .dump(2),
          "application/json");
      return;
    }
    ExplanationRequest request;
    try {
      if (!body.contains("at")) {
        // Fall back to the scenario's embedded request time, else now.
        const auto fallback = engine.default_request();
        body["at"] = fallback ? fallback->at.to_string()
                              : Instant::now().to_string();
      }
      request = ExplanationRequest::from_json(body);
    } catch (const ValidationError& e) {
      res.status = 400;
      res.set_content(nlohmann::json{{"error", e.what()}}.dump(2),
                      "application/json");
      return;
    }
    const ExplanationOutcome outcome = engine.explain(request);
    res.status = outcome.ok() ? 200 : 422;
    res.set_content(outcome.to_json().dump(2), "application/json");
  });

  server.Get("/rules", [&engine](const httplib::Request&,
                                 httplib::Response& res) {
    nlohmann::json rules = nlohmann::json::array();
    for (const auto& rule : engine.scenario().rules) {
      rules.push_back(rule_to_json(rule));
    }
    res.set_content(nlohmann::json{{"rules", std::move(rules)}}.dump(2),
                    "application/json");
  });

  server.Get("/history", [&engine](const httplib::Request& req,
                                   httplib::Response& res) {
    const bool filtered = req.has_param("device");
    const std::string device = filtered ? req.get_param_value("device") : "";
    nlohmann::json events = nlohmann::json::array();
    for (const auto& e : engine.log().events()) {
      if (filtered) {
        bool involved = false;
        if (const auto* f = e.as_fired()) {
          const Rule* rule = engine.rules().find(f->rule_id);
          involved = rule && rule->targets(device);
        } else if (const auto* err = e.as_error()) {
          involved = err->device == device;
        } else if (const auto* x = e.as_explained()) {
          involved = x->device == device;
        }
        if (!involved) continue;
      }
      events.push_back(e.to_json());
    }
    res.set_content(nlohmann::json{{"events", std::move(events)}}.dump(2),
                    "application/json");
  });
}

}  // namespace rulefoil
