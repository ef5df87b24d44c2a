#pragma once

#include <optional>
#include <string>
#include <utility>

#include <httplib.h>
#include <json.hpp>

namespace rulefoil {

// Remote text-polishing endpoint. Disabled when no endpoint is set.
struct RephraseConfig {
  std::string endpoint;  // e.g. http://localhost:8099/rephrase
  std::string token;     // optional bearer token
  int timeout_seconds{5};
};

struct PolishOutcome {
  std::string text;
  bool polished{false};
  std::optional<std::string> warning;
};

namespace detail {

struct ParsedUrl {
  std::string host;
  int port{80};
  std::string path{"/"};
};

inline std::optional<ParsedUrl> parse_http_url(const std::string& url) {
  const std::string prefix = "http://";
  if (url.rfind(prefix, 0) != 0) return std::nullopt;
  std::string rest = url.substr(prefix.size());
  ParsedUrl out;
  const auto slash = rest.find('/');
  std::string authority = slash == std::string::npos ? rest
                                                     : rest.substr(0, slash);
  if (slash != std::string::npos) out.path = rest.substr(slash);
  const auto colon = authority.find(':');
  if (colon == std::string::npos) {
    out.host = authority;
  } else {
    out.host = authority.substr(0, colon);
    try {
      out.port = std::stoi(authority.substr(colon + 1));
    } catch (...) {
      return std::nullopt;
    }
  }
  if (out.host.empty() || out.port <= 0 || out.port > 65535) {
    return std::nullopt;
  }
  return out;
}

}  // namespace detail

// Sends the pattern fill to the configured endpoint and returns the
// polished sentence. Failures of any kind leave the text unchanged and
// only attach a warning; an explanation never fails because its wording
// could not be improved.
inline PolishOutcome polish(const std::string& pattern_fill,
                            const std::optional<RephraseConfig>& config) {
  PolishOutcome out;
  out.text = pattern_fill;
  if (!config || config->endpoint.empty()) return out;

  const auto url = detail::parse_http_url(config->endpoint);
  if (!url) {
    out.warning = "rephrase endpoint is not a usable http:// URL: " +
                  config->endpoint;
    return out;
  }

  httplib::Client client(url->host, url->port);
  client.set_connection_timeout(config->timeout_seconds, 0);
  client.set_read_timeout(config->timeout_seconds, 0);
  client.set_write_timeout(config->timeout_seconds, 0);

  httplib::Headers headers;
  if (!config->token.empty()) {
    headers.emplace("Authorization", "Bearer " + config->token);
  }

  const nlohmann::json body{
      {"pattern", pattern_fill},
      {"instruction",
       "Rewrite this automation explanation as one grammatically correct "
       "sentence. Do not change its meaning or add information."}};

  const auto res =
      client.Post(url->path, headers, body.dump(), "application/json");
  if (!res) {
    out.warning = "rephrase endpoint unreachable: " + config->endpoint;
    return out;
  }
  if (res->status != 200) {
    out.warning =
        "rephrase endpoint returned status " + std::to_string(res->status);
    return out;
  }
  try {
    const auto parsed = nlohmann::json::parse(res->body);
    const std::string text = parsed.at("text").get<std::string>();
    if (text.empty()) {
      out.warning = "rephrase endpoint returned an empty text";
      return out;
    }
    out.text = text;
    out.polished = true;
  } catch (const nlohmann::json::exception&) {
    out.warning = "rephrase endpoint returned a malformed body";
  }
  return out;
}

}  // namespace rulefoil
