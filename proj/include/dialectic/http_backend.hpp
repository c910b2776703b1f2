#pragma once

/**
 * Live wire client for an OpenAI-compatible chat-completions endpoint.
 *
 * Kept out of backend.hpp so tests that never touch the network don't pay
 * for the HTTP stack. The request body is {model, messages, temperature,
 * max_tokens?} with the prompt as a single user message; auth is a bearer
 * token read from an environment variable named in the config.
 */

#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif

#include <httplib.h>

#include <chrono>
#include <cstdlib>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "dialectic/backend.hpp"

namespace dialectic {

struct HttpBackendConfig {
  std::string base_url = "https://api.openai.com";
  std::string completions_path = "/v1/chat/completions";
  std::string credential_env = "OPENAI_API_KEY";
  int timeout_seconds = 120;
  RetryPolicy retry;
};

// Reads the bearer token now so a missing credential fails before any run
// state exists, not in the middle of iteration 3.
inline std::string require_credential(const std::string& env_name) {
  const char* value = std::getenv(env_name.c_str());
  if (!value || !*value) {
    throw AuthError("credential environment variable " + env_name +
                    " is not set");
  }
  return value;
}

class HttpBackend : public GenerationBackend {
 public:
  explicit HttpBackend(HttpBackendConfig config)
      : config_(std::move(config)),
        token_(require_credential(config_.credential_env)) {}

  GenerationResponse generate(const GenerationRequest& request) override {
    return with_retries(config_.retry, [&] { return attempt(request); });
  }

 private:
  GenerationResponse attempt(const GenerationRequest& request) {
    nlohmann::json body;
    body["model"] = request.model;
    body["messages"] = nlohmann::json::array(
        {nlohmann::json{{"role", "user"}, {"content", request.prompt}}});
    body["temperature"] = request.temperature;
    if (request.max_output_tokens) body["max_tokens"] = *request.max_output_tokens;

    // A fresh client per attempt keeps this safe for concurrent callers.
    httplib::Client client(config_.base_url);
    client.set_connection_timeout(config_.timeout_seconds, 0);
    client.set_read_timeout(config_.timeout_seconds, 0);
    client.set_bearer_token_auth(token_);

    auto started = std::chrono::steady_clock::now();
    httplib::Result result =
        client.Post(config_.completions_path, body.dump(), "application/json");
    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - started)
                       .count();

    if (!result) {
      throw TimeoutError("transport failure to " + config_.base_url + " (" +
                         httplib::to_string(result.error()) + ") for request '" +
                         request.request_tag + "'");
    }
    if (result->status == 401 || result->status == 403) {
      throw AuthError("endpoint rejected credentials (HTTP " +
                      std::to_string(result->status) + ")");
    }
    if (result->status == 429) {
      throw RateLimitedError("rate limited (HTTP 429) for request '" +
                             request.request_tag + "'");
    }
    if (result->status >= 500) {
      throw ServerError("server error (HTTP " + std::to_string(result->status) +
                        ") for request '" + request.request_tag + "'");
    }
    if (result->status != 200) {
      throw MalformedResponseError("unexpected HTTP " +
                                   std::to_string(result->status) + ": " +
                                   result->body.substr(0, 200));
    }

    nlohmann::json doc = nlohmann::json::parse(result->body, nullptr, false);
    if (doc.is_discarded()) {
      throw MalformedResponseError("response body is not JSON for request '" +
                                   request.request_tag + "'");
    }
    if (!doc.contains("choices") || !doc["choices"].is_array() ||
        doc["choices"].empty()) {
      throw MalformedResponseError("response has no choices for request '" +
                                   request.request_tag + "'");
    }
    const nlohmann::json& first = doc["choices"][0];
    if (!first.contains("message") || !first["message"].contains("content") ||
        !first["message"]["content"].is_string()) {
      throw MalformedResponseError("choice carries no message content for request '" +
                                   request.request_tag + "'");
    }
    GenerationResponse resp;
    resp.text = first["message"]["content"].get<std::string>();
    resp.model_echo = doc.value("model", request.model);
    resp.latency_ms = static_cast<std::int64_t>(elapsed);
    resp.from_cache = false;
    if (resp.text.empty()) {
      throw MalformedResponseError("endpoint returned empty completion for request '" +
                                   request.request_tag + "'");
    }
    return resp;
  }

  HttpBackendConfig config_;
  std::string token_;
};

}  // namespace dialectic
