#pragma once

/**
 * Backend-neutral generation layer.
 *
 * GenerationBackend is the seam between the dialectic loop and whatever
 * produces completions: a live chat-completions endpoint (http_backend.hpp),
 * a scripted stand-in for tests, or a caching wrapper around either. The
 * loop only ever sends one user message per call and reads back one text.
 */

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "dialectic/digest.hpp"

namespace dialectic {

struct GenerationRequest {
  std::string model;
  std::string prompt;                        // sent as a single user message
  double temperature = 0.0;                  // already clamped by the caller
  std::optional<int> max_output_tokens;
  std::string request_tag;                   // run id + iteration + role, for logs
};

struct GenerationResponse {
  std::string text;
  std::string model_echo;
  std::int64_t latency_ms = 0;
  bool from_cache = false;
};

struct BackendError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct AuthError : BackendError {
  using BackendError::BackendError;
};
struct RateLimitedError : BackendError {
  using BackendError::BackendError;
};
struct ServerError : BackendError {
  using BackendError::BackendError;
};
struct TimeoutError : BackendError {
  using BackendError::BackendError;
};
struct MalformedResponseError : BackendError {
  using BackendError::BackendError;
};
struct ScriptExhaustedError : BackendError {
  using BackendError::BackendError;
};
struct NoMatchingEntryError : BackendError {
  using BackendError::BackendError;
};

class GenerationBackend {
 public:
  virtual ~GenerationBackend() = default;
  virtual GenerationResponse generate(const GenerationRequest& request) = 0;
};

// Digest over everything that determines a completion. Temperature is
// rounded to 6 decimals so that re-derived schedules hash identically.
inline std::string cache_key(const GenerationRequest& request) {
  char temp[32];
  std::snprintf(temp, sizeof temp, "%.6f", request.temperature);
  std::string material = "model\x1f" + request.model + "\x1fprompt\x1f" +
                         request.prompt + "\x1ftemperature\x1f" + temp +
                         "\x1fmax_tokens\x1f" +
                         (request.max_output_tokens
                              ? std::to_string(*request.max_output_tokens)
                              : std::string("unset"));
  return sha256_hex(material);
}

// ---------------------------------------------------------------------------
// Retries

struct RetryPolicy {
  int max_attempts = 3;
  int base_backoff_ms = 250;
  double backoff_factor = 2.0;
  int max_jitter_ms = 100;
};

// Runs call(), retrying rate-limit / server / timeout errors with geometric
// backoff plus bounded jitter. Auth and malformed-response errors are never
// retried. The sleeper is injectable so tests don't actually wait.
inline GenerationResponse with_retries(
    const RetryPolicy& policy, const std::function<GenerationResponse()>& call,
    const std::function<void(int)>& sleep_ms =
        [](int ms) { std::this_thread::sleep_for(std::chrono::milliseconds(ms)); },
    std::uint64_t jitter_seed = 0) {
  if (policy.max_attempts < 1)
    throw std::invalid_argument("max_attempts must be >= 1");
  std::uint64_t state = jitter_seed ^ 0x6a09e667f3bcc908ULL;
  for (int attempt = 1;; ++attempt) {
    try {
      return call();
    } catch (const RateLimitedError&) {
      if (attempt >= policy.max_attempts) throw;
    } catch (const ServerError&) {
      if (attempt >= policy.max_attempts) throw;
    } catch (const TimeoutError&) {
      if (attempt >= policy.max_attempts) throw;
    }
    double backoff = policy.base_backoff_ms *
                     std::pow(policy.backoff_factor, attempt - 1);
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    int jitter = policy.max_jitter_ms > 0
                     ? static_cast<int>((state >> 33) % static_cast<std::uint64_t>(
                                            policy.max_jitter_ms + 1))
                     : 0;
    sleep_ms(static_cast<int>(backoff) + jitter);
  }
}

// ---------------------------------------------------------------------------
// Scripted backend

// One scripted reply: consumed by the first generate whose prompt or tag
// contains `match`. An empty match is a wildcard.
struct ScriptEntry {
  std::string match;
  std::string response;
};

// Deterministic test double: entries are consumed in order of first match.
// Confine one instance to one run — consumption is stateful by design.
class ScriptedBackend : public GenerationBackend {
 public:
  explicit ScriptedBackend(std::vector<ScriptEntry> script)
      : script_(std::move(script)), used_(script_.size(), false) {}

  GenerationResponse generate(const GenerationRequest& request) override {
    std::lock_guard<std::mutex> lock(mutex_);
    if (consumed_ >= script_.size()) {
      throw ScriptExhaustedError("script exhausted at request '" +
                                 request.request_tag + "'");
    }
    for (std::size_t i = consumed_; i < script_.size(); ++i) {
      if (used_[i]) continue;
      const ScriptEntry& entry = script_[i];
      bool hit = entry.match.empty() ||
                 request.prompt.find(entry.match) != std::string::npos ||
                 request.request_tag.find(entry.match) != std::string::npos;
      if (!hit) continue;
      used_[i] = true;
      while (consumed_ < script_.size() && used_[consumed_]) ++consumed_;
      GenerationResponse resp;
      resp.text = entry.response;
      resp.model_echo = request.model;
      resp.latency_ms = 0;
      resp.from_cache = false;
      ++calls_;
      return resp;
    }
    throw NoMatchingEntryError("no scripted entry matches request '" +
                               request.request_tag + "'");
  }

  std::size_t calls() const { return calls_; }

 private:
  std::vector<ScriptEntry> script_;
  std::vector<bool> used_;
  std::size_t consumed_ = 0;
  std::size_t calls_ = 0;
  std::mutex mutex_;
};

// ---------------------------------------------------------------------------
// Response cache

// Wraps another backend with a directory of digest-named JSON files. A hit
// returns the stored text with from_cache = true and no inner call.
class CachingBackend : public GenerationBackend {
 public:
  CachingBackend(std::shared_ptr<GenerationBackend> inner,
                 std::filesystem::path cache_dir)
      : inner_(std::move(inner)), cache_dir_(std::move(cache_dir)) {
    std::filesystem::create_directories(cache_dir_);
  }

  GenerationResponse generate(const GenerationRequest& request) override {
    std::string key = cache_key(request);
    std::filesystem::path file = cache_dir_ / (key + ".json");
    {
      std::lock_guard<std::mutex> lock(mutex_);
      std::ifstream in(file, std::ios::binary);
      if (in) {
        nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
        if (!doc.is_discarded() && doc.contains("response_text")) {
          GenerationResponse resp;
          resp.text = doc["response_text"].get<std::string>();
          resp.model_echo = doc.value("model_echo", request.model);
          resp.latency_ms = 0;
          resp.from_cache = true;
          return resp;
        }
      }
    }
    GenerationResponse resp = inner_->generate(request);
    nlohmann::json doc;
    doc["model"] = request.model;
    doc["prompt"] = request.prompt;
    doc["temperature"] = request.temperature;
    if (request.max_output_tokens) doc["max_output_tokens"] = *request.max_output_tokens;
    doc["response_text"] = resp.text;
    doc["model_echo"] = resp.model_echo;
    {
      std::lock_guard<std::mutex> lock(mutex_);
      std::ofstream out(file, std::ios::binary | std::ios::trunc);
      if (!out) throw BackendError("cannot write cache file " + file.string());
      out << doc.dump(2) << '\n';
    }
    return resp;
  }

 private:
  std::shared_ptr<GenerationBackend> inner_;
  std::filesystem::path cache_dir_;
  std::mutex mutex_;
};

inline std::unique_ptr<ScriptedBackend> scripted_backend(
    std::vector<ScriptEntry> script) {
  if (script.empty()) throw std::invalid_argument("script must be non-empty");
  return std::make_unique<ScriptedBackend>(std::move(script));
}

}  // namespace dialectic
