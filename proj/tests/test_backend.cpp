// Tests for the generation layer: digests, retries, the scripted backend,
// the response cache, and the wire client against a local server.

#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <dialectic/backend.hpp>
#include <dialectic/digest.hpp>
#include <dialectic/http_backend.hpp>

#include <nlohmann/json.hpp>

using namespace dialectic;

namespace {

GenerationRequest request_of(const std::string& model, const std::string& prompt,
                             double temperature,
                             std::optional<int> max_tokens = std::nullopt,
                             const std::string& tag = "test/request") {
  GenerationRequest r;
  r.model = model;
  r.prompt = prompt;
  r.temperature = temperature;
  r.max_output_tokens = max_tokens;
  r.request_tag = tag;
  return r;
}

// Counts how many times the inner backend actually runs.
class CountingBackend : public GenerationBackend {
 public:
  explicit CountingBackend(std::string reply) : reply_(std::move(reply)) {}
  GenerationResponse generate(const GenerationRequest& request) override {
    ++calls;
    GenerationResponse resp;
    resp.text = reply_;
    resp.model_echo = request.model;
    return resp;
  }
  std::atomic<int> calls{0};

 private:
  std::string reply_;
};

std::filesystem::path fresh_cache_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() /
             ("dialectic-cache-test-" + tag);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("sha-256 digests match the published reference vectors") {
  CHECK(sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("cache keys are stable for equal requests") {
  auto a = request_of("gpt-4o", "What is energy?", 0.7);
  auto b = request_of("gpt-4o", "What is energy?", 0.7);
  b.request_tag = "different/tag";  // tags are log metadata, not identity
  CHECK(cache_key(a) == cache_key(b));
}

TEST_CASE("cache keys separate every identity field") {
  auto base = request_of("gpt-4o", "What is energy?", 0.5185);
  auto other_temp = base;
  other_temp.temperature = 0.3841;
  CHECK(cache_key(base) != cache_key(other_temp));

  auto other_model = base;
  other_model.model = "gpt-4o-mini";
  CHECK(cache_key(base) != cache_key(other_model));

  auto other_tokens = base;
  other_tokens.max_output_tokens = 512;
  CHECK(cache_key(base) != cache_key(other_tokens));
}

TEST_CASE("any single-character prompt edit changes the cache key") {
  const std::string prompt = "Assess whether the source text is novel.";
  auto base = request_of("gpt-4o", prompt, 0.7);
  const std::string base_key = cache_key(base);
  std::mt19937 rng(20240817);
  std::uniform_int_distribution<std::size_t> pick(0, prompt.size() - 1);
  for (int trial = 0; trial < 50; ++trial) {
    std::string edited = prompt;
    std::size_t at = pick(rng);
    edited[at] = edited[at] == 'x' ? 'y' : 'x';
    auto req = request_of("gpt-4o", edited, 0.7);
    CAPTURE(at);
    CHECK(cache_key(req) != base_key);
  }
}

TEST_CASE("scripted backend replays entries in first-match order") {
  auto backend = scripted_backend({{"", "first"}, {"", "second"}});
  CHECK(backend->generate(request_of("m", "p", 0.0)).text == "first");
  CHECK(backend->generate(request_of("m", "p", 0.0)).text == "second");
  CHECK(backend->calls() == 2);
}

TEST_CASE("scripted entries match on prompt or request tag substrings") {
  auto backend = scripted_backend({{"synthesis", "S-reply"},
                                   {"antithesis", "A-reply"}});
  // The antithesis request skips the synthesis entry and consumes the second.
  auto first = backend->generate(
      request_of("m", "produce an antithesis", 0.5, std::nullopt, "it0/antithesis"));
  CHECK(first.text == "A-reply");
  auto second = backend->generate(
      request_of("m", "unify the positions", 0.7, std::nullopt, "it0/synthesis"));
  CHECK(second.text == "S-reply");
}

TEST_CASE("an exhausted script names the failing request") {
  auto backend = scripted_backend({{"", "only"}});
  backend->generate(request_of("m", "p", 0.0));
  CHECK_THROWS_WITH_AS(
      backend->generate(request_of("m", "p", 0.0, std::nullopt, "run/it3/synthesis")),
      doctest::Contains("run/it3/synthesis"), ScriptExhaustedError);
}

TEST_CASE("a script with no matching entry reports the request tag") {
  auto backend = scripted_backend({{"never-matches", "x"}});
  CHECK_THROWS_WITH_AS(
      backend->generate(request_of("m", "p", 0.0, std::nullopt, "run/it0/antithesis")),
      doctest::Contains("run/it0/antithesis"), NoMatchingEntryError);
}

TEST_CASE("an empty script is rejected up front") {
  CHECK_THROWS_AS(scripted_backend({}), std::invalid_argument);
}

TEST_CASE("scripted responses echo the requested model") {
  auto backend = scripted_backend({{"", "text"}});
  auto resp = backend->generate(request_of("gpt-4o-mini", "p", 0.0));
  CHECK(resp.model_echo == "gpt-4o-mini");
  CHECK_FALSE(resp.from_cache);
}

TEST_CASE("the cache serves repeats without touching the inner backend") {
  auto dir = fresh_cache_dir("hits");
  auto inner = std::make_shared<CountingBackend>("cached reply");
  CachingBackend cache(inner, dir);

  auto req = request_of("gpt-4o", "What is energy?", 0.7);
  auto first = cache.generate(req);
  CHECK_FALSE(first.from_cache);
  CHECK(first.text == "cached reply");

  for (int i = 0; i < 4; ++i) {
    auto again = cache.generate(req);
    CHECK(again.from_cache);
    CHECK(again.text == "cached reply");
  }
  // Cache soundness: n identical requests, exactly one inner call.
  CHECK(inner->calls == 1);
  std::filesystem::remove_all(dir);
}

TEST_CASE("different requests never share a cache slot") {
  auto dir = fresh_cache_dir("miss");
  auto inner = std::make_shared<CountingBackend>("reply");
  CachingBackend cache(inner, dir);
  cache.generate(request_of("gpt-4o", "prompt one", 0.7));
  cache.generate(request_of("gpt-4o", "prompt two", 0.7));
  cache.generate(request_of("gpt-4o", "prompt one", 0.5));
  CHECK(inner->calls == 3);
  std::filesystem::remove_all(dir);
}

TEST_CASE("the cache survives process-style reopens") {
  auto dir = fresh_cache_dir("reopen");
  auto req = request_of("gpt-4o", "persist me", 0.7);
  {
    auto inner = std::make_shared<CountingBackend>("persisted");
    CachingBackend cache(inner, dir);
    cache.generate(req);
  }
  auto inner = std::make_shared<CountingBackend>("should not be called");
  CachingBackend cache(inner, dir);
  auto resp = cache.generate(req);
  CHECK(resp.from_cache);
  CHECK(resp.text == "persisted");
  CHECK(inner->calls == 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("retries stop after a success and return its response") {
  int attempts = 0;
  std::vector<int> sleeps;
  auto resp = with_retries(
      RetryPolicy{5, 250, 2.0, 0},
      [&]() -> GenerationResponse {
        if (++attempts < 3) throw RateLimitedError("slow down");
        GenerationResponse r;
        r.text = "third time lucky";
        return r;
      },
      [&](int ms) { sleeps.push_back(ms); });
  CHECK(resp.text == "third time lucky");
  CHECK(attempts == 3);
  // Geometric backoff with jitter disabled: 250, then 500.
  CHECK(sleeps == std::vector<int>{250, 500});
}

TEST_CASE("jitter is bounded by the policy") {
  std::vector<int> sleeps;
  int attempts = 0;
  CHECK_THROWS_AS(with_retries(
                      RetryPolicy{3, 100, 2.0, 50},
                      [&]() -> GenerationResponse {
                        ++attempts;
                        throw ServerError("boom");
                      },
                      [&](int ms) { sleeps.push_back(ms); }, 12345),
                  ServerError);
  REQUIRE(sleeps.size() == 2);
  CHECK(sleeps[0] >= 100);
  CHECK(sleeps[0] <= 150);
  CHECK(sleeps[1] >= 200);
  CHECK(sleeps[1] <= 250);
}

TEST_CASE("attempts never exceed the policy bound") {
  int attempts = 0;
  CHECK_THROWS_AS(with_retries(
                      RetryPolicy{3, 0, 2.0, 0},
                      [&]() -> GenerationResponse {
                        ++attempts;
                        throw TimeoutError("t");
                      },
                      [](int) {}),
                  TimeoutError);
  CHECK(attempts == 3);
}

TEST_CASE("auth and malformed-response errors are never retried") {
  int attempts = 0;
  CHECK_THROWS_AS(with_retries(
                      RetryPolicy{5, 0, 2.0, 0},
                      [&]() -> GenerationResponse {
                        ++attempts;
                        throw AuthError("bad key");
                      },
                      [](int) {}),
                  AuthError);
  CHECK(attempts == 1);

  attempts = 0;
  CHECK_THROWS_AS(with_retries(
                      RetryPolicy{5, 0, 2.0, 0},
                      [&]() -> GenerationResponse {
                        ++attempts;
                        throw MalformedResponseError("garbage");
                      },
                      [](int) {}),
                  MalformedResponseError);
  CHECK(attempts == 1);
}

TEST_CASE("a nonsensical retry policy is rejected") {
  CHECK_THROWS_AS(
      with_retries(RetryPolicy{0, 0, 2.0, 0},
                   []() -> GenerationResponse { return {}; }, [](int) {}),
      std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Wire client against a local in-process server.

namespace {

struct LocalServer {
  httplib::Server server;
  int port = 0;
  std::thread thread;
  nlohmann::json last_body;
  std::string last_auth;
  std::atomic<int> rate_limited_hits{0};

  LocalServer() {
    server.Post("/v1/chat/completions", [this](const httplib::Request& req,
                                               httplib::Response& res) {
      last_body = nlohmann::json::parse(req.body);
      last_auth = req.get_header_value("Authorization");
      nlohmann::json reply = {
          {"model", "local-echo"},
          {"choices",
           {{{"message", {{"role", "assistant"}, {"content", "pong"}}}}}}};
      res.set_content(reply.dump(), "application/json");
    });
    server.Post("/auth-fail", [](const httplib::Request&, httplib::Response& res) {
      res.status = 401;
      res.set_content("{\"error\":\"bad key\"}", "application/json");
    });
    server.Post("/always-429", [this](const httplib::Request&, httplib::Response& res) {
      ++rate_limited_hits;
      res.status = 429;
      res.set_content("slow down", "text/plain");
    });
    server.Post("/boom", [](const httplib::Request&, httplib::Response& res) {
      res.status = 503;
      res.set_content("unavailable", "text/plain");
    });
    server.Post("/not-json", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("this is not json", "text/plain");
    });
    server.Post("/no-choices", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("{\"model\":\"x\",\"choices\":[]}", "application/json");
    });
    server.Post("/empty-content", [](const httplib::Request&, httplib::Response& res) {
      nlohmann::json reply = {
          {"choices",
           {{{"message", {{"role", "assistant"}, {"content", ""}}}}}}};
      res.set_content(reply.dump(), "application/json");
    });
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }

  ~LocalServer() {
    server.stop();
    thread.join();
  }

  HttpBackendConfig config(const std::string& path) const {
    HttpBackendConfig cfg;
    cfg.base_url = "http://127.0.0.1:" + std::to_string(port);
    cfg.completions_path = path;
    cfg.credential_env = "DIALECTIC_TEST_KEY";
    cfg.timeout_seconds = 5;
    cfg.retry = RetryPolicy{1, 0, 2.0, 0};
    return cfg;
  }
};

}  // namespace

TEST_CASE("the wire client sends one user message with bearer auth") {
  ::setenv("DIALECTIC_TEST_KEY", "test-token-123", 1);
  LocalServer local;
  HttpBackend backend(local.config("/v1/chat/completions"));

  auto req = request_of("gpt-4o", "ping prompt", 0.5185, 256, "wire/ping");
  auto resp = backend.generate(req);

  CHECK(resp.text == "pong");
  CHECK(resp.model_echo == "local-echo");
  CHECK_FALSE(resp.from_cache);
  CHECK(resp.latency_ms >= 0);

  CHECK(local.last_auth == "Bearer test-token-123");
  CHECK(local.last_body["model"] == "gpt-4o");
  REQUIRE(local.last_body["messages"].size() == 1);
  CHECK(local.last_body["messages"][0]["role"] == "user");
  CHECK(local.last_body["messages"][0]["content"] == "ping prompt");
  CHECK(local.last_body["temperature"].get<double>() == doctest::Approx(0.5185));
  CHECK(local.last_body["max_tokens"] == 256);
}

TEST_CASE("max_tokens stays off the wire when unset") {
  ::setenv("DIALECTIC_TEST_KEY", "test-token-123", 1);
  LocalServer local;
  HttpBackend backend(local.config("/v1/chat/completions"));
  backend.generate(request_of("gpt-4o", "ping", 0.0));
  CHECK_FALSE(local.last_body.contains("max_tokens"));
}

TEST_CASE("HTTP statuses map onto the error taxonomy") {
  ::setenv("DIALECTIC_TEST_KEY", "test-token-123", 1);
  LocalServer local;

  SUBCASE("401 is an auth error") {
    HttpBackend backend(local.config("/auth-fail"));
    CHECK_THROWS_AS(backend.generate(request_of("m", "p", 0.0)), AuthError);
  }
  SUBCASE("5xx is a server error") {
    HttpBackend backend(local.config("/boom"));
    CHECK_THROWS_AS(backend.generate(request_of("m", "p", 0.0)), ServerError);
  }
  SUBCASE("non-JSON bodies are malformed responses") {
    HttpBackend backend(local.config("/not-json"));
    CHECK_THROWS_AS(backend.generate(request_of("m", "p", 0.0)),
                    MalformedResponseError);
  }
  SUBCASE("empty choice lists are malformed responses") {
    HttpBackend backend(local.config("/no-choices"));
    CHECK_THROWS_AS(backend.generate(request_of("m", "p", 0.0)),
                    MalformedResponseError);
  }
  SUBCASE("empty completions are malformed responses") {
    HttpBackend backend(local.config("/empty-content"));
    CHECK_THROWS_AS(backend.generate(request_of("m", "p", 0.0)),
                    MalformedResponseError);
  }
}

TEST_CASE("rate limiting is retried up to the policy bound, then surfaced") {
  ::setenv("DIALECTIC_TEST_KEY", "test-token-123", 1);
  LocalServer local;
  auto cfg = local.config("/always-429");
  cfg.retry = RetryPolicy{3, 0, 2.0, 0};
  HttpBackend backend(cfg);
  CHECK_THROWS_AS(backend.generate(request_of("m", "p", 0.0)), RateLimitedError);
  CHECK(local.rate_limited_hits == 3);
}

TEST_CASE("transport failures surface as timeouts") {
  ::setenv("DIALECTIC_TEST_KEY", "test-token-123", 1);
  HttpBackendConfig cfg;
  cfg.base_url = "http://127.0.0.1:9";  // discard port; nothing listens
  cfg.credential_env = "DIALECTIC_TEST_KEY";
  cfg.timeout_seconds = 1;
  cfg.retry = RetryPolicy{1, 0, 2.0, 0};
  HttpBackend backend(cfg);
  CHECK_THROWS_AS(backend.generate(request_of("m", "p", 0.0)), TimeoutError);
}

TEST_CASE("a missing credential fails before any request is sent") {
  ::unsetenv("DIALECTIC_MISSING_KEY");
  HttpBackendConfig cfg;
  cfg.credential_env = "DIALECTIC_MISSING_KEY";
  CHECK_THROWS_WITH_AS(HttpBackend{cfg},
                       doctest::Contains("DIALECTIC_MISSING_KEY"), AuthError);
}
