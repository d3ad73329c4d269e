#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "styledrift/error.hpp"
#include "styledrift/rewrite.hpp"

#include "support/fixtures.hpp"

using namespace styledrift;

namespace {

RewriteRequest make_request(const std::string& text,
                            PromptCondition condition = PromptCondition::Generic) {
  RewriteRequest request;
  request.document = fixtures::make_document("doc-1", text, "reddit");
  request.model_id = "mock/model";
  request.condition = condition;
  return request;
}

RetryPolicy fast_retry(int attempts = 3) {
  RetryPolicy retry;
  retry.max_attempts = attempts;
  retry.backoff_ms = {0};
  return retry;
}

}  // namespace

TEST_CASE("canonical prompts are byte-stable") {
  CHECK(canonical_prompt(PromptCondition::Generic) ==
        "Please improve the following story while preserving its meaning.");
  CHECK(canonical_prompt(PromptCondition::VoicePreserving) ==
        "Please improve the following story while preserving the author's voice "
        "and emotional tone.");
  CHECK(canonical_prompt(PromptCondition::RewriteOnly) ==
        "Please rewrite the following story.");
}

TEST_CASE("the provider receives template + two newlines + document text") {
  struct CapturingProvider : Provider {
    std::string seen;
    std::string complete(const std::string& prompt,
                         const CompletionParams&) override {
      seen = prompt;
      return "ok";
    }
  };
  CapturingProvider provider;
  rewrite(make_request("The story body.", PromptCondition::VoicePreserving),
          provider, nullptr, fast_retry());
  CHECK(provider.seen ==
        canonical_prompt(PromptCondition::VoicePreserving) + "\n\nThe story body.");
}

TEST_CASE("identity mock returns the original text") {
  MockProvider provider;
  const RewriteRequest request = make_request("My story stays the same.");
  const Document doc = rewrite(request, provider, nullptr, fast_retry());
  CHECK(doc.text == "My story stays the same.");
  CHECK(doc.id == "doc-1__mock/model__generic__p0");
  CHECK(doc.source == "reddit");
  CHECK(provider.call_count() == 1);
}

TEST_CASE("contraction expander mock applies the fixture table") {
  MockProvider provider([](const std::string& s) { return expand_contractions(s); });
  const Document doc = rewrite(
      make_request("I can't stay. I'm sad and they're gone."), provider);
  CHECK(doc.text == "I cannot stay. I am sad and they are gone.");
}

TEST_CASE("cache prevents repeat provider calls") {
  const std::string dir = fixtures::scratch_dir("cache");
  ResponseCache cache(dir);
  MockProvider provider;
  const RewriteRequest request = make_request("Cache me once.");

  const Document first = rewrite(request, provider, &cache, fast_retry());
  const Document second = rewrite(request, provider, &cache, fast_retry());
  CHECK(first.text == second.text);
  CHECK(provider.call_count() == 1);

  // cache layout: <dir>/<first-2-hex>/<hash>.json
  const std::string key = cache_key(request);
  const auto path = cache.path_for(key);
  CHECK(path.parent_path().filename().string() == key.substr(0, 2));
  CHECK(std::filesystem::exists(path));
}

TEST_CASE("cache keys are deterministic and distinguish request content") {
  const RewriteRequest base = make_request("Same text.");
  CHECK(cache_key(base) == cache_key(base));

  RewriteRequest other_text = base;
  other_text.document.text = "Different text.";
  CHECK(cache_key(other_text) != cache_key(base));

  RewriteRequest other_condition = base;
  other_condition.condition = PromptCondition::VoicePreserving;
  CHECK(cache_key(other_condition) != cache_key(base));

  RewriteRequest other_pass = base;
  other_pass.pass_index = 2;
  CHECK(cache_key(other_pass) != cache_key(base));

  RewriteRequest other_temperature = base;
  other_temperature.temperature = 0.0;
  CHECK(cache_key(other_temperature) != cache_key(base));
}

TEST_CASE("retry recovers from transient provider failures") {
  MockProvider provider;
  provider.fail_next(2);
  const Document doc =
      rewrite(make_request("Persistence pays."), provider, nullptr, fast_retry(3));
  CHECK(doc.text == "Persistence pays.");
  CHECK(provider.call_count() == 3);
}

TEST_CASE("exhausted retries rethrow the provider error") {
  MockProvider provider;
  provider.fail_next(5, /*rate_limited=*/true);
  try {
    rewrite(make_request("Never works."), provider, nullptr, fast_retry(3));
    FAIL("expected RateLimited");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RateLimited);
  }
  CHECK(provider.call_count() == 3);
}

TEST_CASE("empty completions are rejected") {
  MockProvider provider([](const std::string&) { return std::string(); });
  try {
    rewrite(make_request("Anything."), provider, nullptr, fast_retry());
    FAIL("expected EmptyCompletion");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyCompletion);
  }
}

TEST_CASE("batch rewrite crosses documents, models, conditions, and passes") {
  std::vector<Document> originals = {
      fixtures::make_document("a", "First story text."),
      fixtures::make_document("b", "Second story text."),
  };
  auto provider = std::make_shared<MockProvider>();
  ProviderRegistry registry;
  registry["m1"] = {provider, fast_retry()};

  const BatchResult result = batch_rewrite(
      originals, {"m1"},
      {PromptCondition::Generic, PromptCondition::VoicePreserving,
       PromptCondition::RewriteOnly},
      1, registry);
  CHECK(result.corpus.pairs.size() == 6);
  CHECK(result.errors.empty());
  for (const DocumentPair& pair : result.corpus.pairs) {
    CHECK(pair.rewrite.text == pair.original.text);
  }
}

TEST_CASE("batch output is independent of input ordering") {
  std::vector<Document> originals = {
      fixtures::make_document("b", "Second story text."),
      fixtures::make_document("a", "First story text."),
  };
  auto provider = std::make_shared<MockProvider>();
  ProviderRegistry registry;
  registry["m1"] = {provider, fast_retry()};
  registry["m2"] = {provider, fast_retry()};

  const BatchResult forward = batch_rewrite(
      originals, {"m1", "m2"}, {PromptCondition::Generic}, 1, registry);
  std::vector<Document> reversed = {originals[1], originals[0]};
  const BatchResult backward = batch_rewrite(
      reversed, {"m2", "m1"}, {PromptCondition::Generic}, 1, registry);
  CHECK(forward.corpus == backward.corpus);
}

TEST_CASE("interrupted batch resumes from cache without duplicate calls") {
  const std::string dir = fixtures::scratch_dir("cache_resume");
  ResponseCache cache(dir);
  std::vector<Document> originals = {
      fixtures::make_document("a", "Alpha story."),
      fixtures::make_document("b", "Beta story."),
  };
  auto provider = std::make_shared<MockProvider>();
  ProviderRegistry registry;
  registry["m1"] = {provider, fast_retry()};

  const BatchResult first = batch_rewrite(
      originals, {"m1"}, {PromptCondition::Generic, PromptCondition::RewriteOnly},
      2, registry, &cache);
  const int calls_after_first = provider->call_count();
  CHECK(calls_after_first == 8);  // 2 docs x 2 conditions x 2 passes

  const BatchResult second = batch_rewrite(
      originals, {"m1"}, {PromptCondition::Generic, PromptCondition::RewriteOnly},
      2, registry, &cache);
  CHECK(provider->call_count() == calls_after_first);  // all cache hits
  CHECK(first.corpus == second.corpus);
}

TEST_CASE("missing provider binding errors the cell and the run continues") {
  std::vector<Document> originals = {fixtures::make_document("a", "One story.")};
  auto provider = std::make_shared<MockProvider>();
  ProviderRegistry registry;
  registry["bound"] = {provider, fast_retry()};

  const BatchResult result = batch_rewrite(
      originals, {"bound", "unbound"}, {PromptCondition::Generic}, 1, registry);
  CHECK(result.corpus.pairs.size() == 1);
  REQUIRE(result.errors.size() == 1);
  CHECK(result.errors[0].cell.model_id == "unbound");
}

TEST_CASE("no credential bytes in any persisted cache file") {
  const std::string secret = "sk-test-SECRET-DO-NOT-PERSIST-42";
  setenv("STYLEDRIFT_TEST_KEY", secret.c_str(), 1);

  const std::string dir = fixtures::scratch_dir("cache_secret");
  ResponseCache cache(dir);
  MockProvider provider;
  rewrite(make_request("Scan this run."), provider, &cache, fast_retry());

  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string content = fixtures::read_file(entry.path().string());
    CHECK(content.find(secret) == std::string::npos);
  }
  unsetenv("STYLEDRIFT_TEST_KEY");
}

TEST_CASE("http provider speaks the chat-completions wire format") {
  httplib::Server server;
  std::string seen_auth;
  std::string seen_body;
  server.Post("/v1/chat/completions",
              [&](const httplib::Request& req, httplib::Response& res) {
                seen_auth = req.get_header_value("Authorization");
                seen_body = req.body;
                nlohmann::json reply = {
                    {"choices",
                     {{{"message", {{"role", "assistant"},
                                    {"content", "Rewritten story."}}}}}}};
                res.set_content(reply.dump(), "application/json");
              });
  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread server_thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  setenv("STYLEDRIFT_HTTP_KEY", "test-key-123", 1);
  ProviderBinding binding;
  binding.model_id = "remote/model";
  binding.endpoint =
      "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
  binding.credential_env = "STYLEDRIFT_HTTP_KEY";
  binding.requests_per_minute = 0;  // no throttling in tests
  HttpProvider provider(binding);

  CompletionParams params;
  params.model_id = "remote/model";
  const std::string completion =
      provider.complete("Please rewrite the following story.\n\nOnce upon a time.",
                        params);
  CHECK(completion == "Rewritten story.");
  CHECK(seen_auth == "Bearer test-key-123");
  const nlohmann::json body = nlohmann::json::parse(seen_body);
  CHECK(body["model"] == "remote/model");
  CHECK(body["messages"][0]["role"] == "user");
  CHECK(body["messages"][0]["content"].get<std::string>().find("Once upon a time") !=
        std::string::npos);

  server.stop();
  server_thread.join();
  unsetenv("STYLEDRIFT_HTTP_KEY");
}

TEST_CASE("http provider surfaces rate limits and missing credentials") {
  ProviderBinding binding;
  binding.model_id = "remote/model";
  binding.endpoint = "http://127.0.0.1:9/v1/chat/completions";
  binding.credential_env = "STYLEDRIFT_MISSING_KEY";
  unsetenv("STYLEDRIFT_MISSING_KEY");
  HttpProvider provider(binding);
  CompletionParams params;
  try {
    provider.complete("prompt", params);
    FAIL("expected ProviderError for missing credential");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ProviderError);
  }
}
