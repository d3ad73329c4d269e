#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "styledrift/corpus.hpp"

namespace styledrift {

// The exact prompt template for each condition, byte-stable.
const std::string& canonical_prompt(PromptCondition condition);

struct RewriteRequest {
  Document document;
  std::string model_id;
  PromptCondition condition = PromptCondition::Generic;
  double temperature = 0.7;
  int max_tokens = 4096;
  int pass_index = 0;
};

enum class PromptPlacement { User, System };

struct CompletionParams {
  std::string model_id;
  double temperature = 0.7;
  int max_tokens = 4096;
  PromptPlacement placement = PromptPlacement::User;
};

// Wire formats are adapter-specific and isolated behind this interface:
// (prompt, parameters) -> completion text.
class Provider {
 public:
  virtual ~Provider() = default;
  virtual std::string complete(const std::string& prompt,
                               const CompletionParams& params) = 0;
};

// Deterministic in-process provider for tests and offline runs. The prompt
// is the canonical template + two newlines + the document text; the mock
// recovers the document part and applies the configured transform.
class MockProvider : public Provider {
 public:
  using Transform = std::function<std::string(const std::string&)>;

  MockProvider();  // identity transform
  explicit MockProvider(Transform transform);

  std::string complete(const std::string& prompt,
                       const CompletionParams& params) override;

  // The first n calls fail with ProviderError (or RateLimited) before the
  // transform starts succeeding.
  void fail_next(int n, bool rate_limited = false);

  int call_count() const { return calls_.load(); }

 private:
  Transform transform_;
  std::atomic<int> calls_{0};
  std::atomic<int> failures_remaining_{0};
  bool fail_rate_limited_ = false;
};

// The fixture contraction-expansion transform (can't -> cannot, i'm -> i am, ...).
std::string expand_contractions(const std::string& text);

struct ProviderBinding {
  std::string model_id;
  std::string endpoint;        // e.g. https://api.example.com/v1/chat/completions
  std::string credential_env;  // environment variable holding the API key
  int requests_per_minute = 60;
  int max_attempts = 3;
  std::vector<int> backoff_ms = {250, 1000, 4000};
};

// OpenAI-style chat-completions adapter over the binding's endpoint.
// Credentials are read from the named environment variable per request and
// never serialized anywhere.
class HttpProvider : public Provider {
 public:
  explicit HttpProvider(ProviderBinding binding);

  std::string complete(const std::string& prompt,
                       const CompletionParams& params) override;

 private:
  ProviderBinding binding_;
  std::mutex mutex_;
  std::chrono::steady_clock::time_point last_request_{};
};

// Content-addressed flat-file cache: <dir>/<first-2-hex>/<hash>.json holding
// request echo + completion + timestamp. Writes are atomic (temp + rename).
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir);

  std::optional<std::string> get_completion(const std::string& key) const;
  void put(const std::string& key, const RewriteRequest& request,
           const std::string& completion) const;
  std::filesystem::path path_for(const std::string& key) const;
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

// Deterministic content hash of (document text, model, condition,
// temperature, pass).
std::string cache_key(const RewriteRequest& request);

struct RetryPolicy {
  int max_attempts = 3;
  std::vector<int> backoff_ms = {250, 1000, 4000};
};

// One rewrite with cache lookup and retry. Returns the rewrite document
// (id derived from the cell key, source inherited from the original).
Document rewrite(const RewriteRequest& request, Provider& provider,
                 ResponseCache* cache = nullptr, const RetryPolicy& retry = {},
                 PromptPlacement placement = PromptPlacement::User);

struct ProviderHandle {
  std::shared_ptr<Provider> provider;
  RetryPolicy retry;
};

using ProviderRegistry = std::map<std::string, ProviderHandle>;  // by model_id

ProviderHandle make_http_provider(const ProviderBinding& binding);

struct RewriteCell {
  std::string original_id;
  std::string model_id;
  PromptCondition condition = PromptCondition::Generic;
  int pass_index = 0;
};

struct CellError {
  RewriteCell cell;
  std::string message;
};

struct BatchResult {
  PairedCorpus corpus;
  std::vector<CellError> errors;
};

// Full (originals x models x conditions x passes) cross with resumability:
// cached cells are served without provider calls, failed cells are recorded
// and the run continues. Output order is by sorted cell key, independent of
// input order.
BatchResult batch_rewrite(const std::vector<Document>& originals,
                          const std::vector<std::string>& model_ids,
                          const std::vector<PromptCondition>& conditions,
                          int passes, const ProviderRegistry& providers,
                          ResponseCache* cache = nullptr,
                          double temperature = 0.7, int max_tokens = 4096,
                          PromptPlacement placement = PromptPlacement::User);

}  // namespace styledrift
