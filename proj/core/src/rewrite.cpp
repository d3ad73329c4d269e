#include "styledrift/rewrite.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "internal/hash.hpp"
#include "styledrift/error.hpp"
#include "styledrift/text.hpp"

namespace styledrift {

namespace {

using nlohmann::json;

constexpr const char* kGenericPrompt =
    "Please improve the following story while preserving its meaning.";
constexpr const char* kVoicePrompt =
    "Please improve the following story while preserving the author's voice "
    "and emotional tone.";
constexpr const char* kRewriteOnlyPrompt = "Please rewrite the following story.";

std::string build_prompt(const RewriteRequest& request) {
  return canonical_prompt(request.condition) + "\n\n" + request.document.text;
}

std::string format_double(double value) {
  std::ostringstream ss;
  ss.precision(17);
  ss << value;
  return ss.str();
}

}  // namespace

const std::string& canonical_prompt(PromptCondition condition) {
  static const std::string kGeneric = kGenericPrompt;
  static const std::string kVoice = kVoicePrompt;
  static const std::string kRewriteOnly = kRewriteOnlyPrompt;
  switch (condition) {
    case PromptCondition::Generic: return kGeneric;
    case PromptCondition::VoicePreserving: return kVoice;
    case PromptCondition::RewriteOnly: return kRewriteOnly;
  }
  return kGeneric;
}

MockProvider::MockProvider() : transform_([](const std::string& s) { return s; }) {}

MockProvider::MockProvider(Transform transform) : transform_(std::move(transform)) {}

std::string MockProvider::complete(const std::string& prompt,
                                   const CompletionParams& params) {
  (void)params;
  calls_.fetch_add(1);
  if (failures_remaining_.load() > 0) {
    failures_remaining_.fetch_sub(1);
    if (fail_rate_limited_) {
      throw Error(ErrorCode::RateLimited, "mock provider rate limit");
    }
    throw Error(ErrorCode::ProviderError, "mock provider transient failure");
  }
  const std::size_t sep = prompt.find("\n\n");
  const std::string document =
      sep == std::string::npos ? prompt : prompt.substr(sep + 2);
  return transform_(document);
}

void MockProvider::fail_next(int n, bool rate_limited) {
  failures_remaining_.store(n);
  fail_rate_limited_ = rate_limited;
}

std::string expand_contractions(const std::string& text) {
  static const std::map<std::string, std::string> kTable = {
      {"can't", "cannot"},       {"won't", "will not"},
      {"don't", "do not"},       {"doesn't", "does not"},
      {"didn't", "did not"},     {"isn't", "is not"},
      {"wasn't", "was not"},     {"aren't", "are not"},
      {"weren't", "were not"},   {"couldn't", "could not"},
      {"shouldn't", "should not"}, {"wouldn't", "would not"},
      {"haven't", "have not"},   {"hasn't", "has not"},
      {"hadn't", "had not"},     {"i'm", "i am"},
      {"i've", "i have"},        {"i'll", "i will"},
      {"i'd", "i would"},        {"it's", "it is"},
      {"that's", "that is"},     {"there's", "there is"},
      {"we're", "we are"},       {"we've", "we have"},
      {"we'd", "we would"},      {"we'll", "we will"},
      {"they're", "they are"},   {"they've", "they have"},
      {"you're", "you are"},     {"you've", "you have"},
      {"she's", "she is"},       {"he's", "he is"},
      {"let's", "let us"},       {"what's", "what is"},
  };

  auto is_word_byte = [](unsigned char c) {
    return std::isalnum(c) != 0 || c == '\'';
  };

  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_word_byte(static_cast<unsigned char>(text[i]))) {
      out.push_back(text[i]);
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && is_word_byte(static_cast<unsigned char>(text[j]))) ++j;
    std::string word = text.substr(i, j - i);
    std::string lowered = word;
    std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    auto it = kTable.find(lowered);
    if (it != kTable.end()) {
      std::string replacement = it->second;
      if (std::isupper(static_cast<unsigned char>(word[0])) != 0) {
        replacement[0] =
            static_cast<char>(std::toupper(static_cast<unsigned char>(replacement[0])));
      }
      out += replacement;
    } else {
      out += word;
    }
    i = j;
  }
  return out;
}

HttpProvider::HttpProvider(ProviderBinding binding) : binding_(std::move(binding)) {}

std::string HttpProvider::complete(const std::string& prompt,
                                   const CompletionParams& params) {
  const char* credential = nullptr;
  if (!binding_.credential_env.empty()) {
    credential = std::getenv(binding_.credential_env.c_str());
  }
  if (credential == nullptr || *credential == '\0') {
    throw Error(ErrorCode::ProviderError,
                "credential environment variable not set: " + binding_.credential_env);
  }

  // simple per-binding rate limit: enforce a minimum interval between calls
  if (binding_.requests_per_minute > 0) {
    std::lock_guard<std::mutex> lock(mutex_);
    const auto min_interval = std::chrono::milliseconds(
        60000 / std::max(1, binding_.requests_per_minute));
    const auto now = std::chrono::steady_clock::now();
    if (last_request_.time_since_epoch().count() != 0 &&
        now - last_request_ < min_interval) {
      std::this_thread::sleep_for(min_interval - (now - last_request_));
    }
    last_request_ = std::chrono::steady_clock::now();
  }

  // split the endpoint into scheme://host[:port] and path
  const std::size_t scheme_end = binding_.endpoint.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::ProviderError, "malformed endpoint: " + binding_.endpoint);
  }
  const std::size_t path_start = binding_.endpoint.find('/', scheme_end + 3);
  const std::string base = path_start == std::string::npos
                               ? binding_.endpoint
                               : binding_.endpoint.substr(0, path_start);
  const std::string path =
      path_start == std::string::npos ? "/" : binding_.endpoint.substr(path_start);

  json body;
  body["model"] = params.model_id;
  body["temperature"] = params.temperature;
  body["max_tokens"] = params.max_tokens;
  if (params.placement == PromptPlacement::System) {
    // instruction in the system message, story in the user message
    const std::size_t sep = prompt.find("\n\n");
    const std::string instruction =
        sep == std::string::npos ? prompt : prompt.substr(0, sep);
    const std::string story = sep == std::string::npos ? "" : prompt.substr(sep + 2);
    body["messages"] = json::array({
        json{{"role", "system"}, {"content", instruction}},
        json{{"role", "user"}, {"content", story}},
    });
  } else {
    body["messages"] =
        json::array({json{{"role", "user"}, {"content", prompt}}});
  }

  httplib::Client client(base);
  client.set_read_timeout(120, 0);
  httplib::Headers headers = {
      {"Authorization", std::string("Bearer ") + credential}};
  auto response = client.Post(path, headers, body.dump(), "application/json");

  if (!response) {
    throw Error(ErrorCode::ProviderError, "no response from " + base);
  }
  if (response->status == 429) {
    throw Error(ErrorCode::RateLimited, "429 from " + base);
  }
  if (response->status < 200 || response->status >= 300) {
    throw Error(ErrorCode::ProviderError,
                "status " + std::to_string(response->status) + ": " +
                    response->body.substr(0, 200));
  }

  json payload = json::parse(response->body, nullptr, false);
  if (payload.is_discarded()) {
    throw Error(ErrorCode::ProviderError, "unparseable completion payload");
  }
  try {
    return payload.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::ProviderError, "unexpected completion payload shape");
  }
}

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::filesystem::path ResponseCache::path_for(const std::string& key) const {
  return dir_ / key.substr(0, 2) / (key + ".json");
}

std::optional<std::string> ResponseCache::get_completion(const std::string& key) const {
  const std::filesystem::path path = path_for(key);
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  json record = json::parse(in, nullptr, false);
  if (record.is_discarded() || !record.contains("completion")) return std::nullopt;
  return record["completion"].get<std::string>();
}

void ResponseCache::put(const std::string& key, const RewriteRequest& request,
                        const std::string& completion) const {
  json record;
  record["request"] = {
      {"document_id", request.document.id},
      {"text", request.document.text},
      {"model_id", request.model_id},
      {"condition", to_string(request.condition)},
      {"temperature", request.temperature},
      {"max_tokens", request.max_tokens},
      {"pass", request.pass_index},
  };
  record["completion"] = completion;
  record["timestamp"] = static_cast<long long>(std::time(nullptr));

  const std::filesystem::path path = path_for(key);
  std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    out << record.dump(2) << '\n';
  }
  std::filesystem::rename(tmp, path);
}

std::string cache_key(const RewriteRequest& request) {
  std::string payload;
  payload += request.document.text;
  payload += '\x1f';
  payload += request.model_id;
  payload += '\x1f';
  payload += to_string(request.condition);
  payload += '\x1f';
  payload += format_double(request.temperature);
  payload += '\x1f';
  payload += std::to_string(request.pass_index);
  return internal::fnv1a64_hex(payload);
}

namespace {

std::string rewrite_doc_id(const RewriteRequest& request) {
  return request.document.id + "__" + request.model_id + "__" +
         to_string(request.condition) + "__p" + std::to_string(request.pass_index);
}

}  // namespace

Document rewrite(const RewriteRequest& request, Provider& provider,
                 ResponseCache* cache, const RetryPolicy& retry,
                 PromptPlacement placement) {
  const std::string key = cache_key(request);
  std::string completion;
  bool from_cache = false;

  if (cache != nullptr) {
    if (auto hit = cache->get_completion(key)) {
      completion = *hit;
      from_cache = true;
    }
  }

  if (!from_cache) {
    CompletionParams params;
    params.model_id = request.model_id;
    params.temperature = request.temperature;
    params.max_tokens = request.max_tokens;
    params.placement = placement;
    const std::string prompt = build_prompt(request);

    const int attempts = std::max(1, retry.max_attempts);
    for (int attempt = 1;; ++attempt) {
      try {
        completion = provider.complete(prompt, params);
        break;
      } catch (const Error& e) {
        const bool retryable = e.code() == ErrorCode::ProviderError ||
                               e.code() == ErrorCode::RateLimited;
        if (!retryable || attempt >= attempts) throw;
        int delay = 0;
        if (!retry.backoff_ms.empty()) {
          const std::size_t idx = std::min<std::size_t>(
              static_cast<std::size_t>(attempt - 1), retry.backoff_ms.size() - 1);
          delay = retry.backoff_ms[idx];
        }
        if (delay > 0) {
          std::this_thread::sleep_for(std::chrono::milliseconds(delay));
        }
      }
    }

    if (completion.empty()) {
      throw Error(ErrorCode::EmptyCompletion,
                  "provider returned an empty completion for '" +
                      request.document.id + "'");
    }
    if (cache != nullptr) cache->put(key, request, completion);
  }

  Document doc;
  doc.id = rewrite_doc_id(request);
  doc.text = normalize_nfc(completion);
  doc.source = request.document.source;
  doc.word_count = tokenize(doc.text).word_count();
  return doc;
}

ProviderHandle make_http_provider(const ProviderBinding& binding) {
  ProviderHandle handle;
  handle.provider = std::make_shared<HttpProvider>(binding);
  handle.retry.max_attempts = binding.max_attempts;
  handle.retry.backoff_ms = binding.backoff_ms;
  return handle;
}

BatchResult batch_rewrite(const std::vector<Document>& originals,
                          const std::vector<std::string>& model_ids,
                          const std::vector<PromptCondition>& conditions,
                          int passes, const ProviderRegistry& providers,
                          ResponseCache* cache, double temperature, int max_tokens,
                          PromptPlacement placement) {
  if (passes < 1) {
    throw Error(ErrorCode::InvalidArgument, "passes must be >= 1");
  }

  // deterministic cell order regardless of input order
  std::vector<const Document*> sorted_docs;
  for (const Document& doc : originals) sorted_docs.push_back(&doc);
  std::sort(sorted_docs.begin(), sorted_docs.end(),
            [](const Document* a, const Document* b) { return a->id < b->id; });
  std::vector<std::string> sorted_models = model_ids;
  std::sort(sorted_models.begin(), sorted_models.end());
  std::vector<PromptCondition> sorted_conditions = conditions;
  std::sort(sorted_conditions.begin(), sorted_conditions.end(),
            [](PromptCondition a, PromptCondition b) {
              return static_cast<int>(a) < static_cast<int>(b);
            });

  BatchResult result;
  result.corpus.originals = originals;
  std::sort(result.corpus.originals.begin(), result.corpus.originals.end(),
            [](const Document& a, const Document& b) { return a.id < b.id; });

  for (const Document* doc : sorted_docs) {
    for (const std::string& model : sorted_models) {
      for (PromptCondition condition : sorted_conditions) {
        for (int pass = 0; pass < passes; ++pass) {
          RewriteCell cell{doc->id, model, condition, pass};
          auto handle_it = providers.find(model);
          if (handle_it == providers.end()) {
            result.errors.push_back({cell, "no provider bound for model"});
            continue;
          }
          RewriteRequest request;
          request.document = *doc;
          request.model_id = model;
          request.condition = condition;
          request.temperature = temperature;
          request.max_tokens = max_tokens;
          request.pass_index = pass;
          try {
            Document rewritten =
                rewrite(request, *handle_it->second.provider, cache,
                        handle_it->second.retry, placement);
            DocumentPair pair;
            pair.original = *doc;
            pair.rewrite = std::move(rewritten);
            pair.model_id = model;
            pair.condition = condition;
            pair.pass_index = pass;
            result.corpus.pairs.push_back(std::move(pair));
          } catch (const Error& e) {
            result.errors.push_back({cell, e.what()});
          }
        }
      }
    }
  }
  return result;
}

}  // namespace styledrift
