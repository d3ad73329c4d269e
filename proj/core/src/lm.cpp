#include "styledrift/lm.hpp"

#include <cmath>

#include "styledrift/error.hpp"
#include "styledrift/text.hpp"

namespace styledrift {

namespace {

constexpr char kSep = '\x1f';

std::string join_context(const std::vector<std::string>& window) {
  std::string key;
  for (const std::string& tok : window) {
    key += tok;
    key += kSep;
  }
  return key;
}

}  // namespace

NgramLm::NgramLm(int order, double smoothing)
    : order_(order), smoothing_(smoothing) {
  if (order < 1) {
    throw Error(ErrorCode::InvalidArgument, "n-gram order must be >= 1");
  }
  if (smoothing <= 0.0) {
    throw Error(ErrorCode::InvalidArgument, "smoothing must be positive");
  }
  vocabulary_[kUnknown] = 0;  // reserved unknown symbol closes the vocabulary
}

void NgramLm::add_text(std::string_view text) {
  add_tokens(tokenize(text).word_tokens);
}

void NgramLm::add_tokens(const std::vector<std::string>& tokens) {
  if (tokens.empty()) return;
  for (const std::string& tok : tokens) ++vocabulary_[tok];

  std::vector<std::string> window(static_cast<std::size_t>(order_ - 1), kBoundary);
  for (const std::string& tok : tokens) {
    const std::string context = join_context(window);
    ++context_counts_[context];
    ++ngram_counts_[context + tok];
    if (order_ > 1) {
      window.erase(window.begin());
      window.push_back(tok);
    }
  }
}

std::string NgramLm::map_token(const std::string& token) const {
  return vocabulary_.count(token) > 0 ? token : std::string(kUnknown);
}

std::vector<double> NgramLm::token_log_probs(
    const std::vector<std::string>& tokens) const {
  const double v = static_cast<double>(vocabulary_.size());
  std::vector<double> log_probs;
  log_probs.reserve(tokens.size());

  std::vector<std::string> window(static_cast<std::size_t>(order_ - 1), kBoundary);
  for (const std::string& raw : tokens) {
    const std::string tok = map_token(raw);
    const std::string context = join_context(window);
    double context_count = 0.0;
    if (auto it = context_counts_.find(context); it != context_counts_.end()) {
      context_count = static_cast<double>(it->second);
    }
    double ngram_count = 0.0;
    if (auto it = ngram_counts_.find(context + tok); it != ngram_counts_.end()) {
      ngram_count = static_cast<double>(it->second);
    }
    const double p =
        (ngram_count + smoothing_) / (context_count + smoothing_ * v);
    log_probs.push_back(std::log(p));
    if (order_ > 1) {
      window.erase(window.begin());
      window.push_back(tok);
    }
  }
  return log_probs;
}

NgramLm train_ngram_lm(const std::vector<std::string>& corpus_texts, int order,
                       double smoothing) {
  NgramLm lm(order, smoothing);
  for (const std::string& text : corpus_texts) lm.add_text(text);
  return lm;
}

double perplexity(const Scorer& scorer, const std::vector<std::string>& tokens) {
  if (tokens.empty()) {
    throw Error(ErrorCode::EmptyText, "perplexity of an empty token sequence");
  }
  const std::vector<double> log_probs = scorer.token_log_probs(tokens);
  if (log_probs.size() != tokens.size()) {
    throw Error(ErrorCode::InvalidArgument,
                "scorer returned wrong number of log probabilities");
  }
  double total = 0.0;
  for (double lp : log_probs) total += lp;
  return std::exp(-total / static_cast<double>(tokens.size()));
}

double perplexity(const Scorer& scorer, std::string_view text) {
  return perplexity(scorer, tokenize(text).word_tokens);
}

}  // namespace styledrift
