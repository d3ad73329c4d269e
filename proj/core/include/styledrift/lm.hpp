#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace styledrift {

// Pluggable perplexity scorer: per-token natural-log probabilities, same
// length as the input token sequence. External providers (neural LMs)
// implement this interface; NgramLm is the built-in reference scorer.
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual std::vector<double> token_log_probs(
      const std::vector<std::string>& tokens) const = 0;
};

// Word-level n-gram model with additive smoothing over a closed vocabulary;
// out-of-vocabulary tokens map to a reserved unknown symbol.
class NgramLm : public Scorer {
 public:
  static constexpr const char* kUnknown = "<unk>";
  static constexpr const char* kBoundary = "<s>";

  NgramLm(int order, double smoothing);

  void add_text(std::string_view text);     // tokenizes and trains
  void add_tokens(const std::vector<std::string>& tokens);

  std::vector<double> token_log_probs(
      const std::vector<std::string>& tokens) const override;

  int order() const { return order_; }
  std::size_t vocabulary_size() const { return vocabulary_.size(); }

 private:
  std::string map_token(const std::string& token) const;

  int order_;
  double smoothing_;
  std::unordered_map<std::string, std::size_t> vocabulary_;
  std::unordered_map<std::string, std::size_t> context_counts_;
  std::unordered_map<std::string, std::size_t> ngram_counts_;
};

// Order-3, add-0.1 smoothing: the built-in reference configuration.
NgramLm train_ngram_lm(const std::vector<std::string>& corpus_texts, int order = 3,
                       double smoothing = 0.1);

// exp(-mean per-token natural-log probability); always >= 1 for proper
// distributions. Throws EmptyText for token-free input.
double perplexity(const Scorer& scorer, const std::vector<std::string>& tokens);
double perplexity(const Scorer& scorer, std::string_view text);

}  // namespace styledrift
