#include "styledrift/markers.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>

#include "styledrift/error.hpp"

namespace styledrift {

namespace {

constexpr std::array<std::string_view, kMarkerCount> kMarkerNames = {
    "function_word_ratio",
    "mfw_coverage",
    "yules_k",
    "honores_r",
    "mtld",
    "mean_word_length",
    "char_trigram_entropy",
    "mean_sentence_length",
    "comma_per_100",
    "dash_per_100",
    "contraction_per_100",
    "first_person_per_100",
    "emotion_per_100",
    "eventive_clause_density",
    "first_person_eventive_per_sentence",
    "causal_per_sentence",
    "retrospective_per_sentence",
    "abstraction_per_100",
};

void require_words(const TokenStream& tokens) {
  if (tokens.word_tokens.empty()) {
    throw Error(ErrorCode::EmptyText, "no word tokens");
  }
}

std::unordered_map<std::string, std::size_t> frequency_profile(
    const std::vector<std::string>& tokens) {
  std::unordered_map<std::string, std::size_t> freq;
  for (const std::string& tok : tokens) ++freq[tok];
  return freq;
}

bool is_dash_token(const std::string& tok) {
  if (tok == "—" || tok == "–") return true;
  if (tok.size() >= 2) {
    return std::all_of(tok.begin(), tok.end(), [](char c) { return c == '-'; });
  }
  return false;
}

constexpr std::array<std::string_view, 7> kClitics = {"'t", "'s", "'d", "'ll",
                                                      "'re", "'ve", "'m"};

bool is_contraction(const std::string& token) {
  for (std::string_view clitic : kClitics) {
    if (token.size() > clitic.size() &&
        token.compare(token.size() - clitic.size(), clitic.size(), clitic) == 0) {
      return true;
    }
  }
  return false;
}

const std::unordered_set<std::string>& coordinating_conjunctions() {
  static const std::unordered_set<std::string> kConj = {"and", "but", "or", "so"};
  return kConj;
}

const std::unordered_set<std::string>& subject_pronouns() {
  static const std::unordered_set<std::string> kSubj = {"i",  "he",   "she", "we",
                                                        "they", "it", "you"};
  return kSubj;
}

}  // namespace

std::string_view marker_name(Marker marker) {
  return kMarkerNames[static_cast<std::size_t>(marker)];
}

std::optional<Marker> parse_marker(std::string_view name) {
  for (std::size_t i = 0; i < kMarkerCount; ++i) {
    if (kMarkerNames[i] == name) return static_cast<Marker>(i);
  }
  return std::nullopt;
}

MarkerCategory marker_category(Marker marker) {
  switch (marker) {
    case Marker::FunctionWordRatio:
    case Marker::MfwCoverage:
      return MarkerCategory::FunctionWords;
    case Marker::YulesK:
    case Marker::HonoresR:
    case Marker::Mtld:
    case Marker::MeanWordLength:
    case Marker::CharTrigramEntropy:
      return MarkerCategory::Vocabulary;
    case Marker::MeanSentenceLength:
    case Marker::CommaPer100:
    case Marker::DashPer100:
      return MarkerCategory::SyntaxPunctuation;
    case Marker::ContractionPer100:
    case Marker::FirstPersonPer100:
    case Marker::EmotionPer100:
      return MarkerCategory::Register;
    default:
      return MarkerCategory::Stance;
  }
}

const std::array<Marker, kMarkerCount>& all_markers() {
  static const std::array<Marker, kMarkerCount> kAll = [] {
    std::array<Marker, kMarkerCount> a{};
    for (std::size_t i = 0; i < kMarkerCount; ++i) a[i] = static_cast<Marker>(i);
    return a;
  }();
  return kAll;
}

MfwSet build_mfw_set(const std::vector<Document>& originals, std::size_t k) {
  std::map<std::string, std::size_t> freq;  // ordered for tie stability
  for (const Document& doc : originals) {
    for (const std::string& tok : tokenize(doc.text).word_tokens) ++freq[tok];
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(freq.begin(), freq.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  MfwSet mfw;
  mfw.vocabulary_size = ranked.size();
  const std::size_t take = std::min(k, ranked.size());
  for (std::size_t i = 0; i < take; ++i) mfw.words.insert(ranked[i].first);
  return mfw;
}

MfwSet build_mfw_set(const TokenStream& tokens, std::size_t k) {
  std::map<std::string, std::size_t> freq;
  for (const std::string& tok : tokens.word_tokens) ++freq[tok];
  std::vector<std::pair<std::string, std::size_t>> ranked(freq.begin(), freq.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  MfwSet mfw;
  mfw.vocabulary_size = ranked.size();
  const std::size_t take = std::min(k, ranked.size());
  for (std::size_t i = 0; i < take; ++i) mfw.words.insert(ranked[i].first);
  return mfw;
}

double function_word_ratio(const TokenStream& tokens, const Lexicon& function_lexicon) {
  require_words(tokens);
  std::size_t hits = 0;
  for (const std::string& tok : tokens.word_tokens) {
    if (function_lexicon.entries.count(tok) > 0) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(tokens.word_count());
}

double mfw_coverage(const TokenStream& tokens, const MfwSet& mfw) {
  require_words(tokens);
  const bool small_vocab = mfw.vocabulary_size < 50;
  if (!small_vocab && mfw.words.size() != 50) {
    throw Error(ErrorCode::MfwSetWrongSize,
                "expected 50 most frequent words, got " +
                    std::to_string(mfw.words.size()));
  }
  if (small_vocab && mfw.words.size() != mfw.vocabulary_size) {
    throw Error(ErrorCode::MfwSetWrongSize,
                "small-vocabulary MFW set must hold the full vocabulary");
  }
  std::size_t hits = 0;
  for (const std::string& tok : tokens.word_tokens) {
    if (mfw.words.count(tok) > 0) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(tokens.word_count());
}

double yules_k(const TokenStream& tokens) {
  require_words(tokens);
  const double n = static_cast<double>(tokens.word_count());
  if (tokens.word_count() < 2) {
    throw Error(ErrorCode::TextTooShort, "Yule's K requires at least 2 tokens");
  }
  double sum_f2 = 0.0;
  for (const auto& [tok, f] : frequency_profile(tokens.word_tokens)) {
    sum_f2 += static_cast<double>(f) * static_cast<double>(f);
  }
  return 1e4 * (sum_f2 - n) / (n * n);
}

MarkerResult honores_r(const TokenStream& tokens) {
  require_words(tokens);
  if (tokens.word_count() < 2) {
    throw Error(ErrorCode::TextTooShort, "Honore's R requires at least 2 tokens");
  }
  const auto freq = frequency_profile(tokens.word_tokens);
  const double v = static_cast<double>(freq.size());
  double v1 = 0.0;
  for (const auto& [tok, f] : freq) {
    if (f == 1) v1 += 1.0;
  }
  double ratio = v1 / v;
  bool degenerate = false;
  if (ratio >= 1.0) {
    ratio = 1.0 - 1e-6;  // all-hapax singularity clamp
    degenerate = true;
  }
  const double n = static_cast<double>(tokens.word_count());
  return {100.0 * std::log(n) / (1.0 - ratio), degenerate};
}

namespace {

constexpr double kMtldThreshold = 0.72;

MarkerResult mtld_one_direction(const std::vector<std::string>& tokens) {
  double factors = 0.0;
  std::unordered_set<std::string> types;
  std::size_t count = 0;
  for (const std::string& tok : tokens) {
    types.insert(tok);
    ++count;
    const double ttr = static_cast<double>(types.size()) / static_cast<double>(count);
    if (ttr <= kMtldThreshold) {
      factors += 1.0;
      types.clear();
      count = 0;
    }
  }
  if (count > 0) {
    const double ttr = static_cast<double>(types.size()) / static_cast<double>(count);
    factors += (1.0 - ttr) / (1.0 - kMtldThreshold);
  }
  const double n = static_cast<double>(tokens.size());
  if (factors < 1e-9) return {n, true};  // TTR never dropped
  return {n / factors, false};
}

}  // namespace

MarkerResult mtld(const TokenStream& tokens) {
  require_words(tokens);
  MarkerResult forward = mtld_one_direction(tokens.word_tokens);
  std::vector<std::string> reversed(tokens.word_tokens.rbegin(),
                                    tokens.word_tokens.rend());
  MarkerResult backward = mtld_one_direction(reversed);
  MarkerResult result;
  result.value = 0.5 * (forward.value + backward.value);
  result.degenerate =
      forward.degenerate || backward.degenerate || tokens.word_count() < 10;
  return result;
}

double mean_word_length(const TokenStream& tokens) {
  require_words(tokens);
  std::size_t chars = 0;
  for (const std::string& tok : tokens.word_tokens) chars += codepoint_count(tok);
  return static_cast<double>(chars) / static_cast<double>(tokens.word_count());
}

double mean_sentence_length(const TokenStream& tokens) {
  require_words(tokens);
  if (tokens.sentence_spans.empty()) {
    throw Error(ErrorCode::EmptyText, "no sentences");
  }
  return static_cast<double>(tokens.word_count()) /
         static_cast<double>(tokens.sentence_count());
}

double char_trigram_entropy(std::string_view text) {
  const auto counts = char_ngrams(text, 3);
  double total = 0.0;
  for (const auto& [gram, c] : counts) total += static_cast<double>(c);
  double entropy = 0.0;
  for (const auto& [gram, c] : counts) {
    const double p = static_cast<double>(c) / total;
    entropy -= p * std::log2(p);
  }
  return entropy < 0.0 ? 0.0 : entropy;
}

double punct_per_100(const TokenStream& tokens, PunctMark mark) {
  require_words(tokens);
  std::size_t hits = 0;
  for (const std::string& tok : tokens.punct_tokens) {
    if (mark == PunctMark::Comma ? tok == "," : is_dash_token(tok)) ++hits;
  }
  return 100.0 * static_cast<double>(hits) / static_cast<double>(tokens.word_count());
}

double contraction_per_100(const TokenStream& tokens) {
  require_words(tokens);
  std::size_t hits = 0;
  for (const std::string& tok : tokens.word_tokens) {
    if (is_contraction(tok)) ++hits;
  }
  return 100.0 * static_cast<double>(hits) / static_cast<double>(tokens.word_count());
}

double lexicon_per_100(const TokenStream& tokens, const Lexicon& lexicon) {
  require_words(tokens);
  if (lexicon.entries.empty()) {
    throw Error(ErrorCode::InvalidArgument,
                "lexicon '" + lexicon.name + "' has no entries");
  }
  std::size_t hits = 0;
  for (const std::string& tok : tokens.word_tokens) {
    if (lexicon.entries.count(tok) > 0) ++hits;
  }
  return 100.0 * static_cast<double>(hits) / static_cast<double>(tokens.word_count());
}

double suffix_per_100(const TokenStream& tokens, const Lexicon& suffix_lexicon) {
  require_words(tokens);
  std::size_t hits = 0;
  for (const std::string& tok : tokens.word_tokens) {
    const std::size_t tok_len = codepoint_count(tok);
    for (const std::string& suffix : suffix_lexicon.suffixes) {
      if (tok_len >= suffix.size() + 2 && tok.size() >= suffix.size() &&
          tok.compare(tok.size() - suffix.size(), suffix.size(), suffix) == 0) {
        ++hits;
        break;
      }
    }
  }
  return 100.0 * static_cast<double>(hits) / static_cast<double>(tokens.word_count());
}

double phrase_per_sentence(const TokenStream& tokens, const Lexicon& phrase_lexicon) {
  require_words(tokens);
  if (tokens.sentence_spans.empty()) {
    throw Error(ErrorCode::EmptyText, "no sentences");
  }
  const auto& words = tokens.word_tokens;
  std::size_t matches = 0;
  std::size_t i = 0;
  while (i < words.size()) {
    std::size_t matched = 0;
    for (const auto& phrase : phrase_lexicon.phrases) {  // longest first
      if (phrase.size() > words.size() - i) continue;
      if (std::equal(phrase.begin(), phrase.end(), words.begin() + i)) {
        matched = phrase.size();
        break;
      }
    }
    if (matched > 0) {
      ++matches;
      i += matched;
    } else {
      ++i;
    }
  }
  return static_cast<double>(matches) / static_cast<double>(tokens.sentence_count());
}

namespace {

// Clause boundaries inside one sentence: word indices the next clause starts at.
std::vector<std::pair<std::size_t, std::size_t>> split_clauses(
    const TokenStream& tokens, const SentenceSpan& span) {
  std::set<std::size_t> cuts;
  for (std::size_t p = 0; p < tokens.punct_tokens.size(); ++p) {
    const std::size_t w = tokens.punct_word_index[p];
    if (w <= span.begin || w >= span.end) continue;
    const std::string& tok = tokens.punct_tokens[p];
    if (tok == "," || tok == ";" || tok == ":" || is_dash_token(tok)) cuts.insert(w);
  }
  for (std::size_t w = span.begin + 1; w + 1 < span.end; ++w) {
    if (coordinating_conjunctions().count(tokens.word_tokens[w]) > 0 &&
        subject_pronouns().count(tokens.word_tokens[w + 1]) > 0) {
      cuts.insert(w);
    }
  }
  std::vector<std::pair<std::size_t, std::size_t>> clauses;
  std::size_t start = span.begin;
  for (std::size_t cut : cuts) {
    if (cut > start) clauses.push_back({start, cut});
    start = cut;
  }
  if (span.end > start) clauses.push_back({start, span.end});
  return clauses;
}

}  // namespace

double eventive_clause_density(const TokenStream& tokens,
                               const Lexicon& eventive_lexicon) {
  require_words(tokens);
  if (tokens.sentence_spans.empty()) {
    throw Error(ErrorCode::EmptyText, "no sentences");
  }
  std::size_t total = 0;
  std::size_t eventive = 0;
  for (const SentenceSpan& span : tokens.sentence_spans) {
    for (const auto& [begin, end] : split_clauses(tokens, span)) {
      ++total;
      for (std::size_t w = begin; w < end; ++w) {
        if (eventive_lexicon.entries.count(tokens.word_tokens[w]) > 0) {
          ++eventive;
          break;
        }
      }
    }
  }
  return static_cast<double>(eventive) / static_cast<double>(total);
}

double first_person_eventive_per_sentence(const TokenStream& tokens,
                                          const Lexicon& first_person_lexicon,
                                          const Lexicon& eventive_lexicon) {
  require_words(tokens);
  if (tokens.sentence_spans.empty()) {
    throw Error(ErrorCode::EmptyText, "no sentences");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i + 1 < tokens.word_tokens.size(); ++i) {
    if (first_person_lexicon.entries.count(tokens.word_tokens[i]) > 0 &&
        eventive_lexicon.entries.count(tokens.word_tokens[i + 1]) > 0) {
      ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(tokens.sentence_count());
}

MarkerVector compute_marker_vector(const Document& doc,
                                   const MarkerResources& resources) {
  const TokenStream tokens = tokenize(doc.text);
  return compute_marker_vector(tokens, doc.text, resources);
}

MarkerVector compute_marker_vector(const TokenStream& tokens, std::string_view text,
                                   const MarkerResources& resources) {
  require_words(tokens);
  MarkerVector v;

  auto guarded = [&](Marker m, auto&& fn) {
    try {
      v.set(m, fn(), false);
    } catch (const Error&) {
      v.set(m, 0.0, true);
    }
  };
  auto guarded_flagged = [&](Marker m, auto&& fn) {
    try {
      MarkerResult r = fn();
      v.set(m, r.value, r.degenerate);
    } catch (const Error&) {
      v.set(m, 0.0, true);
    }
  };

  guarded(Marker::FunctionWordRatio,
          [&] { return function_word_ratio(tokens, resources.function_words); });
  guarded(Marker::MfwCoverage, [&] {
    if (resources.mfw_scope == MfwScope::PerText) {
      return mfw_coverage(tokens, build_mfw_set(tokens));
    }
    return mfw_coverage(tokens, resources.corpus_mfw);
  });
  guarded(Marker::YulesK, [&] { return yules_k(tokens); });
  guarded_flagged(Marker::HonoresR, [&] { return honores_r(tokens); });
  guarded_flagged(Marker::Mtld, [&] { return mtld(tokens); });
  guarded(Marker::MeanWordLength, [&] { return mean_word_length(tokens); });
  guarded(Marker::CharTrigramEntropy, [&] { return char_trigram_entropy(text); });
  guarded(Marker::MeanSentenceLength, [&] { return mean_sentence_length(tokens); });
  guarded(Marker::CommaPer100, [&] { return punct_per_100(tokens, PunctMark::Comma); });
  guarded(Marker::DashPer100, [&] { return punct_per_100(tokens, PunctMark::Dash); });
  guarded(Marker::ContractionPer100, [&] { return contraction_per_100(tokens); });
  guarded(Marker::FirstPersonPer100,
          [&] { return lexicon_per_100(tokens, resources.first_person); });
  guarded(Marker::EmotionPer100,
          [&] { return lexicon_per_100(tokens, resources.emotion); });
  guarded(Marker::EventiveClauseDensity,
          [&] { return eventive_clause_density(tokens, resources.eventive); });
  guarded(Marker::FirstPersonEventivePerSentence, [&] {
    return first_person_eventive_per_sentence(tokens, resources.first_person,
                                              resources.eventive);
  });
  guarded(Marker::CausalPerSentence,
          [&] { return phrase_per_sentence(tokens, resources.causal); });
  guarded(Marker::RetrospectivePerSentence,
          [&] { return phrase_per_sentence(tokens, resources.retrospective); });
  guarded(Marker::AbstractionPer100,
          [&] { return suffix_per_100(tokens, resources.abstract_suffixes); });

  return v;
}

}  // namespace styledrift
