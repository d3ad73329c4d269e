#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "styledrift/corpus.hpp"
#include "styledrift/text.hpp"

namespace styledrift {

// The 13 core stylometric markers followed by the 5 narrative-stance markers.
enum class Marker : int {
  FunctionWordRatio = 0,
  MfwCoverage,
  YulesK,
  HonoresR,
  Mtld,
  MeanWordLength,
  CharTrigramEntropy,
  MeanSentenceLength,
  CommaPer100,
  DashPer100,
  ContractionPer100,
  FirstPersonPer100,
  EmotionPer100,
  EventiveClauseDensity,
  FirstPersonEventivePerSentence,
  CausalPerSentence,
  RetrospectivePerSentence,
  AbstractionPer100,
};

inline constexpr std::size_t kMarkerCount = 18;
inline constexpr std::size_t kCoreMarkerCount = 13;

std::string_view marker_name(Marker marker);
std::optional<Marker> parse_marker(std::string_view name);

enum class MarkerCategory { FunctionWords, Vocabulary, SyntaxPunctuation, Register, Stance };

MarkerCategory marker_category(Marker marker);

inline bool is_core_marker(Marker marker) {
  return static_cast<int>(marker) < static_cast<int>(kCoreMarkerCount);
}

const std::array<Marker, kMarkerCount>& all_markers();

struct MarkerVector {
  std::array<double, kMarkerCount> values{};
  std::array<bool, kMarkerCount> degenerate{};

  double value(Marker m) const { return values[static_cast<std::size_t>(m)]; }
  bool is_degenerate(Marker m) const {
    return degenerate[static_cast<std::size_t>(m)];
  }
  void set(Marker m, double v, bool flag = false) {
    values[static_cast<std::size_t>(m)] = v;
    degenerate[static_cast<std::size_t>(m)] = flag;
  }
};

// Marker value plus a degeneracy flag for measures with a defined fallback
// (all-hapax Honore clamp, MTLD with no factor resets, short texts).
struct MarkerResult {
  double value = 0.0;
  bool degenerate = false;
};

enum class MfwScope { Corpus, PerText };

// Top-k most frequent words with the vocabulary size of the corpus they
// were built from (ties broken lexicographically).
struct MfwSet {
  std::unordered_set<std::string> words;
  std::size_t vocabulary_size = 0;
};

MfwSet build_mfw_set(const std::vector<Document>& originals, std::size_t k = 50);
MfwSet build_mfw_set(const TokenStream& tokens, std::size_t k = 50);

// --- individual markers ------------------------------------------------------

double function_word_ratio(const TokenStream& tokens, const Lexicon& function_lexicon);

// Throws MfwSetWrongSize when |set| != 50 unless the source vocabulary was
// smaller than 50 (then the full vocabulary is the reference set).
double mfw_coverage(const TokenStream& tokens, const MfwSet& mfw);

// K = 10^4 * (sum f_i^2 - N) / N^2 over the lowercased word-token profile.
double yules_k(const TokenStream& tokens);

// R = 100 * ln N / (1 - V1/V); all-hapax texts are clamped and flagged.
MarkerResult honores_r(const TokenStream& tokens);

// Bidirectional MTLD with the 0.72 TTR threshold and partial-factor
// remainder; mean of forward and backward passes. Texts where the TTR never
// drops yield N and are flagged, as are texts under 10 tokens.
MarkerResult mtld(const TokenStream& tokens);

double mean_word_length(const TokenStream& tokens);
double mean_sentence_length(const TokenStream& tokens);

// Shannon entropy in bits over the character-trigram distribution.
double char_trigram_entropy(std::string_view text);

enum class PunctMark { Comma, Dash };

// Dashes count U+2014, U+2013 and hyphen runs of length >= 2 (one run, one
// dash); single hyphens never count.
double punct_per_100(const TokenStream& tokens, PunctMark mark);

// Word tokens ending in an apostrophe clitic ('t 's 'd 'll 're 've 'm).
double contraction_per_100(const TokenStream& tokens);

double lexicon_per_100(const TokenStream& tokens, const Lexicon& lexicon);

// Tokens at least suffix+2 characters long ending in a listed suffix.
double suffix_per_100(const TokenStream& tokens, const Lexicon& suffix_lexicon);

// Non-overlapping greedy longest-match-first phrase matches per sentence.
double phrase_per_sentence(const TokenStream& tokens, const Lexicon& phrase_lexicon);

// Clauses split at {, ; : dash} and before coordinating conjunctions
// (and/but/or/so) followed by a subject pronoun; density of clauses holding
// at least one eventive verb form.
double eventive_clause_density(const TokenStream& tokens, const Lexicon& eventive_lexicon);

// Adjacent (first-person pronoun, eventive verb) word bigrams per sentence.
double first_person_eventive_per_sentence(const TokenStream& tokens,
                                          const Lexicon& first_person_lexicon,
                                          const Lexicon& eventive_lexicon);

// --- full vector --------------------------------------------------------------

struct MarkerResources {
  Lexicon function_words;
  Lexicon first_person;
  Lexicon emotion;
  Lexicon causal;             // phrases (single words are length-1 phrases)
  Lexicon retrospective;      // phrases
  Lexicon eventive;           // verb forms
  Lexicon abstract_suffixes;  // suffixes
  MfwSet corpus_mfw;
  MfwScope mfw_scope = MfwScope::Corpus;
};

// Computes all 18 markers. Per-marker failures (short text, degenerate
// measures) become flagged fields rather than failing the vector; only a
// document with no word tokens throws EmptyText.
MarkerVector compute_marker_vector(const Document& doc, const MarkerResources& resources);
MarkerVector compute_marker_vector(const TokenStream& tokens, std::string_view text,
                                   const MarkerResources& resources);

}  // namespace styledrift
