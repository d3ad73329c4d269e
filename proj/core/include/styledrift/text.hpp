#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace styledrift {

// Half-open index range over TokenStream::word_tokens.
struct SentenceSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct TokenStream {
  // Lowercased word tokens; contractions kept whole, apostrophe variants
  // folded to U+0027.
  std::vector<std::string> word_tokens;
  // Punctuation tokens with original codepoints. Runs of two or more
  // hyphens are kept as one token.
  std::vector<std::string> punct_tokens;
  // For each punct token, the number of word tokens emitted before it
  // (i.e. the word index it precedes).
  std::vector<std::size_t> punct_word_index;
  // Partition of [0, word_tokens.size()), no gaps or overlaps.
  std::vector<SentenceSpan> sentence_spans;

  std::size_t word_count() const { return word_tokens.size(); }
  std::size_t sentence_count() const { return sentence_spans.size(); }
};

// Unicode NFC normalization. Applied once at ingest; the tokenizer assumes
// already-normalized input.
std::string normalize_nfc(std::string_view text);

// Deterministic rule-based tokenizer and sentence splitter.
//
// Word tokens are maximal runs of letters/digits plus apostrophes internal
// to a word, case-folded. Punctuation is emitted separately. Sentence
// boundaries occur at {. ! ?} followed by whitespace and an uppercase
// letter, or at end of text, with a fixed abbreviation stoplist
// (mr. mrs. ms. dr. prof. sr. jr. st. vs. etc. e.g. i.e.).
TokenStream tokenize(std::string_view text);

// Substrate for character n-grams: lowercase, collapse whitespace runs to
// a single space, trim ends, keep punctuation codepoints.
std::string normalize_for_ngrams(std::string_view text);

// Sliding-window character n-grams (n in {2,3,4}) over the normalized
// character sequence. Counts sum to len - n + 1 (codepoint length).
// Throws TextTooShort when the normalized text has fewer than n codepoints.
std::map<std::string, std::size_t> char_ngrams(std::string_view text, int n);

// Number of Unicode codepoints in a UTF-8 string.
std::size_t codepoint_count(std::string_view text);

enum class LexiconKind { Wordlist, Phraselist, Suffixlist, NrcFormat };

struct Lexicon {
  std::string name;
  std::unordered_set<std::string> entries;              // single tokens
  std::vector<std::vector<std::string>> phrases;        // longest-first
  std::vector<std::string> suffixes;                    // word-final sequences

  bool contains(std::string_view token) const {
    return entries.find(std::string(token)) != entries.end();
  }
};

// Loads a lexicon file. Wordlist/phraselist/suffixlist are one entry per
// line with '#' comments; NrcFormat is word<TAB>affect<TAB>flag triples
// keeping words flagged 1 for any of the eight emotions or two sentiments.
// Throws MalformedLexiconLine with the offending line number.
Lexicon load_lexicon(const std::string& path, LexiconKind kind);

// In-memory constructors, mainly for tests and bundled defaults.
Lexicon lexicon_from_words(std::string name, const std::vector<std::string>& words);
Lexicon lexicon_from_phrases(std::string name, const std::vector<std::string>& phrase_lines);
Lexicon lexicon_from_suffixes(std::string name, const std::vector<std::string>& suffixes);

}  // namespace styledrift
