#include <doctest.h>

#include "styledrift/error.hpp"
#include "styledrift/text.hpp"

#include "support/fixtures.hpp"

using namespace styledrift;

TEST_CASE("tokenize splits words, contractions, and punctuation") {
  const TokenStream ts = tokenize("I can't stop crying.");
  CHECK(ts.word_tokens == std::vector<std::string>{"i", "can't", "stop", "crying"});
  CHECK(ts.punct_tokens == std::vector<std::string>{"."});
  REQUIRE(ts.sentence_spans.size() == 1);
  CHECK(ts.sentence_spans[0].begin == 0);
  CHECK(ts.sentence_spans[0].end == 4);
}

TEST_CASE("tokenize sentence boundaries at terminal + whitespace + uppercase") {
  const TokenStream ts = tokenize("He said hi. She left.");
  CHECK(ts.word_count() == 5);
  CHECK(ts.sentence_count() == 2);
  CHECK(ts.sentence_spans[0].end == 3);
  CHECK(ts.sentence_spans[1].begin == 3);
}

TEST_CASE("abbreviation stoplist suppresses sentence splits") {
  CHECK(tokenize("Dr. Smith arrived.").sentence_count() == 1);
  CHECK(tokenize("I met Mr. Jones. He waved.").sentence_count() == 2);
  CHECK(tokenize("Use apples, e.g. Galas, for pie.").sentence_count() == 1);
}

TEST_CASE("lowercase terminal continuation does not split") {
  // "etc. and" - no uppercase follows, so no boundary
  CHECK(tokenize("We bought pears etc. and left. Then we slept.").sentence_count() == 2);
}

TEST_CASE("hyphen runs become one dash token, single hyphens do not") {
  const TokenStream ts = tokenize("wait -- no");
  REQUIRE(ts.punct_tokens.size() == 1);
  CHECK(ts.punct_tokens[0] == "--");
  CHECK(ts.word_tokens == std::vector<std::string>{"wait", "no"});

  const TokenStream hyphenated = tokenize("a well-known story");
  CHECK(hyphenated.word_tokens ==
        std::vector<std::string>{"a", "well", "known", "story"});
  REQUIRE(hyphenated.punct_tokens.size() == 1);
  CHECK(hyphenated.punct_tokens[0] == "-");
}

TEST_CASE("unicode apostrophes and dashes are handled") {
  const TokenStream ts = tokenize("I can’t stay — sorry.");
  CHECK(ts.word_tokens == std::vector<std::string>{"i", "can't", "stay", "sorry"});
  CHECK(ts.punct_tokens[0] == "—");
}

TEST_CASE("punct_word_index records the word each punct precedes") {
  const TokenStream ts = tokenize("Looking back, I smiled.");
  REQUIRE(ts.punct_tokens.size() == 2);  // comma and period
  CHECK(ts.punct_tokens[0] == ",");
  CHECK(ts.punct_word_index[0] == 2);  // after "looking back"
  CHECK(ts.punct_word_index[1] == 4);
}

TEST_CASE("tokenize rejects empty text") {
  CHECK_THROWS_AS(tokenize(""), Error);
}

TEST_CASE("tokenize word tokens are idempotent under re-tokenization") {
  const char* samples[] = {
      fixtures::kGoldenText,
      "It's a well-known fact -- really! Ask Dr. Brown.",
      "numbers 123 and x1y2, plus can't-type things",
  };
  for (const char* sample : samples) {
    const TokenStream first = tokenize(sample);
    std::string joined;
    for (std::size_t i = 0; i < first.word_tokens.size(); ++i) {
      if (i) joined += " ";
      joined += first.word_tokens[i];
    }
    const TokenStream second = tokenize(joined);
    CHECK(second.word_tokens == first.word_tokens);
  }
}

TEST_CASE("sentence spans partition the word range") {
  const TokenStream ts = tokenize(fixtures::kGoldenText);
  REQUIRE(ts.sentence_count() == 3);
  std::size_t expected_begin = 0;
  for (const SentenceSpan& span : ts.sentence_spans) {
    CHECK(span.begin == expected_begin);
    CHECK(span.end > span.begin);
    expected_begin = span.end;
  }
  CHECK(expected_begin == ts.word_count());
}

TEST_CASE("char_ngrams counts sliding windows") {
  const auto aaa = char_ngrams("aaaa", 3);
  REQUIRE(aaa.size() == 1);
  CHECK(aaa.at("aaa") == 2);

  const auto ab = char_ngrams("abab", 2);
  CHECK(ab.at("ab") == 2);
  CHECK(ab.at("ba") == 1);

  CHECK_THROWS_AS(char_ngrams("ab", 3), Error);
  try {
    char_ngrams("ab", 3);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TextTooShort);
  }
}

TEST_CASE("char_ngrams total equals normalized length minus n plus one") {
  const char* samples[] = {fixtures::kGoldenText, "one  two\tthree\nfour",
                           "ab cd ef gh"};
  for (const char* sample : samples) {
    for (int n : {2, 3, 4}) {
      const auto counts = char_ngrams(sample, n);
      std::size_t total = 0;
      for (const auto& [gram, count] : counts) total += count;
      const std::size_t len = codepoint_count(normalize_for_ngrams(sample));
      CHECK(total == len - static_cast<std::size_t>(n) + 1);
    }
  }
}

TEST_CASE("normalize_for_ngrams lowercases and collapses whitespace") {
  CHECK(normalize_for_ngrams("  A  b\t C\n") == "a b c");
  CHECK(normalize_for_ngrams("Keep, punct!") == "keep, punct!");
}

TEST_CASE("normalize_nfc composes combining sequences") {
  // e + COMBINING ACUTE ACCENT composes to U+00E9
  const std::string decomposed = "café";
  const std::string composed = normalize_nfc(decomposed);
  CHECK(composed == "café");
  CHECK(codepoint_count(composed) == 4);
}

TEST_CASE("wordlist lexicon loads entries with comments") {
  const std::string path = fixtures::scratch_dir("lexicon") + "/words.txt";
  fixtures::write_file(path, "# comment\nThe\na\n\nan\n");
  const Lexicon lex = load_lexicon(path, LexiconKind::Wordlist);
  CHECK(lex.entries == std::unordered_set<std::string>{"the", "a", "an"});
}

TEST_CASE("phraselist keeps multi-token phrases longest-first") {
  const std::string path = fixtures::scratch_dir("lexicon_p") + "/phrases.txt";
  fixtures::write_file(path, "looking back\nin retrospect\nbecause\n");
  const Lexicon lex = load_lexicon(path, LexiconKind::Phraselist);
  REQUIRE(lex.phrases.size() == 3);
  CHECK(lex.phrases[0].size() == 2);
  CHECK(lex.phrases[2] == std::vector<std::string>{"because"});
}

TEST_CASE("nrc format keeps words flagged 1 for a known affect") {
  const std::string path = fixtures::scratch_dir("lexicon_n") + "/nrc.txt";
  fixtures::write_file(path,
                       "abandon\tfear\t1\n"
                       "abandon\tjoy\t0\n"
                       "table\ttrust\t0\n");
  const Lexicon lex = load_lexicon(path, LexiconKind::NrcFormat);
  CHECK(lex.entries.count("abandon") == 1);
  CHECK(lex.entries.count("table") == 0);
}

TEST_CASE("malformed lexicon lines carry the line number") {
  const std::string path = fixtures::scratch_dir("lexicon_m") + "/bad.txt";
  fixtures::write_file(path, "good\tfear\t1\nbroken line here\n");
  try {
    load_lexicon(path, LexiconKind::NrcFormat);
    FAIL("expected MalformedLexiconLine");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MalformedLexiconLine);
    CHECK(std::string(e.what()).find(":2") != std::string::npos);
  }
}

TEST_CASE("lexicon loading is order-insensitive") {
  const std::string dir = fixtures::scratch_dir("lexicon_o");
  fixtures::write_file(dir + "/a.txt", "one\ntwo\nthree\n");
  fixtures::write_file(dir + "/b.txt", "three\none\ntwo\n");
  const Lexicon a = load_lexicon(dir + "/a.txt", LexiconKind::Wordlist);
  const Lexicon b = load_lexicon(dir + "/b.txt", LexiconKind::Wordlist);
  CHECK(a.entries == b.entries);
}
