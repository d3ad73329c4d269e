#include "styledrift/text.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

#include "styledrift/error.hpp"

namespace styledrift {

namespace {

// --- minimal UTF-8 handling -------------------------------------------------

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// Decodes UTF-8; an invalid byte is promoted to its Latin-1 codepoint so the
// function is total.
std::vector<char32_t> decode_utf8(std::string_view text) {
  std::vector<char32_t> cps;
  cps.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    unsigned char b0 = static_cast<unsigned char>(text[i]);
    char32_t cp = 0;
    std::size_t len = 1;
    if (b0 < 0x80) {
      cp = b0;
    } else if ((b0 >> 5) == 0x6 && i + 1 < text.size()) {
      cp = b0 & 0x1F;
      len = 2;
    } else if ((b0 >> 4) == 0xE && i + 2 < text.size()) {
      cp = b0 & 0x0F;
      len = 3;
    } else if ((b0 >> 3) == 0x1E && i + 3 < text.size()) {
      cp = b0 & 0x07;
      len = 4;
    } else {
      cps.push_back(b0);
      ++i;
      continue;
    }
    bool valid = true;
    for (std::size_t k = 1; k < len; ++k) {
      unsigned char bk = static_cast<unsigned char>(text[i + k]);
      if ((bk >> 6) != 0x2) {
        valid = false;
        break;
      }
      cp = (cp << 6) | (bk & 0x3F);
    }
    if (!valid) {
      cps.push_back(b0);
      ++i;
    } else {
      cps.push_back(cp);
      i += len;
    }
  }
  return cps;
}

// --- codepoint classes (English-oriented; Latin ranges) ----------------------

bool is_ascii_alnum(char32_t cp) {
  return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') ||
         (cp >= '0' && cp <= '9');
}

bool is_word_char(char32_t cp) {
  if (is_ascii_alnum(cp)) return true;
  if (cp >= 0xC0 && cp <= 0xFF && cp != 0xD7 && cp != 0xF7) return true;  // Latin-1 letters
  if (cp >= 0x100 && cp <= 0x24F) return true;  // Latin Extended-A/B
  return false;
}

bool is_apostrophe(char32_t cp) { return cp == 0x27 || cp == 0x2019; }

bool is_space(char32_t cp) {
  switch (cp) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

bool is_upper(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return true;
  return cp >= 0xC0 && cp <= 0xDE && cp != 0xD7;
}

char32_t fold_case(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
  return cp;
}

bool is_terminal(char32_t cp) { return cp == '.' || cp == '!' || cp == '?'; }

const std::unordered_set<std::string>& abbreviation_stoplist() {
  static const std::unordered_set<std::string> kAbbrev = {
      "mr.", "mrs.", "ms.", "dr.", "prof.", "sr.", "jr.",
      "st.", "vs.", "etc.", "e.g.", "i.e.",
  };
  return kAbbrev;
}

std::string lowercase_token(const std::vector<char32_t>& cps, std::size_t begin,
                            std::size_t end) {
  std::string out;
  for (std::size_t i = begin; i < end; ++i) {
    char32_t cp = cps[i];
    if (is_apostrophe(cp)) cp = 0x27;
    append_utf8(out, fold_case(cp));
  }
  return out;
}

std::string trim_copy(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::string to_lower_ascii(std::string s) {
  std::vector<char32_t> cps = decode_utf8(s);
  std::string out;
  for (char32_t cp : cps) append_utf8(out, fold_case(cp));
  return out;
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> parts;
  std::istringstream iss(s);
  std::string w;
  while (iss >> w) parts.push_back(w);
  return parts;
}

}  // namespace

std::string normalize_nfc(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) {
    throw Error(ErrorCode::InvalidArgument, "ICU NFC normalizer unavailable");
  }
  icu::UnicodeString in = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  icu::UnicodeString normalized = nfc->normalize(in, status);
  if (U_FAILURE(status)) {
    throw Error(ErrorCode::InvalidArgument, "NFC normalization failed");
  }
  std::string out;
  normalized.toUTF8String(out);
  return out;
}

TokenStream tokenize(std::string_view text) {
  if (text.empty()) {
    throw Error(ErrorCode::EmptyText, "tokenize requires nonempty text");
  }
  const std::vector<char32_t> cps = decode_utf8(text);
  const std::size_t n = cps.size();

  TokenStream ts;
  std::size_t span_start = 0;

  auto commit_boundary = [&]() {
    if (ts.word_tokens.size() > span_start) {
      ts.sentence_spans.push_back({span_start, ts.word_tokens.size()});
      span_start = ts.word_tokens.size();
    }
  };

  std::size_t i = 0;
  while (i < n) {
    const char32_t cp = cps[i];

    if (is_word_char(cp)) {
      std::size_t j = i + 1;
      while (j < n) {
        if (is_word_char(cps[j])) {
          ++j;
        } else if (is_apostrophe(cps[j]) && j + 1 < n && is_word_char(cps[j + 1])) {
          j += 2;  // apostrophe internal to the word plus the next word char
        } else {
          break;
        }
      }
      ts.word_tokens.push_back(lowercase_token(cps, i, j));
      i = j;
      continue;
    }

    if (is_space(cp)) {
      ++i;
      continue;
    }

    // Hyphen runs of length >= 2 act as a single dash token; a lone hyphen
    // stays a one-character punct token (and is never counted as a dash).
    if (cp == '-' && i + 1 < n && cps[i + 1] == '-') {
      std::size_t j = i;
      while (j < n && cps[j] == '-') ++j;
      ts.punct_tokens.push_back(std::string(j - i, '-'));
      ts.punct_word_index.push_back(ts.word_tokens.size());
      i = j;
      continue;
    }

    if (is_terminal(cp)) {
      const std::size_t run_start = i;
      std::size_t j = i;
      while (j < n && is_terminal(cps[j])) {
        std::string tok;
        append_utf8(tok, cps[j]);
        ts.punct_tokens.push_back(std::move(tok));
        ts.punct_word_index.push_back(ts.word_tokens.size());
        ++j;
      }

      bool boundary = false;
      if (j >= n) {
        boundary = true;
      } else if (is_space(cps[j])) {
        std::size_t k = j;
        while (k < n && is_space(cps[k])) ++k;
        if (k < n && is_upper(cps[k])) boundary = true;
      }

      // Abbreviation check applies to a single '.' directly after a word.
      if (boundary && j - run_start == 1 && cps[run_start] == '.' &&
          run_start > 0 && is_word_char(cps[run_start - 1])) {
        std::size_t b = run_start;
        while (b > 0 && (is_word_char(cps[b - 1]) || cps[b - 1] == '.')) --b;
        std::string candidate;
        for (std::size_t k = b; k <= run_start; ++k) {
          append_utf8(candidate, fold_case(cps[k]));
        }
        if (abbreviation_stoplist().count(candidate) > 0) boundary = false;
      }

      if (boundary) commit_boundary();
      i = j;
      continue;
    }

    std::string tok;
    append_utf8(tok, cp);
    ts.punct_tokens.push_back(std::move(tok));
    ts.punct_word_index.push_back(ts.word_tokens.size());
    ++i;
  }

  commit_boundary();  // trailing words without terminal punctuation
  return ts;
}

std::string normalize_for_ngrams(std::string_view text) {
  const std::vector<char32_t> cps = decode_utf8(text);
  std::string out;
  bool pending_space = false;
  bool seen_any = false;
  for (char32_t cp : cps) {
    if (is_space(cp)) {
      pending_space = seen_any;
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    append_utf8(out, fold_case(cp));
    seen_any = true;
  }
  return out;
}

std::map<std::string, std::size_t> char_ngrams(std::string_view text, int n) {
  if (n < 2 || n > 4) {
    throw Error(ErrorCode::InvalidArgument, "n-gram order must be 2, 3, or 4");
  }
  const std::string normalized = normalize_for_ngrams(text);
  const std::vector<char32_t> cps = decode_utf8(normalized);
  if (cps.size() < static_cast<std::size_t>(n)) {
    throw Error(ErrorCode::TextTooShort,
                "text shorter than n after normalization (length " +
                    std::to_string(cps.size()) + ", n " + std::to_string(n) + ")");
  }
  std::map<std::string, std::size_t> counts;
  for (std::size_t i = 0; i + n <= cps.size(); ++i) {
    std::string gram;
    for (int k = 0; k < n; ++k) append_utf8(gram, cps[i + k]);
    ++counts[gram];
  }
  return counts;
}

std::size_t codepoint_count(std::string_view text) {
  return decode_utf8(text).size();
}

namespace {

void insert_phrase_line(Lexicon& lex, const std::string& line) {
  std::vector<std::string> words = split_ws(to_lower_ascii(line));
  if (!words.empty()) lex.phrases.push_back(std::move(words));
}

void sort_phrases(Lexicon& lex) {
  std::sort(lex.phrases.begin(), lex.phrases.end(),
            [](const auto& a, const auto& b) {
              if (a.size() != b.size()) return a.size() > b.size();
              return a < b;
            });
  lex.phrases.erase(std::unique(lex.phrases.begin(), lex.phrases.end()),
                    lex.phrases.end());
}

const std::unordered_set<std::string>& nrc_affects() {
  static const std::unordered_set<std::string> kAffects = {
      "anger", "anticipation", "disgust", "fear", "joy",
      "sadness", "surprise", "trust", "negative", "positive",
  };
  return kAffects;
}

}  // namespace

Lexicon load_lexicon(const std::string& path, LexiconKind kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::InvalidArgument, "cannot open lexicon file: " + path);
  }
  Lexicon lex;
  lex.name = path;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();

    if (kind == LexiconKind::NrcFormat) {
      if (trim_copy(line).empty()) continue;
      std::vector<std::string> fields;
      std::size_t start = 0;
      while (true) {
        std::size_t tab = line.find('\t', start);
        fields.push_back(line.substr(start, tab - start));
        if (tab == std::string::npos) break;
        start = tab + 1;
      }
      if (fields.size() != 3) {
        throw Error(ErrorCode::MalformedLexiconLine,
                    path + ":" + std::to_string(line_no) +
                        ": expected word<TAB>affect<TAB>flag");
      }
      const std::string word = to_lower_ascii(trim_copy(fields[0]));
      const std::string affect = to_lower_ascii(trim_copy(fields[1]));
      const std::string flag = trim_copy(fields[2]);
      if (word.empty() || (flag != "0" && flag != "1")) {
        throw Error(ErrorCode::MalformedLexiconLine,
                    path + ":" + std::to_string(line_no) + ": bad word or flag");
      }
      if (flag == "1" && nrc_affects().count(affect) > 0) {
        lex.entries.insert(word);
      }
      continue;
    }

    std::string entry = trim_copy(line);
    if (entry.empty() || entry[0] == '#') continue;
    entry = to_lower_ascii(entry);
    switch (kind) {
      case LexiconKind::Wordlist: {
        std::vector<std::string> words = split_ws(entry);
        if (words.size() != 1) {
          throw Error(ErrorCode::MalformedLexiconLine,
                      path + ":" + std::to_string(line_no) +
                          ": wordlist entries must be single tokens");
        }
        lex.entries.insert(words[0]);
        break;
      }
      case LexiconKind::Phraselist:
        insert_phrase_line(lex, entry);
        break;
      case LexiconKind::Suffixlist: {
        std::vector<std::string> words = split_ws(entry);
        if (words.size() != 1) {
          throw Error(ErrorCode::MalformedLexiconLine,
                      path + ":" + std::to_string(line_no) +
                          ": suffix entries must be single tokens");
        }
        std::string suffix = words[0];
        if (!suffix.empty() && suffix[0] == '-') suffix.erase(0, 1);
        if (suffix.empty()) {
          throw Error(ErrorCode::MalformedLexiconLine,
                      path + ":" + std::to_string(line_no) + ": empty suffix");
        }
        lex.suffixes.push_back(suffix);
        break;
      }
      case LexiconKind::NrcFormat:
        break;  // handled above
    }
  }

  if (kind == LexiconKind::Phraselist) sort_phrases(lex);
  if (kind == LexiconKind::Suffixlist) {
    std::sort(lex.suffixes.begin(), lex.suffixes.end());
    lex.suffixes.erase(std::unique(lex.suffixes.begin(), lex.suffixes.end()),
                       lex.suffixes.end());
  }
  return lex;
}

Lexicon lexicon_from_words(std::string name, const std::vector<std::string>& words) {
  Lexicon lex;
  lex.name = std::move(name);
  for (const auto& w : words) {
    if (!w.empty()) lex.entries.insert(to_lower_ascii(w));
  }
  return lex;
}

Lexicon lexicon_from_phrases(std::string name,
                             const std::vector<std::string>& phrase_lines) {
  Lexicon lex;
  lex.name = std::move(name);
  for (const auto& line : phrase_lines) insert_phrase_line(lex, line);
  sort_phrases(lex);
  return lex;
}

Lexicon lexicon_from_suffixes(std::string name,
                              const std::vector<std::string>& suffixes) {
  Lexicon lex;
  lex.name = std::move(name);
  for (auto s : suffixes) {
    s = to_lower_ascii(trim_copy(s));
    if (!s.empty() && s[0] == '-') s.erase(0, 1);
    if (!s.empty()) lex.suffixes.push_back(s);
  }
  std::sort(lex.suffixes.begin(), lex.suffixes.end());
  lex.suffixes.erase(std::unique(lex.suffixes.begin(), lex.suffixes.end()),
                     lex.suffixes.end());
  return lex;
}

}  // namespace styledrift
