#pragma once

#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "styledrift/corpus.hpp"
#include "styledrift/markers.hpp"
#include "styledrift/rewrite.hpp"
#include "styledrift/text.hpp"

#ifndef STYLEDRIFT_DATA_DIR
#error "STYLEDRIFT_DATA_DIR must be defined by the build"
#endif

namespace fixtures {

inline std::string data_path(const std::string& relative) {
  return (std::filesystem::path(STYLEDRIFT_DATA_DIR) / relative).string();
}

// The hand-counted golden document. Token count 29 over 3 sentences; the
// unit tests derive every expected marker value from these counts.
inline const char* kGoldenText =
    "Looking back, I can't believe we walked home. I was so happy, but it "
    "still hurt. The situation was a realization -- we saw the truth because "
    "I heard it.";

inline styledrift::Document make_document(std::string id, std::string text,
                                          std::string source = "") {
  styledrift::Document doc;
  doc.id = std::move(id);
  doc.text = styledrift::normalize_nfc(text);
  doc.source = std::move(source);
  doc.word_count = styledrift::tokenize(doc.text).word_count();
  return doc;
}

inline styledrift::MarkerResources load_default_resources(
    const std::vector<styledrift::Document>& originals) {
  using styledrift::LexiconKind;
  styledrift::MarkerResources resources;
  resources.function_words = styledrift::load_lexicon(
      data_path("lexicons/function_words.txt"), LexiconKind::Wordlist);
  resources.first_person = styledrift::load_lexicon(
      data_path("lexicons/first_person.txt"), LexiconKind::Wordlist);
  resources.emotion = styledrift::load_lexicon(
      data_path("lexicons/emotion_sample_nrc.txt"), LexiconKind::NrcFormat);
  resources.causal = styledrift::load_lexicon(data_path("lexicons/causal.txt"),
                                              LexiconKind::Phraselist);
  resources.retrospective = styledrift::load_lexicon(
      data_path("lexicons/retrospective.txt"), LexiconKind::Phraselist);
  resources.eventive = styledrift::load_lexicon(
      data_path("lexicons/eventive_verbs.txt"), LexiconKind::Wordlist);
  resources.abstract_suffixes = styledrift::load_lexicon(
      data_path("lexicons/abstract_suffixes.txt"), LexiconKind::Suffixlist);
  resources.corpus_mfw = styledrift::build_mfw_set(originals);
  return resources;
}

// Fresh scratch directory under the system temp root.
inline std::string scratch_dir(const std::string& name) {
  const auto path = std::filesystem::temp_directory_path() / ("styledrift_" + name);
  std::filesystem::remove_all(path);
  std::filesystem::create_directories(path);
  return path.string();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

// --- synthetic narrative generator -------------------------------------------

// Personal-narrative-shaped texts with contractions, first-person density,
// coordinating conjunctions, emotion words, and repeated content nouns that
// the normalizer transform below can act on.
inline std::string synthetic_narrative(std::mt19937_64& rng, int sentences = 10) {
  static const std::vector<std::string> kNouns = {
      "house", "dog", "car", "road", "friend",
      "story", "town", "rain", "work", "gift"};
  static const std::vector<std::string> kAdjectives = {
      "big", "small", "old", "good", "sad", "happy", "quiet", "strange"};
  static const std::vector<std::string> kTemplates = {
      "I can't believe the {n} was so {a}.",
      "We walked to the {n} and i saw my {m}.",
      "I can't forget the {n} because it was {a}.",
      "My {n} made me happy and we stayed near the {m}.",
      "Looking back, I think the {n} was {a}.",
      "I ran to the {n} and we heard the {m}.",
      "It's the {n} that i remember.",
      "We can't find the {n} so we turned around.",
      "I felt sad and i walked home with my {n}.",
      "The {n} was {a} and i loved it.",
      "I saw the {n} near the {m} and we left.",
      "My {n} and my {m} were {a}.",
  };

  std::uniform_int_distribution<std::size_t> pick_template(0, kTemplates.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_noun(0, kNouns.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_adj(0, kAdjectives.size() - 1);

  std::string text;
  for (int s = 0; s < sentences; ++s) {
    std::string sentence = kTemplates[pick_template(rng)];
    auto fill = [&](const std::string& slot, const std::string& value) {
      std::size_t pos;
      while ((pos = sentence.find(slot)) != std::string::npos) {
        sentence.replace(pos, slot.size(), value);
      }
    };
    fill("{n}", kNouns[pick_noun(rng)]);
    fill("{m}", kNouns[pick_noun(rng)]);
    fill("{a}", kAdjectives[pick_adj(rng)]);
    if (!text.empty()) text += " ";
    text += sentence;
  }
  return text;
}

// --- deterministic normalizer transform ---------------------------------------
//
// The fixture rewrite bundle: expand contractions; replace every 5th
// occurrence of a repeated content word with a longer synonym from a fixed
// table; insert a comma before each coordinating conjunction; delete every
// 5th first-person pronoun.
inline std::string normalizer_transform(const std::string& text) {
  static const std::map<std::string, std::string> kSynonyms = {
      {"house", "residence"},   {"dog", "companion"},
      {"car", "automobile"},    {"road", "thoroughfare"},
      {"friend", "acquaintance"}, {"story", "narrative"},
      {"town", "municipality"}, {"rain", "precipitation"},
      {"work", "occupation"},   {"gift", "offering"},
  };
  static const std::vector<std::string> kFirstPerson = {
      "i", "me", "my", "mine", "we", "us", "our", "ours"};
  static const std::vector<std::string> kConjunctions = {"and", "but", "or", "so"};

  const std::string expanded = styledrift::expand_contractions(text);

  auto is_word_byte = [](unsigned char c) {
    return std::isalnum(c) != 0 || c == '\'';
  };
  auto contains = [](const std::vector<std::string>& set, const std::string& w) {
    return std::find(set.begin(), set.end(), w) != set.end();
  };

  std::map<std::string, int> synonym_seen;
  int first_person_seen = 0;

  std::string out;
  std::size_t i = 0;
  while (i < expanded.size()) {
    if (!is_word_byte(static_cast<unsigned char>(expanded[i]))) {
      out.push_back(expanded[i]);
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < expanded.size() && is_word_byte(static_cast<unsigned char>(expanded[j]))) {
      ++j;
    }
    std::string word = expanded.substr(i, j - i);
    std::string lowered = word;
    for (char& c : lowered) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    i = j;

    if (contains(kFirstPerson, lowered)) {
      ++first_person_seen;
      if (first_person_seen % 5 == 0) {
        // drop the pronoun and one following space
        if (i < expanded.size() && expanded[i] == ' ') ++i;
        continue;
      }
    }

    if (contains(kConjunctions, lowered) && !out.empty()) {
      // insert a comma before the conjunction unless one is already there
      std::size_t k = out.size();
      while (k > 0 && out[k - 1] == ' ') --k;
      if (k > 0 && out[k - 1] != ',') out.insert(k, ",");
    }

    auto synonym = kSynonyms.find(lowered);
    if (synonym != kSynonyms.end()) {
      int seen = ++synonym_seen[lowered];
      if (seen % 5 == 2) {
        std::string replacement = synonym->second;
        if (std::isupper(static_cast<unsigned char>(word[0])) != 0) {
          replacement[0] = static_cast<char>(
              std::toupper(static_cast<unsigned char>(replacement[0])));
        }
        out += replacement;
        continue;
      }
    }
    out += word;
  }
  return out;
}

// Paired corpus of n synthetic narratives and their transformed rewrites.
inline styledrift::PairedCorpus normalizer_corpus(int n, std::uint64_t seed,
                                                  const std::string& model = "mock/normalizer") {
  std::mt19937_64 rng(seed);
  styledrift::PairedCorpus corpus;
  for (int d = 0; d < n; ++d) {
    const std::string text = synthetic_narrative(rng);
    styledrift::Document original =
        make_document("orig-" + std::to_string(d), text, "synthetic");
    styledrift::Document rewrite = make_document(
        "rewr-" + std::to_string(d), normalizer_transform(text), "synthetic");
    corpus.originals.push_back(original);
    styledrift::DocumentPair pair;
    pair.original = std::move(original);
    pair.rewrite = std::move(rewrite);
    pair.model_id = model;
    pair.condition = styledrift::PromptCondition::Generic;
    corpus.pairs.push_back(std::move(pair));
  }
  return corpus;
}

}  // namespace fixtures
