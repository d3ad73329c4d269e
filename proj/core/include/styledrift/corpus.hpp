#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace styledrift {

struct Document {
  std::string id;
  std::string text;    // NFC-normalized at ingest
  std::string source;  // source-category label, may be empty
  std::size_t word_count = 0;  // recomputed from the tokenizer, never trusted
};

enum class PromptCondition { Generic, VoicePreserving, RewriteOnly };

// Wire labels used by the record format ("generic" | "voice" | "rewrite_only").
const char* to_string(PromptCondition condition);
std::optional<PromptCondition> parse_condition(const std::string& label);

struct DocumentPair {
  Document original;
  Document rewrite;
  std::string model_id;
  PromptCondition condition = PromptCondition::Generic;
  int pass_index = 0;
};

struct PairedCorpus {
  std::vector<Document> originals;
  std::vector<DocumentPair> pairs;
};

enum class CorpusFormat { Jsonl, Csv };

struct IngestOptions {
  CorpusFormat format = CorpusFormat::Jsonl;
  // Paper-reproduction setting, default off: drop originals (and their
  // pairs) below this many word tokens. 0 disables the filter.
  std::size_t min_words = 0;
};

// Reads and validates a paired corpus. Rewrites are linked to originals via
// parent_id; (original id, model, condition, pass) cells must be unique.
// Throws MalformedRecord / DuplicateKey / DanglingParent.
PairedCorpus ingest_corpus(const std::string& path, const IngestOptions& options = {});

// Record-level export in the ingest format; ingest(export(c)) == c.
void export_corpus(const PairedCorpus& corpus, const std::string& path,
                   CorpusFormat format);

struct SliceFilter {
  std::optional<std::string> model_id;
  std::optional<PromptCondition> condition;
  std::optional<std::string> source;

  bool empty() const { return !model_id && !condition && !source; }
};

// Sub-corpus matching all given filters; originals restricted to those with
// surviving pairs. A filter matching nothing throws EmptySlice. With no
// filters the corpus is returned unchanged.
PairedCorpus slice(const PairedCorpus& corpus, const SliceFilter& filter);

bool operator==(const Document& a, const Document& b);
bool operator==(const DocumentPair& a, const DocumentPair& b);
bool operator==(const PairedCorpus& a, const PairedCorpus& b);

}  // namespace styledrift
