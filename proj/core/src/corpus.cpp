#include "styledrift/corpus.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "internal/csv.hpp"
#include "styledrift/error.hpp"
#include "styledrift/text.hpp"

namespace styledrift {

namespace {

using nlohmann::json;

struct RawRecord {
  std::size_t line_no = 0;
  std::string id;
  std::string text;
  std::string role;
  std::string parent_id;
  std::string source;
  std::string model_id;
  std::string condition;
  int pass = 0;
  bool has_parent = false;
  bool has_model = false;
  bool has_condition = false;
};

[[noreturn]] void malformed(std::size_t line_no, const std::string& reason) {
  throw Error(ErrorCode::MalformedRecord,
              "line " + std::to_string(line_no) + ": " + reason);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::InvalidArgument, "cannot open corpus file: " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<RawRecord> parse_jsonl(const std::string& content) {
  std::vector<RawRecord> records;
  std::istringstream in(content);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    bool blank = line.find_first_not_of(" \t") == std::string::npos;
    if (blank) continue;

    json record = json::parse(line, nullptr, false);
    if (record.is_discarded() || !record.is_object()) {
      malformed(line_no, "invalid JSON object");
    }

    RawRecord raw;
    raw.line_no = line_no;
    auto get_string = [&](const char* key, std::string& out) {
      auto it = record.find(key);
      if (it == record.end() || it->is_null()) return false;
      if (!it->is_string()) malformed(line_no, std::string(key) + " must be a string");
      out = it->get<std::string>();
      return true;
    };
    if (!get_string("id", raw.id)) malformed(line_no, "missing required field: id");
    if (!get_string("text", raw.text)) malformed(line_no, "missing required field: text");
    if (!get_string("role", raw.role)) malformed(line_no, "missing required field: role");
    raw.has_parent = get_string("parent_id", raw.parent_id);
    get_string("source", raw.source);
    raw.has_model = get_string("model_id", raw.model_id);
    raw.has_condition = get_string("condition", raw.condition);
    if (auto it = record.find("pass"); it != record.end() && !it->is_null()) {
      if (!it->is_number_integer() || it->get<long long>() < 0) {
        malformed(line_no, "pass must be a nonnegative integer");
      }
      raw.pass = static_cast<int>(it->get<long long>());
    }
    records.push_back(std::move(raw));
  }
  return records;
}

std::vector<RawRecord> parse_csv_records(const std::string& content) {
  std::vector<internal::CsvRow> rows = internal::parse_csv(content);
  if (rows.empty()) return {};

  const std::vector<std::string>& header = rows.front().fields;
  std::unordered_map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  for (const char* required : {"id", "text", "role"}) {
    if (col.find(required) == col.end()) {
      malformed(rows.front().line_no,
                std::string("CSV header missing column: ") + required);
    }
  }

  auto cell = [&](const internal::CsvRow& row, const char* name) -> std::string {
    auto it = col.find(name);
    if (it == col.end() || it->second >= row.fields.size()) return {};
    return row.fields[it->second];
  };

  std::vector<RawRecord> records;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const internal::CsvRow& row = rows[r];
    RawRecord raw;
    raw.line_no = row.line_no;
    raw.id = cell(row, "id");
    raw.text = cell(row, "text");
    raw.role = cell(row, "role");
    raw.parent_id = cell(row, "parent_id");
    raw.has_parent = !raw.parent_id.empty();
    raw.source = cell(row, "source");
    raw.model_id = cell(row, "model_id");
    raw.has_model = !raw.model_id.empty();
    raw.condition = cell(row, "condition");
    raw.has_condition = !raw.condition.empty();
    std::string pass = cell(row, "pass");
    if (!pass.empty()) {
      try {
        std::size_t used = 0;
        int value = std::stoi(pass, &used);
        if (used != pass.size() || value < 0) throw std::invalid_argument(pass);
        raw.pass = value;
      } catch (const std::exception&) {
        malformed(row.line_no, "pass must be a nonnegative integer");
      }
    }
    records.push_back(std::move(raw));
  }
  return records;
}

}  // namespace

const char* to_string(PromptCondition condition) {
  switch (condition) {
    case PromptCondition::Generic: return "generic";
    case PromptCondition::VoicePreserving: return "voice";
    case PromptCondition::RewriteOnly: return "rewrite_only";
  }
  return "generic";
}

std::optional<PromptCondition> parse_condition(const std::string& label) {
  if (label == "generic") return PromptCondition::Generic;
  if (label == "voice") return PromptCondition::VoicePreserving;
  if (label == "rewrite_only") return PromptCondition::RewriteOnly;
  return std::nullopt;
}

PairedCorpus ingest_corpus(const std::string& path, const IngestOptions& options) {
  const std::string content = read_file(path);
  std::vector<RawRecord> records = options.format == CorpusFormat::Jsonl
                                       ? parse_jsonl(content)
                                       : parse_csv_records(content);

  PairedCorpus corpus;
  std::unordered_set<std::string> seen_ids;
  std::unordered_map<std::string, std::size_t> original_index;
  std::set<std::tuple<std::string, std::string, int, int>> cells;

  struct PendingRewrite {
    RawRecord raw;
    Document doc;
    PromptCondition condition;
  };
  std::vector<PendingRewrite> rewrites;

  for (RawRecord& raw : records) {
    if (raw.id.empty()) malformed(raw.line_no, "id must be nonempty");
    if (!seen_ids.insert(raw.id).second) {
      throw Error(ErrorCode::DuplicateKey,
                  "line " + std::to_string(raw.line_no) + ": duplicate id '" +
                      raw.id + "'");
    }

    Document doc;
    doc.id = raw.id;
    doc.text = normalize_nfc(raw.text);
    doc.source = raw.source;
    if (doc.text.empty()) {
      malformed(raw.line_no, "text empty after Unicode normalization");
    }
    doc.word_count = tokenize(doc.text).word_count();

    if (raw.role == "original") {
      if (raw.has_parent) malformed(raw.line_no, "original must not carry parent_id");
      if (raw.has_model) malformed(raw.line_no, "original must not carry model_id");
      if (raw.has_condition) {
        malformed(raw.line_no, "original must not carry condition");
      }
      original_index[doc.id] = corpus.originals.size();
      corpus.originals.push_back(std::move(doc));
    } else if (raw.role == "rewrite") {
      if (!raw.has_parent || raw.parent_id.empty()) {
        malformed(raw.line_no, "rewrite requires parent_id");
      }
      if (!raw.has_model || raw.model_id.empty()) {
        malformed(raw.line_no, "rewrite requires model_id");
      }
      if (!raw.has_condition) malformed(raw.line_no, "rewrite requires condition");
      auto condition = parse_condition(raw.condition);
      if (!condition) {
        malformed(raw.line_no, "unknown condition '" + raw.condition +
                                   "' (expected generic|voice|rewrite_only)");
      }
      auto key = std::make_tuple(raw.parent_id, raw.model_id,
                                 static_cast<int>(*condition), raw.pass);
      if (!cells.insert(key).second) {
        throw Error(ErrorCode::DuplicateKey,
                    "line " + std::to_string(raw.line_no) +
                        ": duplicate (original, model, condition, pass) cell for '" +
                        raw.parent_id + "'");
      }
      rewrites.push_back({std::move(raw), std::move(doc), *condition});
    } else {
      malformed(raw.line_no, "role must be 'original' or 'rewrite'");
    }
  }

  for (PendingRewrite& pending : rewrites) {
    auto it = original_index.find(pending.raw.parent_id);
    if (it == original_index.end()) {
      throw Error(ErrorCode::DanglingParent,
                  "line " + std::to_string(pending.raw.line_no) + ": rewrite '" +
                      pending.raw.id + "' references unknown original '" +
                      pending.raw.parent_id + "'");
    }
    DocumentPair pair;
    pair.original = corpus.originals[it->second];
    pair.rewrite = std::move(pending.doc);
    pair.model_id = pending.raw.model_id;
    pair.condition = pending.condition;
    pair.pass_index = pending.raw.pass;
    corpus.pairs.push_back(std::move(pair));
  }

  if (options.min_words > 0) {
    std::unordered_set<std::string> dropped;
    std::vector<Document> kept;
    for (Document& doc : corpus.originals) {
      if (doc.word_count < options.min_words) {
        dropped.insert(doc.id);
      } else {
        kept.push_back(std::move(doc));
      }
    }
    corpus.originals = std::move(kept);
    std::vector<DocumentPair> kept_pairs;
    for (DocumentPair& pair : corpus.pairs) {
      if (dropped.count(pair.original.id) == 0) kept_pairs.push_back(std::move(pair));
    }
    corpus.pairs = std::move(kept_pairs);
  }

  return corpus;
}

namespace {

json record_json(const Document& doc, const char* role, const DocumentPair* pair) {
  json record;
  record["id"] = doc.id;
  record["text"] = doc.text;
  record["role"] = role;
  if (!doc.source.empty()) record["source"] = doc.source;
  if (pair != nullptr) {
    record["parent_id"] = pair->original.id;
    record["model_id"] = pair->model_id;
    record["condition"] = to_string(pair->condition);
    record["pass"] = pair->pass_index;
  }
  return record;
}

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> kColumns = {
      "id", "text", "role", "parent_id", "source", "model_id", "condition", "pass"};
  return kColumns;
}

std::vector<std::string> csv_record(const Document& doc, const char* role,
                                    const DocumentPair* pair) {
  return {
      doc.id,
      doc.text,
      role,
      pair ? pair->original.id : "",
      doc.source,
      pair ? pair->model_id : "",
      pair ? to_string(pair->condition) : "",
      pair ? std::to_string(pair->pass_index) : "",
  };
}

}  // namespace

void export_corpus(const PairedCorpus& corpus, const std::string& path,
                   CorpusFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::InvalidArgument, "cannot open output file: " + path);
  }
  if (format == CorpusFormat::Jsonl) {
    for (const Document& doc : corpus.originals) {
      out << record_json(doc, "original", nullptr).dump() << '\n';
    }
    for (const DocumentPair& pair : corpus.pairs) {
      out << record_json(pair.rewrite, "rewrite", &pair).dump() << '\n';
    }
  } else {
    out << internal::csv_join(csv_columns()) << '\n';
    for (const Document& doc : corpus.originals) {
      out << internal::csv_join(csv_record(doc, "original", nullptr)) << '\n';
    }
    for (const DocumentPair& pair : corpus.pairs) {
      out << internal::csv_join(csv_record(pair.rewrite, "rewrite", &pair)) << '\n';
    }
  }
}

PairedCorpus slice(const PairedCorpus& corpus, const SliceFilter& filter) {
  if (filter.empty()) return corpus;

  PairedCorpus result;
  std::unordered_set<std::string> surviving_parents;
  for (const DocumentPair& pair : corpus.pairs) {
    if (filter.model_id && pair.model_id != *filter.model_id) continue;
    if (filter.condition && pair.condition != *filter.condition) continue;
    if (filter.source && pair.original.source != *filter.source) continue;
    result.pairs.push_back(pair);
    surviving_parents.insert(pair.original.id);
  }
  if (result.pairs.empty()) {
    throw Error(ErrorCode::EmptySlice, "no pair matches the given filters");
  }
  for (const Document& doc : corpus.originals) {
    if (surviving_parents.count(doc.id) > 0) result.originals.push_back(doc);
  }
  return result;
}

bool operator==(const Document& a, const Document& b) {
  return a.id == b.id && a.text == b.text && a.source == b.source &&
         a.word_count == b.word_count;
}

bool operator==(const DocumentPair& a, const DocumentPair& b) {
  return a.original == b.original && a.rewrite == b.rewrite &&
         a.model_id == b.model_id && a.condition == b.condition &&
         a.pass_index == b.pass_index;
}

bool operator==(const PairedCorpus& a, const PairedCorpus& b) {
  return a.originals == b.originals && a.pairs == b.pairs;
}

}  // namespace styledrift
