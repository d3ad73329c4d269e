#include "styledrift/features.hpp"

#include <cmath>
#include <unordered_map>

#include "styledrift/error.hpp"
#include "styledrift/stats.hpp"

namespace styledrift {

const char* to_string(FeatureSpace space) {
  switch (space) {
    case FeatureSpace::CharNgram: return "char_ngram";
    case FeatureSpace::WordDelta: return "word_delta";
    case FeatureSpace::Full: return "full";
  }
  return "char_ngram";
}

std::optional<FeatureSpace> parse_feature_space(const std::string& label) {
  if (label == "char_ngram") return FeatureSpace::CharNgram;
  if (label == "word_delta") return FeatureSpace::WordDelta;
  if (label == "full") return FeatureSpace::Full;
  return std::nullopt;
}

namespace {

struct NgramStats {
  double entropy = 0.0;      // bits
  double hapax_ratio = 0.0;  // fraction of n-gram types occurring once
};

NgramStats ngram_stats(std::string_view text, int n) {
  const auto counts = char_ngrams(text, n);  // throws TextTooShort
  double total = 0.0;
  double hapax_types = 0.0;
  for (const auto& [gram, c] : counts) {
    total += static_cast<double>(c);
    if (c == 1) hapax_types += 1.0;
  }
  NgramStats stats;
  for (const auto& [gram, c] : counts) {
    const double p = static_cast<double>(c) / total;
    stats.entropy -= p * std::log2(p);
  }
  if (stats.entropy < 0.0) stats.entropy = 0.0;
  stats.hapax_ratio = hapax_types / static_cast<double>(counts.size());
  return stats;
}

const std::vector<std::string>& char_ngram_names() {
  static const std::vector<std::string> kNames = {
      "bigram_entropy",     "trigram_entropy",     "quadrigram_entropy",
      "bigram_hapax_ratio", "trigram_hapax_ratio", "quadrigram_hapax_ratio",
      "mean_word_length",
  };
  return kNames;
}

const std::vector<std::string>& word_delta_names() {
  static const std::vector<std::string> kNames = {
      "mfw_coverage", "function_word_ratio", "yules_k", "honores_r", "mtld",
  };
  return kNames;
}

const std::vector<std::string>& full_names() {
  static const std::vector<std::string> kNames = [] {
    std::vector<std::string> names;
    for (Marker m : all_markers()) names.emplace_back(marker_name(m));
    // char n-gram extras not already covered by a marker
    names.insert(names.end(), {"bigram_entropy", "quadrigram_entropy",
                               "bigram_hapax_ratio", "trigram_hapax_ratio",
                               "quadrigram_hapax_ratio"});
    return names;
  }();
  return kNames;
}

// Feature values for one document in the given order; throws on short text.
std::vector<double> extract_row(const Document& doc, FeatureSpace space,
                                const MarkerResources* resources) {
  const TokenStream tokens = tokenize(doc.text);
  if (tokens.word_tokens.empty()) {
    throw Error(ErrorCode::EmptyText, "document has no word tokens");
  }

  std::unordered_map<std::string, double> values;
  const bool needs_ngrams = space != FeatureSpace::WordDelta;
  if (needs_ngrams) {
    const NgramStats bi = ngram_stats(doc.text, 2);
    const NgramStats tri = ngram_stats(doc.text, 3);
    const NgramStats quad = ngram_stats(doc.text, 4);
    values["bigram_entropy"] = bi.entropy;
    values["trigram_entropy"] = tri.entropy;
    values["quadrigram_entropy"] = quad.entropy;
    values["bigram_hapax_ratio"] = bi.hapax_ratio;
    values["trigram_hapax_ratio"] = tri.hapax_ratio;
    values["quadrigram_hapax_ratio"] = quad.hapax_ratio;
    values["mean_word_length"] = mean_word_length(tokens);
  }

  if (space == FeatureSpace::WordDelta || space == FeatureSpace::Full) {
    if (resources == nullptr) {
      throw Error(ErrorCode::InvalidArgument,
                  "word_delta/full feature spaces require marker resources");
    }
    const MfwSet& mfw = resources->corpus_mfw;
    values["mfw_coverage"] = mfw_coverage(tokens, mfw);
    values["function_word_ratio"] =
        function_word_ratio(tokens, resources->function_words);
    values["yules_k"] = yules_k(tokens);
    values["honores_r"] = honores_r(tokens).value;
    values["mtld"] = mtld(tokens).value;
  }

  if (space == FeatureSpace::Full) {
    values["char_trigram_entropy"] = values["trigram_entropy"];
    values["mean_sentence_length"] = mean_sentence_length(tokens);
    values["comma_per_100"] = punct_per_100(tokens, PunctMark::Comma);
    values["dash_per_100"] = punct_per_100(tokens, PunctMark::Dash);
    values["contraction_per_100"] = contraction_per_100(tokens);
    values["first_person_per_100"] =
        lexicon_per_100(tokens, resources->first_person);
    values["emotion_per_100"] = lexicon_per_100(tokens, resources->emotion);
    values["eventive_clause_density"] =
        eventive_clause_density(tokens, resources->eventive);
    values["first_person_eventive_per_sentence"] =
        first_person_eventive_per_sentence(tokens, resources->first_person,
                                           resources->eventive);
    values["causal_per_sentence"] = phrase_per_sentence(tokens, resources->causal);
    values["retrospective_per_sentence"] =
        phrase_per_sentence(tokens, resources->retrospective);
    values["abstraction_per_100"] =
        suffix_per_100(tokens, resources->abstract_suffixes);
  }

  std::vector<double> row;
  for (const std::string& name : feature_names_for(space)) {
    row.push_back(values.at(name));
  }
  return row;
}

}  // namespace

std::vector<std::string> feature_names_for(FeatureSpace space) {
  switch (space) {
    case FeatureSpace::CharNgram: return char_ngram_names();
    case FeatureSpace::WordDelta: return word_delta_names();
    case FeatureSpace::Full: return full_names();
  }
  return char_ngram_names();
}

FeatureMatrix build_features(const std::vector<Document>& docs, FeatureSpace space,
                             const MarkerResources* resources) {
  FeatureMatrix matrix;
  matrix.feature_names = feature_names_for(space);

  std::vector<std::vector<double>> rows;
  for (const Document& doc : docs) {
    try {
      rows.push_back(extract_row(doc, space, resources));
      matrix.row_ids.push_back(doc.id);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::TextTooShort || e.code() == ErrorCode::EmptyText) {
        matrix.dropped_rows.push_back(doc.id);
      } else {
        throw;
      }
    }
  }

  matrix.values.resize(static_cast<Eigen::Index>(rows.size()),
                       static_cast<Eigen::Index>(matrix.feature_names.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      matrix.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          rows[r][c];
    }
  }
  return matrix;
}

Standardization compute_standardization(const FeatureMatrix& reference) {
  if (reference.values.rows() < 2) {
    throw Error(ErrorCode::InvalidArgument,
                "standardization needs at least 2 reference rows");
  }
  Standardization params;
  for (std::size_t c = 0; c < reference.feature_names.size(); ++c) {
    const Eigen::VectorXd col = reference.values.col(static_cast<Eigen::Index>(c));
    const double m = col.mean();
    const double var =
        (col.array() - m).square().sum() / static_cast<double>(col.size() - 1);
    const double sd = std::sqrt(var);
    if (sd > 0.0) {
      params.feature_names.push_back(reference.feature_names[c]);
      params.mean.push_back(m);
      params.sd.push_back(sd);
    }
  }
  return params;
}

FeatureMatrix standardize(const FeatureMatrix& matrix, const Standardization& params) {
  std::unordered_map<std::string, std::size_t> col_of;
  for (std::size_t c = 0; c < matrix.feature_names.size(); ++c) {
    col_of[matrix.feature_names[c]] = c;
  }

  FeatureMatrix out;
  out.row_ids = matrix.row_ids;
  out.feature_names = params.feature_names;
  out.dropped_rows = matrix.dropped_rows;
  for (const std::string& name : matrix.feature_names) {
    if (std::find(params.feature_names.begin(), params.feature_names.end(), name) ==
        params.feature_names.end()) {
      out.dropped_features.push_back(name);  // zero variance in the reference
    }
  }

  out.values.resize(matrix.values.rows(),
                    static_cast<Eigen::Index>(params.feature_names.size()));
  for (std::size_t c = 0; c < params.feature_names.size(); ++c) {
    auto it = col_of.find(params.feature_names[c]);
    if (it == col_of.end()) {
      throw Error(ErrorCode::InvalidArgument,
                  "matrix lacks feature: " + params.feature_names[c]);
    }
    out.values.col(static_cast<Eigen::Index>(c)) =
        (matrix.values.col(static_cast<Eigen::Index>(it->second)).array() -
         params.mean[c]) /
        params.sd[c];
  }
  out.standardization = params;
  return out;
}

}  // namespace styledrift
