#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "styledrift/corpus.hpp"
#include "styledrift/markers.hpp"

namespace styledrift {

enum class FeatureSpace { CharNgram, WordDelta, Full };

const char* to_string(FeatureSpace space);
std::optional<FeatureSpace> parse_feature_space(const std::string& label);

struct Standardization {
  std::vector<std::string> feature_names;  // features kept (sd > 0)
  std::vector<double> mean;
  std::vector<double> sd;
};

struct FeatureMatrix {
  std::vector<std::string> row_ids;
  std::vector<std::string> feature_names;
  Eigen::MatrixXd values;  // rows x features
  std::optional<Standardization> standardization;  // set once standardized
  std::vector<std::string> dropped_rows;      // rows lost to short texts
  std::vector<std::string> dropped_features;  // zero-variance features
};

// Feature composition per space:
//   char_ngram: bigram/trigram/quadrigram entropy, the matching hapax-type
//               ratios, and mean word length (7 features)
//   word_delta: mfw_coverage, function_word_ratio, yules_k, honores_r, mtld
//   full:       the 18 markers plus the char_ngram extras not already
//               covered by a marker (bigram/quadrigram entropy, 3 hapax ratios)
std::vector<std::string> feature_names_for(FeatureSpace space);

// Rows that fail n-gram length preconditions are dropped and recorded.
// word_delta and full require marker resources; char_ngram does not.
FeatureMatrix build_features(const std::vector<Document>& docs, FeatureSpace space,
                             const MarkerResources* resources = nullptr);

// Standardization parameters computed from a reference matrix (by
// convention the originals); zero-variance features are dropped.
Standardization compute_standardization(const FeatureMatrix& reference);

// (x - mean) / sd per kept feature. The input must cover the features the
// parameters were computed on.
FeatureMatrix standardize(const FeatureMatrix& matrix, const Standardization& params);

}  // namespace styledrift
