#pragma once

#include <map>
#include <string>
#include <vector>

#include "styledrift/corpus.hpp"
#include "styledrift/features.hpp"
#include "styledrift/markers.hpp"

namespace styledrift {

struct FeatureCompression {
  std::string feature;
  double variance_ratio = 1.0;  // var(rewrite) / var(original)
  double levene_p = 1.0;
  bool compressed = false;  // ratio < 1 and p <= alpha
  bool degenerate = false;
};

struct VarianceCompressionReport {
  std::vector<FeatureCompression> features;
  double fraction_compressed = 0.0;
  double median_reduction = 0.0;  // median of 1 - ratio over compressed features
  double alpha = 0.05;
};

// Per-feature variance ratio + Levene p for original vs rewrite groups.
// Matrices must share a feature set; rows are documents.
VarianceCompressionReport variance_compression(const FeatureMatrix& originals,
                                               const FeatureMatrix& rewrites,
                                               double alpha = 0.05);

enum class MatchMetric { EuclideanStandardized, BurrowsDelta };

struct MatchEntry {
  std::string rewrite_id;
  std::string parent_id;
  std::string nearest_id;
  double distance = 0.0;
  bool matched = false;
  bool tie = false;  // distance tie broken by id order
};

struct MatchReport {
  FeatureSpace feature_space = FeatureSpace::CharNgram;
  double accuracy = 0.0;
  double chance = 0.0;  // 1 / number of originals
  std::vector<MatchEntry> per_document;
};

// Nearest-original matching in a shared standardized feature space.
// parent_of maps rewrite row ids to original row ids; a missing parent
// throws ParentMissing. Euclidean distance for char_ngram/full spaces,
// Delta-style mean absolute z-difference for word_delta by convention.
MatchReport source_match(const FeatureMatrix& originals, const FeatureMatrix& rewrites,
                         const std::map<std::string, std::string>& parent_of,
                         MatchMetric metric, FeatureSpace space);

// Burrows' Delta over the most-frequent-word z-scores.
struct MfwZscoreModel {
  std::vector<std::string> words;  // MFW in rank order
  std::vector<double> mean;        // of relative frequencies over originals
  std::vector<double> sd;          // sample sd; 0 entries contribute z = 0
};

MfwZscoreModel build_mfw_zscore_model(const std::vector<Document>& originals,
                                      const MfwSet& mfw);

// Relative frequency of each model word in one document.
std::vector<double> mfw_profile(const TokenStream& tokens, const MfwZscoreModel& model);

// Mean |z_a - z_b| over the MFW set. Throws EmptyMfwSet.
double burrows_delta(const std::vector<double>& profile_a,
                     const std::vector<double>& profile_b,
                     const MfwZscoreModel& model);

}  // namespace styledrift
