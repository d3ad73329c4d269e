#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "styledrift/corpus.hpp"
#include "styledrift/markers.hpp"
#include "styledrift/stats.hpp"

namespace styledrift {

struct EffectRecord {
  Marker marker = Marker::FunctionWordRatio;
  std::string model_id;
  PromptCondition condition = PromptCondition::Generic;
  double d = 0.0;  // positive = marker increases in rewrites
  DVariant d_variant = DVariant::Pooled;
  double t_stat = 0.0;
  double p = 1.0;
  double p_adjusted = 1.0;
  bool significant = false;
  double mean_original = 0.0;
  double mean_rewrite = 0.0;
  double percent_change = 0.0;
  std::size_t n_pairs = 0;
  bool degenerate = false;  // statistical degeneracy or flagged marker values
};

struct EffectTable {
  std::string model_id;
  PromptCondition condition = PromptCondition::Generic;
  double alpha = 0.05;
  std::vector<EffectRecord> records;  // marker enum order, 18 rows
  double mean_abs_d = 0.0;            // unweighted over the 13 core markers

  const EffectRecord* find(Marker marker) const;
};

// Aligned marker vectors for one (model, condition) analysis slice.
struct MarkerPairSet {
  std::string model_id;
  PromptCondition condition = PromptCondition::Generic;
  std::vector<std::string> original_ids;  // aligned with the vectors below
  std::vector<MarkerVector> originals;
  std::vector<MarkerVector> rewrites;
};

using DVariantOverrides = std::map<Marker, DVariant>;

// Default split: pooled for function-word, vocabulary, and syntax markers;
// paired for register and stance markers.
DVariant default_d_variant(Marker marker);

// One record per marker with FDR applied separately to the core and stance
// families. Statistical degeneracies surface as flagged records, not errors.
EffectTable build_effect_table(const MarkerPairSet& pairs, double alpha = 0.05,
                               const DVariantOverrides* overrides = nullptr);

struct DirectionAgreement {
  double percent = 0.0;   // core markers with matching sign of d
  bool zero_flagged = false;  // some d was exactly zero (agrees with nothing)
};

DirectionAgreement direction_agreement(const EffectTable& table_a,
                                       const EffectTable& table_b);

// (1 - mean|d|_variant / mean|d|_baseline) * 100. Throws ZeroBaseline.
double reduction_percent(const EffectTable& baseline, const EffectTable& variant);

// Pearson correlation of the signed core-marker d vectors.
double effect_vector_correlation(const EffectTable& table_a,
                                 const EffectTable& table_b);

struct MarkerIcc {
  Marker marker = Marker::FunctionWordRatio;
  double icc = 0.0;
  bool degenerate = false;
  std::size_t n_items = 0;
  std::size_t n_raters = 0;
};

struct ReplicateReliability {
  std::vector<MarkerIcc> per_marker;
  double median_icc = 0.0;  // over non-degenerate markers
};

// ICC(2,1) per marker across replicate passes. Each entry is one pass of the
// same (model, condition) slice; passes act as raters over the rewrite
// marker values, and only originals present in every pass are used.
ReplicateReliability replicate_reliability(const std::vector<MarkerPairSet>& passes);

}  // namespace styledrift
