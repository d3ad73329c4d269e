#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "styledrift/corpus.hpp"
#include "styledrift/features.hpp"
#include "styledrift/markers.hpp"
#include "styledrift/rewrite.hpp"

namespace styledrift {

// Every analysis command runs off one RunConfig; the full config is echoed
// into output metadata so results are reproducible from the files alone.
struct RunConfig {
  std::string corpus_path;
  CorpusFormat format = CorpusFormat::Jsonl;
  std::size_t min_words = 0;

  std::string function_words_path;
  std::string first_person_path;
  std::string emotion_path;
  std::string causal_path;
  std::string retrospective_path;
  std::string eventive_path;
  std::string suffixes_path;

  double alpha = 0.05;
  MfwScope mfw_scope = MfwScope::Corpus;
  std::map<std::string, std::string> d_variant_overrides;  // marker -> pooled|paired
  FeatureSpace feature_space = FeatureSpace::CharNgram;
  int pca_components = 2;
  std::string out_dir;
  std::uint64_t seed = 0;

  // acquisition
  std::vector<std::string> models;
  std::vector<PromptCondition> conditions;
  int passes = 1;
  double temperature = 0.7;
  int max_tokens = 4096;
  std::string cache_dir;
  std::string bindings_path;  // JSON array of provider bindings
  bool mock = false;
  std::string mock_transform = "identity";  // identity | expand_contractions
  PromptPlacement placement = PromptPlacement::User;

  // export
  std::string export_format = "jsonl";  // jsonl | csv
};

// Stable fingerprint of the canonical config serialization; stamped into
// every output file.
std::string config_hash(const RunConfig& config);

struct CommandResult {
  int exit_code = 0;  // 0 success, 1 partial (warnings), 2 input error
  std::vector<std::string> warnings;
  std::vector<std::string> written_files;
};

// Per-document marker table (CSV) + metadata sidecar.
CommandResult cmd_markers(const RunConfig& config);

// Effect tables per (model, condition) slice, a cross-condition summary, and
// replicate-pass reliability when multiple passes are present.
CommandResult cmd_effects(const RunConfig& config);

// PCA coordinates, centroid shifts, dispersion, variance compression, and
// source-match reports.
CommandResult cmd_convergence(const RunConfig& config);

// Source-match reports for all three feature spaces.
CommandResult cmd_match(const RunConfig& config);

// Batch acquisition through provider bindings (or the mock provider);
// appends rewrite records to <out_dir>/acquired.jsonl, resumable via cache.
// test_registry overrides provider construction for tests.
CommandResult cmd_acquire(const RunConfig& config,
                          const ProviderRegistry* test_registry = nullptr);

// Record-level corpus re-emission (format conversion / canonicalization).
CommandResult cmd_export(const RunConfig& config);

}  // namespace styledrift
