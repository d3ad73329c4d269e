#include "styledrift/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "internal/csv.hpp"
#include "internal/hash.hpp"
#include "internal/parallel.hpp"
#include "styledrift/convergence.hpp"
#include "styledrift/effects.hpp"
#include "styledrift/error.hpp"
#include "styledrift/pca.hpp"
#include "styledrift/stats.hpp"
#include "styledrift/version.hpp"

namespace styledrift {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

std::string sanitize_component(const std::string& name) {
  std::string out;
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '.' || c == '-' || c == '_';
    out.push_back(ok ? c : '_');
  }
  return out.empty() ? std::string("_") : out;
}

const char* to_string(MfwScope scope) {
  return scope == MfwScope::Corpus ? "corpus" : "per_text";
}

const char* to_string(PromptPlacement placement) {
  return placement == PromptPlacement::User ? "user" : "system";
}

json config_json(const RunConfig& c) {
  json j;
  j["corpus_path"] = c.corpus_path;
  j["format"] = c.format == CorpusFormat::Jsonl ? "jsonl" : "csv";
  j["min_words"] = c.min_words;
  j["function_words_path"] = c.function_words_path;
  j["first_person_path"] = c.first_person_path;
  j["emotion_path"] = c.emotion_path;
  j["causal_path"] = c.causal_path;
  j["retrospective_path"] = c.retrospective_path;
  j["eventive_path"] = c.eventive_path;
  j["suffixes_path"] = c.suffixes_path;
  j["alpha"] = c.alpha;
  j["mfw_scope"] = to_string(c.mfw_scope);
  j["d_variant_overrides"] = c.d_variant_overrides;
  j["feature_space"] = to_string(c.feature_space);
  j["pca_components"] = c.pca_components;
  j["out_dir"] = c.out_dir;
  j["seed"] = c.seed;
  j["models"] = c.models;
  json conditions = json::array();
  for (PromptCondition cond : c.conditions) conditions.push_back(to_string(cond));
  j["conditions"] = conditions;
  j["passes"] = c.passes;
  j["temperature"] = c.temperature;
  j["max_tokens"] = c.max_tokens;
  j["cache_dir"] = c.cache_dir;
  j["bindings_path"] = c.bindings_path;
  j["mock"] = c.mock;
  j["mock_transform"] = c.mock_transform;
  j["placement"] = to_string(c.placement);
  j["export_format"] = c.export_format;
  return j;
}

std::string metadata_header(const RunConfig& config) {
  std::string out = "# styledrift ";
  out += kVersion;
  out += " config_hash=" + config_hash(config);
  out += " seed=" + std::to_string(config.seed);
  out += "\n# config=" + config_json(config).dump();
  out += "\n";
  return out;
}

json meta_record(const RunConfig& config) {
  json meta;
  meta["type"] = "meta";
  meta["version"] = kVersion;
  meta["config_hash"] = config_hash(config);
  meta["seed"] = config.seed;
  meta["config"] = config_json(config);
  return meta;
}

void write_file(const RunConfig& config, CommandResult& result,
                const std::string& filename, const std::string& content) {
  fs::create_directories(config.out_dir);
  const fs::path path = fs::path(config.out_dir) / filename;
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  }
  out << content;
  result.written_files.push_back(path.string());
}

std::string lexicon_file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return internal::fnv1a64_hex(ss.str());
}

struct LoadedResources {
  MarkerResources resources;
  std::map<std::string, std::string> lexicon_hashes;
};

LoadedResources load_resources(const RunConfig& config,
                               const std::vector<Document>& originals) {
  LoadedResources loaded;
  auto load = [&](const std::string& path, LexiconKind kind, const char* label) {
    if (path.empty()) {
      throw Error(ErrorCode::InvalidArgument,
                  std::string("missing lexicon path: ") + label);
    }
    loaded.lexicon_hashes[label] = lexicon_file_hash(path);
    return load_lexicon(path, kind);
  };
  loaded.resources.function_words =
      load(config.function_words_path, LexiconKind::Wordlist, "function_words");
  loaded.resources.first_person =
      load(config.first_person_path, LexiconKind::Wordlist, "first_person");
  loaded.resources.emotion =
      load(config.emotion_path, LexiconKind::NrcFormat, "emotion");
  loaded.resources.causal =
      load(config.causal_path, LexiconKind::Phraselist, "causal");
  loaded.resources.retrospective =
      load(config.retrospective_path, LexiconKind::Phraselist, "retrospective");
  loaded.resources.eventive =
      load(config.eventive_path, LexiconKind::Wordlist, "eventive");
  loaded.resources.abstract_suffixes =
      load(config.suffixes_path, LexiconKind::Suffixlist, "suffixes");
  loaded.resources.mfw_scope = config.mfw_scope;
  loaded.resources.corpus_mfw = build_mfw_set(originals);
  return loaded;
}

PairedCorpus load_corpus(const RunConfig& config) {
  IngestOptions options;
  options.format = config.format;
  options.min_words = config.min_words;
  return ingest_corpus(config.corpus_path, options);
}

// Marker vectors for every distinct document (originals once, rewrites once).
std::unordered_map<std::string, MarkerVector> compute_all_vectors(
    const PairedCorpus& corpus, const MarkerResources& resources) {
  std::vector<const Document*> docs;
  for (const Document& doc : corpus.originals) docs.push_back(&doc);
  for (const DocumentPair& pair : corpus.pairs) docs.push_back(&pair.rewrite);

  const std::vector<MarkerVector> vectors =
      internal::parallel_map(docs, [&](const Document* doc) {
        return compute_marker_vector(*doc, resources);
      });

  std::unordered_map<std::string, MarkerVector> by_id;
  for (std::size_t i = 0; i < docs.size(); ++i) by_id[docs[i]->id] = vectors[i];
  return by_id;
}

using SliceKey = std::pair<std::string, int>;  // model_id, condition

std::map<SliceKey, std::vector<const DocumentPair*>> group_slices(
    const PairedCorpus& corpus) {
  std::map<SliceKey, std::vector<const DocumentPair*>> slices;
  for (const DocumentPair& pair : corpus.pairs) {
    slices[{pair.model_id, static_cast<int>(pair.condition)}].push_back(&pair);
  }
  return slices;
}

DVariantOverrides parse_overrides(const RunConfig& config) {
  DVariantOverrides overrides;
  for (const auto& [name, variant] : config.d_variant_overrides) {
    const auto marker = parse_marker(name);
    if (!marker) {
      throw Error(ErrorCode::InvalidArgument, "unknown marker in override: " + name);
    }
    if (variant == "pooled") {
      overrides[*marker] = DVariant::Pooled;
    } else if (variant == "paired") {
      overrides[*marker] = DVariant::Paired;
    } else {
      throw Error(ErrorCode::InvalidArgument,
                  "d-variant must be pooled or paired, got: " + variant);
    }
  }
  return overrides;
}

std::vector<Marker> markers_by_name() {
  std::vector<Marker> order(all_markers().begin(), all_markers().end());
  std::sort(order.begin(), order.end(), [](Marker a, Marker b) {
    return marker_name(a) < marker_name(b);
  });
  return order;
}

}  // namespace

std::string config_hash(const RunConfig& config) {
  return internal::fnv1a64_hex(config_json(config).dump());
}

CommandResult cmd_markers(const RunConfig& config) {
  CommandResult result;
  const PairedCorpus corpus = load_corpus(config);
  LoadedResources loaded = load_resources(config, corpus.originals);
  const auto vectors = compute_all_vectors(corpus, loaded.resources);

  std::vector<std::string> header = {"id", "role", "model_id", "condition",
                                     "pass", "source"};
  for (Marker m : all_markers()) header.emplace_back(marker_name(m));
  for (Marker m : all_markers()) {
    header.emplace_back(std::string(marker_name(m)) + "_degenerate");
  }

  std::string csv = metadata_header(config);
  csv += internal::csv_join(header) + "\n";

  auto append_row = [&](const Document& doc, const char* role,
                        const DocumentPair* pair) {
    const MarkerVector& v = vectors.at(doc.id);
    std::vector<std::string> row = {
        doc.id,
        role,
        pair ? pair->model_id : "",
        pair ? to_string(pair->condition) : "",
        pair ? std::to_string(pair->pass_index) : "",
        doc.source,
    };
    for (Marker m : all_markers()) row.push_back(format_number(v.value(m)));
    for (Marker m : all_markers()) row.push_back(v.is_degenerate(m) ? "1" : "0");
    csv += internal::csv_join(row) + "\n";
    if (std::any_of(v.degenerate.begin(), v.degenerate.end(),
                    [](bool b) { return b; })) {
      result.warnings.push_back("degenerate markers for document '" + doc.id + "'");
    }
  };

  for (const Document& doc : corpus.originals) append_row(doc, "original", nullptr);
  for (const DocumentPair& pair : corpus.pairs) {
    append_row(pair.rewrite, "rewrite", &pair);
  }
  write_file(config, result, "markers.csv", csv);

  json meta = meta_record(config);
  meta["lexicon_hashes"] = loaded.lexicon_hashes;
  meta["mfw"] = {
      {"scope", to_string(config.mfw_scope)},
      {"size", loaded.resources.corpus_mfw.words.size()},
      {"vocabulary_size", loaded.resources.corpus_mfw.vocabulary_size},
  };
  json names = json::array();
  for (Marker m : all_markers()) names.push_back(std::string(marker_name(m)));
  meta["marker_names"] = names;
  write_file(config, result, "markers_meta.json", meta.dump(2) + "\n");

  if (!result.warnings.empty()) result.exit_code = 1;
  return result;
}

namespace {

MarkerPairSet make_pair_set(
    const std::vector<const DocumentPair*>& pairs,
    const std::unordered_map<std::string, MarkerVector>& vectors) {
  MarkerPairSet set;
  if (!pairs.empty()) {
    set.model_id = pairs.front()->model_id;
    set.condition = pairs.front()->condition;
  }
  for (const DocumentPair* pair : pairs) {
    set.original_ids.push_back(pair->original.id);
    set.originals.push_back(vectors.at(pair->original.id));
    set.rewrites.push_back(vectors.at(pair->rewrite.id));
  }
  return set;
}

std::string effect_table_csv(const RunConfig& config, const EffectTable& table) {
  std::string csv = metadata_header(config);
  csv += "marker,family,d,d_variant,t_stat,p,p_adjusted,significant,"
         "mean_original,mean_rewrite,percent_change,n_pairs,degenerate\n";
  for (Marker marker : markers_by_name()) {
    const EffectRecord* r = table.find(marker);
    if (r == nullptr) continue;
    std::vector<std::string> row = {
        std::string(marker_name(r->marker)),
        is_core_marker(r->marker) ? "core" : "stance",
        format_number(r->d),
        r->d_variant == DVariant::Pooled ? "pooled" : "paired",
        format_number(r->t_stat),
        format_number(r->p),
        format_number(r->p_adjusted),
        r->significant ? "1" : "0",
        format_number(r->mean_original),
        format_number(r->mean_rewrite),
        format_number(r->percent_change),
        std::to_string(r->n_pairs),
        r->degenerate ? "1" : "0",
    };
    csv += internal::csv_join(row) + "\n";
  }
  return csv;
}

}  // namespace

CommandResult cmd_effects(const RunConfig& config) {
  CommandResult result;
  const PairedCorpus corpus = load_corpus(config);
  LoadedResources loaded = load_resources(config, corpus.originals);
  const auto vectors = compute_all_vectors(corpus, loaded.resources);
  const DVariantOverrides overrides = parse_overrides(config);
  const auto slices = group_slices(corpus);

  std::map<SliceKey, EffectTable> tables;
  std::map<SliceKey, double> median_iccs;
  std::string robustness_csv;

  for (const auto& [key, pairs] : slices) {
    if (pairs.size() < 3) {
      result.warnings.push_back("slice (" + key.first + ", " +
                                to_string(static_cast<PromptCondition>(key.second)) +
                                ") skipped: fewer than 3 pairs");
      continue;
    }
    const MarkerPairSet set = make_pair_set(pairs, vectors);
    tables[key] = build_effect_table(set, config.alpha,
                                     overrides.empty() ? nullptr : &overrides);

    // replicate reliability across passes, when present
    std::set<int> distinct_passes;
    for (const DocumentPair* pair : pairs) distinct_passes.insert(pair->pass_index);
    if (distinct_passes.size() >= 2) {
      std::vector<MarkerPairSet> per_pass;
      for (int pass : distinct_passes) {
        std::vector<const DocumentPair*> subset;
        for (const DocumentPair* pair : pairs) {
          if (pair->pass_index == pass) subset.push_back(pair);
        }
        per_pass.push_back(make_pair_set(subset, vectors));
      }
      try {
        const ReplicateReliability reliability = replicate_reliability(per_pass);
        median_iccs[key] = reliability.median_icc;
        if (robustness_csv.empty()) {
          robustness_csv = metadata_header(config);
          // column name pins the ICC variant in the output itself
          robustness_csv +=
              "model_id,condition,marker,icc_2_1,degenerate,n_items,n_raters\n";
        }
        for (const MarkerIcc& entry : reliability.per_marker) {
          std::vector<std::string> row = {
              key.first,
              to_string(static_cast<PromptCondition>(key.second)),
              std::string(marker_name(entry.marker)),
              format_number(entry.icc),
              entry.degenerate ? "1" : "0",
              std::to_string(entry.n_items),
              std::to_string(entry.n_raters),
          };
          robustness_csv += internal::csv_join(row) + "\n";
        }
      } catch (const Error& e) {
        result.warnings.push_back("reliability skipped for (" + key.first + ", " +
                                  to_string(static_cast<PromptCondition>(key.second)) +
                                  "): " + e.what());
      }
    }
  }

  for (const auto& [key, table] : tables) {
    const std::string filename =
        "effects_" + sanitize_component(key.first) + "_" +
        to_string(static_cast<PromptCondition>(key.second)) + ".csv";
    write_file(config, result, filename, effect_table_csv(config, table));
  }

  // summary with comparisons against each model's generic slice
  std::string summary = metadata_header(config);
  summary += "model_id,condition,n_pairs,mean_abs_d,direction_agreement_vs_generic,"
             "direction_zero_flag,reduction_vs_generic,effect_vector_r_vs_generic,"
             "median_icc\n";
  for (const auto& [key, table] : tables) {
    const SliceKey generic_key{key.first,
                               static_cast<int>(PromptCondition::Generic)};
    std::string agreement;
    std::string zero_flag;
    std::string reduction;
    std::string correlation;
    if (key != generic_key) {
      auto generic_it = tables.find(generic_key);
      if (generic_it != tables.end()) {
        const DirectionAgreement agr =
            direction_agreement(generic_it->second, table);
        agreement = format_number(agr.percent);
        zero_flag = agr.zero_flagged ? "1" : "0";
        try {
          reduction = format_number(reduction_percent(generic_it->second, table));
        } catch (const Error&) {
          reduction = "nan";
        }
        try {
          correlation =
              format_number(effect_vector_correlation(generic_it->second, table));
        } catch (const Error&) {
          correlation = "nan";
        }
      }
    }
    std::string median_icc;
    if (auto it = median_iccs.find(key); it != median_iccs.end()) {
      median_icc = format_number(it->second);
    }
    std::vector<std::string> row = {
        key.first,
        to_string(static_cast<PromptCondition>(key.second)),
        std::to_string(table.records.empty() ? 0 : table.records.front().n_pairs),
        format_number(table.mean_abs_d),
        agreement,
        zero_flag,
        reduction,
        correlation,
        median_icc,
    };
    summary += internal::csv_join(row) + "\n";
  }
  write_file(config, result, "effects_summary.csv", summary);

  if (!robustness_csv.empty()) {
    write_file(config, result, "robustness.csv", robustness_csv);
  }

  if (!result.warnings.empty()) result.exit_code = 1;
  return result;
}

namespace {

struct SliceFeatures {
  SliceKey key;
  std::vector<Document> rewrite_docs;
  std::map<std::string, std::string> parent_of;          // rewrite id -> original id
  std::map<std::string, std::pair<int, int>> cell_meta;  // rewrite id -> (condition, pass)
};

std::vector<SliceFeatures> collect_slices(const PairedCorpus& corpus) {
  std::vector<SliceFeatures> out;
  for (const auto& [key, pairs] : group_slices(corpus)) {
    SliceFeatures slice;
    slice.key = key;
    for (const DocumentPair* pair : pairs) {
      slice.rewrite_docs.push_back(pair->rewrite);
      slice.parent_of[pair->rewrite.id] = pair->original.id;
      slice.cell_meta[pair->rewrite.id] = {static_cast<int>(pair->condition),
                                           pair->pass_index};
    }
    out.push_back(std::move(slice));
  }
  return out;
}

std::string match_report_csv(const RunConfig& config, const MatchReport& report) {
  std::string csv = metadata_header(config);
  csv += "rewrite_id,parent_id,nearest_id,distance,matched,tie\n";
  for (const MatchEntry& entry : report.per_document) {
    std::vector<std::string> row = {
        entry.rewrite_id,  entry.parent_id,
        entry.nearest_id,  format_number(entry.distance),
        entry.matched ? "1" : "0", entry.tie ? "1" : "0",
    };
    csv += internal::csv_join(row) + "\n";
  }
  return csv;
}

// Matching for one feature space across all slices; records stats and writes
// per-slice CSV reports.
void run_matching(const RunConfig& config, CommandResult& result,
                  const PairedCorpus& corpus, const MarkerResources& resources,
                  FeatureSpace space, std::string& stats_jsonl) {
  const FeatureMatrix originals_raw =
      build_features(corpus.originals, space, &resources);
  for (const std::string& id : originals_raw.dropped_rows) {
    result.warnings.push_back("original '" + id + "' dropped from " +
                              std::string(to_string(space)) + " features");
  }
  if (originals_raw.values.rows() < 2) {
    result.warnings.push_back(std::string("matching skipped for space ") +
                              to_string(space) + ": fewer than 2 original rows");
    return;
  }
  const Standardization params = compute_standardization(originals_raw);
  const FeatureMatrix originals_std = standardize(originals_raw, params);
  const std::set<std::string> original_ids(originals_std.row_ids.begin(),
                                           originals_std.row_ids.end());

  const MatchMetric metric = space == FeatureSpace::WordDelta
                                 ? MatchMetric::BurrowsDelta
                                 : MatchMetric::EuclideanStandardized;

  for (const SliceFeatures& slice : collect_slices(corpus)) {
    FeatureMatrix rewrites_raw = build_features(slice.rewrite_docs, space, &resources);
    for (const std::string& id : rewrites_raw.dropped_rows) {
      result.warnings.push_back("rewrite '" + id + "' dropped from " +
                                std::string(to_string(space)) + " features");
    }
    FeatureMatrix rewrites_std = standardize(rewrites_raw, params);

    // rewrites whose parent lost its feature row cannot be matched
    std::vector<Eigen::Index> keep;
    for (std::size_t r = 0; r < rewrites_std.row_ids.size(); ++r) {
      const std::string& parent = slice.parent_of.at(rewrites_std.row_ids[r]);
      if (original_ids.count(parent) > 0) {
        keep.push_back(static_cast<Eigen::Index>(r));
      } else {
        result.warnings.push_back("rewrite '" + rewrites_std.row_ids[r] +
                                  "' skipped in matching: parent row missing");
      }
    }
    if (keep.size() != rewrites_std.row_ids.size()) {
      FeatureMatrix filtered;
      filtered.feature_names = rewrites_std.feature_names;
      filtered.standardization = rewrites_std.standardization;
      filtered.values.resize(static_cast<Eigen::Index>(keep.size()),
                             rewrites_std.values.cols());
      for (std::size_t i = 0; i < keep.size(); ++i) {
        filtered.values.row(static_cast<Eigen::Index>(i)) =
            rewrites_std.values.row(keep[i]);
        filtered.row_ids.push_back(
            rewrites_std.row_ids[static_cast<std::size_t>(keep[i])]);
      }
      rewrites_std = std::move(filtered);
    }
    if (rewrites_std.row_ids.empty()) {
      result.warnings.push_back("matching skipped for a slice: no rewrite rows");
      continue;
    }

    const MatchReport report =
        source_match(originals_std, rewrites_std, slice.parent_of, metric, space);

    const std::string condition_label =
        to_string(static_cast<PromptCondition>(slice.key.second));
    json record;
    record["type"] = "source_match";
    record["feature_space"] = to_string(space);
    record["model_id"] = slice.key.first;
    record["condition"] = condition_label;
    record["accuracy"] = report.accuracy;
    record["chance"] = report.chance;
    record["n_rewrites"] = report.per_document.size();
    stats_jsonl += record.dump() + "\n";

    const std::string filename = "match_" + std::string(to_string(space)) + "_" +
                                 sanitize_component(slice.key.first) + "_" +
                                 condition_label + ".csv";
    write_file(config, result, filename, match_report_csv(config, report));
  }
}

}  // namespace

CommandResult cmd_convergence(const RunConfig& config) {
  CommandResult result;
  const PairedCorpus corpus = load_corpus(config);
  LoadedResources loaded = load_resources(config, corpus.originals);
  const MarkerResources& resources = loaded.resources;

  std::string stats_jsonl = meta_record(config).dump() + "\n";

  // --- PCA + centroid shifts in the configured space -------------------------
  const FeatureSpace pca_space = config.feature_space;
  const FeatureMatrix originals_raw =
      build_features(corpus.originals, pca_space, &resources);
  for (const std::string& id : originals_raw.dropped_rows) {
    result.warnings.push_back("original '" + id + "' dropped from PCA features");
  }
  if (originals_raw.values.rows() < 3) {
    throw Error(ErrorCode::InvalidArgument,
                "convergence needs feature rows for at least 3 originals");
  }
  const Standardization params = compute_standardization(originals_raw);
  const FeatureMatrix originals_std = standardize(originals_raw, params);

  const int k_max = static_cast<int>(
      std::min<Eigen::Index>(originals_std.values.rows() - 1,
                             originals_std.values.cols()));
  int k = std::min(config.pca_components, k_max);
  if (k < config.pca_components) {
    result.warnings.push_back("PCA components clamped to " + std::to_string(k));
  }
  const PcaModel pca = pca_fit(originals_std.values, k);
  const Eigen::MatrixXd original_coords = pca_project(pca, originals_std.values);

  {
    json record;
    record["type"] = "pca";
    record["feature_space"] = to_string(pca_space);
    record["explained_variance_ratio"] = pca.explained_variance_ratio;
    record["rank_deficient"] = pca.rank_deficient;
    record["n_components"] = k;
    record["features"] = originals_std.feature_names;
    stats_jsonl += record.dump() + "\n";
  }

  std::vector<std::string> coord_header = {"id", "role", "model_id", "condition",
                                           "pass"};
  for (int c = 1; c <= k; ++c) coord_header.push_back("pc" + std::to_string(c));
  std::string coords_csv = metadata_header(config);
  coords_csv += internal::csv_join(coord_header) + "\n";
  for (std::size_t r = 0; r < originals_std.row_ids.size(); ++r) {
    std::vector<std::string> row = {originals_std.row_ids[r], "original", "", "", ""};
    for (int c = 0; c < k; ++c) {
      row.push_back(format_number(original_coords(static_cast<Eigen::Index>(r), c)));
    }
    coords_csv += internal::csv_join(row) + "\n";
  }

  for (const SliceFeatures& slice : collect_slices(corpus)) {
    FeatureMatrix rewrites_raw =
        build_features(slice.rewrite_docs, pca_space, &resources);
    for (const std::string& id : rewrites_raw.dropped_rows) {
      result.warnings.push_back("rewrite '" + id + "' dropped from PCA features");
    }
    if (rewrites_raw.values.rows() == 0) continue;
    const FeatureMatrix rewrites_std = standardize(rewrites_raw, params);
    const Eigen::MatrixXd rewrite_coords = pca_project(pca, rewrites_std.values);

    const std::string condition_label =
        to_string(static_cast<PromptCondition>(slice.key.second));
    for (std::size_t r = 0; r < rewrites_std.row_ids.size(); ++r) {
      const auto& meta = slice.cell_meta.at(rewrites_std.row_ids[r]);
      std::vector<std::string> row = {rewrites_std.row_ids[r], "rewrite",
                                      slice.key.first, condition_label,
                                      std::to_string(meta.second)};
      for (int c = 0; c < k; ++c) {
        row.push_back(format_number(rewrite_coords(static_cast<Eigen::Index>(r), c)));
      }
      coords_csv += internal::csv_join(row) + "\n";
    }

    const CentroidShift shift = centroid_shift(original_coords, rewrite_coords);
    json record;
    record["type"] = "centroid_shift";
    record["feature_space"] = to_string(pca_space);
    record["model_id"] = slice.key.first;
    record["condition"] = condition_label;
    std::vector<double> vec(shift.vector.data(),
                            shift.vector.data() + shift.vector.size());
    record["vector"] = vec;
    record["magnitude"] = shift.magnitude;
    stats_jsonl += record.dump() + "\n";
  }
  const std::string coords_name =
      "coordinates_" + std::string(to_string(pca_space)) + ".csv";
  write_file(config, result, coords_name, coords_csv);

  // --- dispersion + variance compression in the full space -------------------
  const FeatureMatrix full_orig_raw =
      build_features(corpus.originals, FeatureSpace::Full, &resources);
  {
    json record;
    record["type"] = "full_feature_set";
    record["features"] = full_orig_raw.feature_names;
    stats_jsonl += record.dump() + "\n";
  }
  if (full_orig_raw.values.rows() >= 2) {
    const Standardization full_params = compute_standardization(full_orig_raw);
    const FeatureMatrix full_orig_std = standardize(full_orig_raw, full_params);
    const DispersionResult orig_disp = multivariate_dispersion(full_orig_std.values);

    for (const SliceFeatures& slice : collect_slices(corpus)) {
      FeatureMatrix full_rewr_raw =
          build_features(slice.rewrite_docs, FeatureSpace::Full, &resources);
      if (full_rewr_raw.values.rows() < 2) {
        result.warnings.push_back("dispersion skipped for a slice: fewer than 2 rows");
        continue;
      }
      const FeatureMatrix full_rewr_std = standardize(full_rewr_raw, full_params);
      const DispersionResult rewr_disp =
          multivariate_dispersion(full_rewr_std.values);
      const std::string condition_label =
          to_string(static_cast<PromptCondition>(slice.key.second));

      json record;
      record["type"] = "dispersion";
      record["feature_space"] = "full";
      record["model_id"] = slice.key.first;
      record["condition"] = condition_label;
      record["original_mean_distance"] = orig_disp.mean;
      record["rewrite_mean_distance"] = rewr_disp.mean;
      record["ratio"] =
          orig_disp.mean == 0.0 ? 1.0 : rewr_disp.mean / orig_disp.mean;
      try {
        const MannWhitneyResult mw =
            mann_whitney_u(orig_disp.distances, rewr_disp.distances);
        record["mann_whitney_u"] = mw.u;
        record["p"] = mw.p;
      } catch (const Error&) {
        record["mann_whitney_u"] = nullptr;
        record["p"] = nullptr;
      }
      stats_jsonl += record.dump() + "\n";

      // variance compression on the raw (unstandardized) feature columns
      const VarianceCompressionReport compression =
          variance_compression(full_orig_raw, full_rewr_raw, config.alpha);
      json creport;
      creport["type"] = "variance_compression";
      creport["feature_space"] = "full";
      creport["model_id"] = slice.key.first;
      creport["condition"] = condition_label;
      creport["fraction_compressed"] = compression.fraction_compressed;
      creport["median_reduction"] = compression.median_reduction;
      creport["n_features"] = compression.features.size();
      creport["alpha"] = compression.alpha;
      stats_jsonl += creport.dump() + "\n";

      std::string csv = metadata_header(config);
      csv += "feature,variance_ratio,levene_p,compressed,degenerate\n";
      for (const FeatureCompression& feature : compression.features) {
        std::vector<std::string> row = {
            feature.feature,
            format_number(feature.variance_ratio),
            format_number(feature.levene_p),
            feature.compressed ? "1" : "0",
            feature.degenerate ? "1" : "0",
        };
        csv += internal::csv_join(row) + "\n";
      }
      const std::string filename = "compression_" +
                                   sanitize_component(slice.key.first) + "_" +
                                   condition_label + ".csv";
      write_file(config, result, filename, csv);
    }
  } else {
    result.warnings.push_back("full-space analyses skipped: too few original rows");
  }

  // --- source matching in all three spaces -----------------------------------
  for (FeatureSpace space :
       {FeatureSpace::CharNgram, FeatureSpace::WordDelta, FeatureSpace::Full}) {
    run_matching(config, result, corpus, resources, space, stats_jsonl);
  }

  write_file(config, result, "convergence_stats.jsonl", stats_jsonl);
  if (!result.warnings.empty()) result.exit_code = 1;
  return result;
}

CommandResult cmd_match(const RunConfig& config) {
  CommandResult result;
  const PairedCorpus corpus = load_corpus(config);
  LoadedResources loaded = load_resources(config, corpus.originals);

  std::string stats_jsonl = meta_record(config).dump() + "\n";
  for (FeatureSpace space :
       {FeatureSpace::CharNgram, FeatureSpace::WordDelta, FeatureSpace::Full}) {
    run_matching(config, result, corpus, loaded.resources, space, stats_jsonl);
  }
  write_file(config, result, "match_stats.jsonl", stats_jsonl);
  if (!result.warnings.empty()) result.exit_code = 1;
  return result;
}

namespace {

std::vector<ProviderBinding> load_bindings(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::InvalidArgument, "cannot open bindings file: " + path);
  }
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_array()) {
    throw Error(ErrorCode::InvalidArgument,
                "bindings file must hold a JSON array of bindings");
  }
  std::vector<ProviderBinding> bindings;
  for (const json& item : doc) {
    ProviderBinding binding;
    binding.model_id = item.value("model_id", "");
    binding.endpoint = item.value("endpoint", "");
    binding.credential_env = item.value("credential_env", "");
    binding.requests_per_minute = item.value("requests_per_minute", 60);
    binding.max_attempts = item.value("max_attempts", 3);
    if (item.contains("backoff_ms")) {
      binding.backoff_ms = item["backoff_ms"].get<std::vector<int>>();
    }
    if (binding.model_id.empty()) {
      throw Error(ErrorCode::InvalidArgument, "binding without model_id");
    }
    bindings.push_back(std::move(binding));
  }
  return bindings;
}

std::set<std::string> existing_record_ids(const fs::path& path) {
  std::set<std::string> ids;
  std::ifstream in(path, std::ios::binary);
  if (!in) return ids;
  std::string line;
  while (std::getline(in, line)) {
    json record = json::parse(line, nullptr, false);
    if (!record.is_discarded() && record.contains("id")) {
      ids.insert(record["id"].get<std::string>());
    }
  }
  return ids;
}

}  // namespace

CommandResult cmd_acquire(const RunConfig& config,
                          const ProviderRegistry* test_registry) {
  CommandResult result;
  const PairedCorpus corpus = load_corpus(config);
  if (config.models.empty() || config.conditions.empty()) {
    throw Error(ErrorCode::InvalidArgument,
                "acquire requires at least one model and one condition");
  }

  ProviderRegistry registry;
  if (test_registry != nullptr) {
    registry = *test_registry;
  } else if (config.mock) {
    MockProvider::Transform transform;
    if (config.mock_transform == "identity") {
      transform = [](const std::string& s) { return s; };
    } else if (config.mock_transform == "expand_contractions") {
      transform = [](const std::string& s) { return expand_contractions(s); };
    } else {
      throw Error(ErrorCode::InvalidArgument,
                  "unknown mock transform: " + config.mock_transform);
    }
    for (const std::string& model : config.models) {
      ProviderHandle handle;
      handle.provider = std::make_shared<MockProvider>(transform);
      handle.retry.backoff_ms = {0};
      registry[model] = handle;
    }
  } else {
    if (config.bindings_path.empty()) {
      throw Error(ErrorCode::InvalidArgument,
                  "acquire needs --bindings or --mock");
    }
    for (const ProviderBinding& binding : load_bindings(config.bindings_path)) {
      registry[binding.model_id] = make_http_provider(binding);
    }
  }

  std::unique_ptr<ResponseCache> cache;
  if (!config.cache_dir.empty()) {
    cache = std::make_unique<ResponseCache>(config.cache_dir);
  }

  const BatchResult batch = batch_rewrite(
      corpus.originals, config.models, config.conditions, config.passes, registry,
      cache.get(), config.temperature, config.max_tokens, config.placement);

  fs::create_directories(config.out_dir);
  const fs::path out_path = fs::path(config.out_dir) / "acquired.jsonl";
  const std::set<std::string> existing = existing_record_ids(out_path);

  std::ofstream out(out_path, std::ios::binary | std::ios::app);
  if (!out) {
    throw Error(ErrorCode::InvalidArgument, "cannot write " + out_path.string());
  }
  std::size_t appended = 0;
  for (const DocumentPair& pair : batch.corpus.pairs) {
    if (existing.count(pair.rewrite.id) > 0) continue;
    json record;
    record["id"] = pair.rewrite.id;
    record["text"] = pair.rewrite.text;
    record["role"] = "rewrite";
    record["parent_id"] = pair.original.id;
    if (!pair.rewrite.source.empty()) record["source"] = pair.rewrite.source;
    record["model_id"] = pair.model_id;
    record["condition"] = to_string(pair.condition);
    record["pass"] = pair.pass_index;
    out << record.dump() << '\n';
    ++appended;
  }
  out.close();
  result.written_files.push_back(out_path.string());

  if (!batch.errors.empty()) {
    std::string errors_jsonl = meta_record(config).dump() + "\n";
    for (const CellError& error : batch.errors) {
      json record;
      record["type"] = "cell_error";
      record["original_id"] = error.cell.original_id;
      record["model_id"] = error.cell.model_id;
      record["condition"] = to_string(error.cell.condition);
      record["pass"] = error.cell.pass_index;
      record["message"] = error.message;
      errors_jsonl += record.dump() + "\n";
      result.warnings.push_back("cell failed: " + error.cell.original_id + " / " +
                                error.cell.model_id);
    }
    write_file(config, result, "acquire_errors.jsonl", errors_jsonl);
  }

  if (batch.corpus.pairs.empty() && !batch.errors.empty()) {
    result.exit_code = 2;  // total failure
  } else if (!batch.errors.empty()) {
    result.exit_code = 1;
  }
  (void)appended;
  return result;
}

CommandResult cmd_export(const RunConfig& config) {
  CommandResult result;
  const PairedCorpus corpus = load_corpus(config);
  const bool csv = config.export_format == "csv";
  if (!csv && config.export_format != "jsonl") {
    throw Error(ErrorCode::InvalidArgument,
                "export format must be jsonl or csv, got: " + config.export_format);
  }
  fs::create_directories(config.out_dir);
  const fs::path path =
      fs::path(config.out_dir) / (csv ? "export.csv" : "export.jsonl");
  export_corpus(corpus, path.string(), csv ? CorpusFormat::Csv : CorpusFormat::Jsonl);
  result.written_files.push_back(path.string());
  return result;
}

}  // namespace styledrift
