#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "styledrift/error.hpp"
#include "styledrift/report.hpp"
#include "styledrift/version.hpp"

namespace {

using styledrift::RunConfig;

struct CliState {
  RunConfig config;
  std::string format = "auto";
  std::string mfw_scope = "corpus";
  std::string feature_space = "char_ngram";
  std::string placement = "user";
  std::string lexicon_dir = "data/lexicons";
  std::vector<std::string> d_variants;  // marker=pooled|paired
  std::vector<std::string> conditions;
};

void add_common_options(CLI::App* cmd, CliState& state) {
  cmd->add_option("--corpus", state.config.corpus_path, "Corpus file (JSONL or CSV)")
      ->required();
  cmd->add_option("--format", state.format,
                  "Corpus format: jsonl, csv, or auto (by extension)")
      ->check(CLI::IsMember({"auto", "jsonl", "csv"}));
  cmd->add_option("--min-words", state.config.min_words,
                  "Drop originals shorter than this many word tokens (0 = off)");
  cmd->add_option("--out", state.config.out_dir, "Output directory")->required();
  cmd->add_option("--seed", state.config.seed, "Run seed recorded in all outputs");
  cmd->add_option("--alpha", state.config.alpha, "FDR significance level");
  cmd->add_option("--mfw-scope", state.mfw_scope,
                  "MFW reference set: corpus (originals-wide) or per_text")
      ->check(CLI::IsMember({"corpus", "per_text"}));
  cmd->add_option("--d-variant", state.d_variants,
                  "Override d variant per marker, e.g. mtld=paired (repeatable)");
  cmd->add_option("--feature-space", state.feature_space,
                  "Feature space for PCA outputs")
      ->check(CLI::IsMember({"char_ngram", "word_delta", "full"}));
  cmd->add_option("--pca-components", state.config.pca_components,
                  "Number of principal components to emit");
  cmd->add_option("--lexicons", state.lexicon_dir,
                  "Directory holding the bundled lexicon files");
  cmd->add_option("--function-words", state.config.function_words_path,
                  "Function word list (overrides --lexicons)");
  cmd->add_option("--first-person", state.config.first_person_path,
                  "First-person pronoun list");
  cmd->add_option("--emotion", state.config.emotion_path,
                  "Emotion lexicon in NRC format");
  cmd->add_option("--causal", state.config.causal_path, "Causal connective phrases");
  cmd->add_option("--retrospective", state.config.retrospective_path,
                  "Retrospective framing phrases");
  cmd->add_option("--eventive", state.config.eventive_path, "Eventive verb forms");
  cmd->add_option("--suffixes", state.config.suffixes_path, "Abstract-noun suffixes");
}

void finalize_config(CliState& state) {
  namespace fs = std::filesystem;
  RunConfig& config = state.config;

  if (state.format == "auto") {
    config.format = fs::path(config.corpus_path).extension() == ".csv"
                        ? styledrift::CorpusFormat::Csv
                        : styledrift::CorpusFormat::Jsonl;
  } else {
    config.format = state.format == "csv" ? styledrift::CorpusFormat::Csv
                                          : styledrift::CorpusFormat::Jsonl;
  }

  config.mfw_scope = state.mfw_scope == "per_text" ? styledrift::MfwScope::PerText
                                                   : styledrift::MfwScope::Corpus;
  if (auto space = styledrift::parse_feature_space(state.feature_space)) {
    config.feature_space = *space;
  }
  config.placement = state.placement == "system"
                         ? styledrift::PromptPlacement::System
                         : styledrift::PromptPlacement::User;

  for (const std::string& item : state.d_variants) {
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos) {
      throw styledrift::Error(styledrift::ErrorCode::InvalidArgument,
                              "--d-variant expects marker=pooled|paired");
    }
    config.d_variant_overrides[item.substr(0, eq)] = item.substr(eq + 1);
  }

  for (const std::string& label : state.conditions) {
    auto condition = styledrift::parse_condition(label);
    if (!condition) {
      throw styledrift::Error(styledrift::ErrorCode::InvalidArgument,
                              "unknown condition: " + label);
    }
    config.conditions.push_back(*condition);
  }

  auto default_path = [&](std::string& field, const char* filename) {
    if (field.empty()) {
      field = (fs::path(state.lexicon_dir) / filename).string();
    }
  };
  default_path(config.function_words_path, "function_words.txt");
  default_path(config.first_person_path, "first_person.txt");
  default_path(config.emotion_path, "emotion_sample_nrc.txt");
  default_path(config.causal_path, "causal.txt");
  default_path(config.retrospective_path, "retrospective.txt");
  default_path(config.eventive_path, "eventive_verbs.txt");
  default_path(config.suffixes_path, "abstract_suffixes.txt");
}

int finish(const styledrift::CommandResult& result) {
  for (const std::string& warning : result.warnings) {
    std::cerr << "warning: " << warning << "\n";
  }
  for (const std::string& file : result.written_files) {
    std::cout << file << "\n";
  }
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"styledrift: stylometric drift analysis for paired corpora"};
  app.set_version_flag("--version", styledrift::kVersion);
  app.require_subcommand(1);

  CliState state;

  CLI::App* markers = app.add_subcommand("markers", "Per-document marker table");
  add_common_options(markers, state);

  CLI::App* effects =
      app.add_subcommand("effects", "Paired effect tables with FDR control");
  add_common_options(effects, state);

  CLI::App* convergence = app.add_subcommand(
      "convergence", "PCA, dispersion, variance compression, and matching");
  add_common_options(convergence, state);

  CLI::App* match =
      app.add_subcommand("match", "Source-rewrite matching in all feature spaces");
  add_common_options(match, state);

  CLI::App* acquire =
      app.add_subcommand("acquire", "Rewrite originals through LLM providers");
  add_common_options(acquire, state);
  acquire->add_option("--models", state.config.models, "Model ids to run")
      ->required();
  acquire
      ->add_option("--conditions", state.conditions,
                   "Prompt conditions (generic voice rewrite_only)")
      ->default_val(std::vector<std::string>{"generic", "voice", "rewrite_only"});
  acquire->add_option("--passes", state.config.passes, "Replicate passes per cell");
  acquire->add_option("--temperature", state.config.temperature,
                      "Sampling temperature");
  acquire->add_option("--max-tokens", state.config.max_tokens,
                      "Maximum completion tokens");
  acquire->add_option("--cache-dir", state.config.cache_dir,
                      "Content-addressed response cache directory");
  acquire->add_option("--bindings", state.config.bindings_path,
                      "JSON file of provider bindings");
  acquire->add_flag("--mock", state.config.mock,
                    "Use the deterministic mock provider");
  acquire->add_option("--mock-transform", state.config.mock_transform,
                      "Mock behavior: identity or expand_contractions")
      ->check(CLI::IsMember({"identity", "expand_contractions"}));
  acquire->add_option("--placement", state.placement,
                      "Prompt placement: user or system message")
      ->check(CLI::IsMember({"user", "system"}));

  CLI::App* export_cmd =
      app.add_subcommand("export", "Re-emit the corpus in the ingest format");
  add_common_options(export_cmd, state);
  export_cmd->add_option("--to", state.config.export_format, "jsonl or csv")
      ->check(CLI::IsMember({"jsonl", "csv"}));

  CLI11_PARSE(app, argc, argv);

  try {
    finalize_config(state);
    if (markers->parsed()) return finish(styledrift::cmd_markers(state.config));
    if (effects->parsed()) return finish(styledrift::cmd_effects(state.config));
    if (convergence->parsed()) {
      return finish(styledrift::cmd_convergence(state.config));
    }
    if (match->parsed()) return finish(styledrift::cmd_match(state.config));
    if (acquire->parsed()) return finish(styledrift::cmd_acquire(state.config));
    if (export_cmd->parsed()) return finish(styledrift::cmd_export(state.config));
  } catch (const styledrift::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
