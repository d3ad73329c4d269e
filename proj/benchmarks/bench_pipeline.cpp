#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "styledrift/convergence.hpp"
#include "styledrift/effects.hpp"
#include "styledrift/features.hpp"
#include "styledrift/markers.hpp"
#include "styledrift/pca.hpp"
#include "styledrift/text.hpp"

using namespace styledrift;

namespace {

// ~240-word narrative-shaped sample, assembled deterministically.
std::string sample_text(std::mt19937_64& rng, int sentences = 18) {
  static const std::vector<std::string> kSentences = {
      "I can't believe the house was so quiet that evening.",
      "We walked to the town and i saw my old friend near the road.",
      "Looking back, I think the story was stranger than we admitted.",
      "My dog ran ahead because the rain had finally stopped.",
      "It's the gift that i remember most, and we kept it for years.",
      "I felt sad and i walked home, but the work was waiting.",
      "The car turned onto the road and we heard the rain again.",
      "I didn't know the situation would become such a realization.",
  };
  std::uniform_int_distribution<std::size_t> pick(0, kSentences.size() - 1);
  std::string text;
  for (int i = 0; i < sentences; ++i) {
    if (!text.empty()) text += " ";
    text += kSentences[pick(rng)];
  }
  return text;
}

MarkerResources bench_resources(const std::vector<Document>& originals) {
  MarkerResources resources;
  resources.function_words = lexicon_from_words(
      "fw", {"i",  "we",  "the", "a",   "an",  "and", "but", "or",  "so",
             "it", "was", "to",  "of",  "in",  "my",  "that", "because",
             "had", "for", "near", "than", "would", "most"});
  resources.first_person =
      lexicon_from_words("fp", {"i", "me", "my", "mine", "we", "us", "our", "ours"});
  resources.emotion = lexicon_from_words("emo", {"sad", "happy", "quiet"});
  resources.causal = lexicon_from_phrases("causal", {"because", "as a result"});
  resources.retrospective =
      lexicon_from_phrases("retro", {"looking back", "in retrospect"});
  resources.eventive = lexicon_from_words(
      "ev", {"walked", "ran", "saw", "heard", "turned", "walk", "run", "see"});
  resources.abstract_suffixes = lexicon_from_suffixes(
      "abs", {"tion", "sion", "ness", "ity", "ment", "ance", "ence"});
  resources.corpus_mfw = build_mfw_set(originals);
  return resources;
}

std::vector<Document> bench_corpus(int n) {
  std::mt19937_64 rng(1);
  std::vector<Document> docs;
  for (int i = 0; i < n; ++i) {
    Document doc;
    doc.id = "d" + std::to_string(i);
    doc.text = sample_text(rng);
    docs.push_back(std::move(doc));
  }
  return docs;
}

void BM_Tokenize(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const std::string text = sample_text(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(tokenize(text));
  }
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations()) *
                          static_cast<int64_t>(text.size()));
}
BENCHMARK(BM_Tokenize);

void BM_MarkerVector(benchmark::State& state) {
  const std::vector<Document> docs = bench_corpus(8);
  const MarkerResources resources = bench_resources(docs);
  for (auto _ : state) {
    benchmark::DoNotOptimize(compute_marker_vector(docs[0], resources));
  }
}
BENCHMARK(BM_MarkerVector);

void BM_CharNgramFeatures(benchmark::State& state) {
  const std::vector<Document> docs = bench_corpus(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_features(docs, FeatureSpace::CharNgram));
  }
}
BENCHMARK(BM_CharNgramFeatures)->Arg(10)->Arg(100);

void BM_SourceMatch300(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int n = 300;
  Eigen::MatrixXd values(n, 7);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < 7; ++j) values(i, j) = normal(rng);
  }
  FeatureMatrix originals;
  FeatureMatrix rewrites;
  std::map<std::string, std::string> parent_of;
  for (int j = 0; j < 7; ++j) {
    originals.feature_names.push_back("f" + std::to_string(j));
  }
  rewrites.feature_names = originals.feature_names;
  originals.values = values;
  rewrites.values = values;
  for (int i = 0; i < n; ++i) {
    originals.row_ids.push_back("o" + std::to_string(i));
    rewrites.row_ids.push_back("r" + std::to_string(i));
    parent_of["r" + std::to_string(i)] = "o" + std::to_string(i);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(source_match(originals, rewrites, parent_of,
                                          MatchMetric::EuclideanStandardized,
                                          FeatureSpace::CharNgram));
  }
}
BENCHMARK(BM_SourceMatch300);

void BM_EffectTable50(benchmark::State& state) {
  const std::vector<Document> docs = bench_corpus(50);
  const MarkerResources resources = bench_resources(docs);
  MarkerPairSet set;
  set.model_id = "bench";
  for (const Document& doc : docs) {
    const MarkerVector v = compute_marker_vector(doc, resources);
    set.original_ids.push_back(doc.id);
    set.originals.push_back(v);
    set.rewrites.push_back(v);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_effect_table(set, 0.05));
  }
}
BENCHMARK(BM_EffectTable50);

void BM_PcaFit(benchmark::State& state) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd data(300, 23);
  for (int i = 0; i < 300; ++i) {
    for (int j = 0; j < 23; ++j) data(i, j) = normal(rng);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(pca_fit(data, 2));
  }
}
BENCHMARK(BM_PcaFit);

}  // namespace

BENCHMARK_MAIN();
