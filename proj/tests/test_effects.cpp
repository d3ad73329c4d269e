#include <doctest.h>

#include <cmath>

#include "styledrift/effects.hpp"
#include "styledrift/error.hpp"

#include "support/fixtures.hpp"

using namespace styledrift;

namespace {

// A table with chosen core-marker d values (stance markers get 0.1).
EffectTable table_with(const std::vector<double>& core_d) {
  EffectTable table;
  table.model_id = "m";
  table.condition = PromptCondition::Generic;
  table.alpha = 0.05;
  double sum_abs = 0.0;
  std::size_t core_index = 0;
  for (Marker marker : all_markers()) {
    EffectRecord record;
    record.marker = marker;
    record.model_id = table.model_id;
    record.condition = table.condition;
    record.n_pairs = 50;
    if (is_core_marker(marker)) {
      record.d = core_d.at(core_index++);
      sum_abs += std::fabs(record.d);
    } else {
      record.d = 0.1;
    }
    table.records.push_back(record);
  }
  table.mean_abs_d = sum_abs / static_cast<double>(kCoreMarkerCount);
  return table;
}

std::vector<double> ramp_d() {
  std::vector<double> d;
  for (std::size_t i = 0; i < kCoreMarkerCount; ++i) {
    d.push_back(0.2 + 0.1 * static_cast<double>(i));
  }
  return d;
}

MarkerPairSet identity_pair_set(int n_pairs) {
  std::mt19937_64 rng(3);
  MarkerPairSet set;
  set.model_id = "mock/identity";
  set.condition = PromptCondition::Generic;
  PairedCorpus corpus;
  for (int i = 0; i < n_pairs; ++i) {
    const std::string text = fixtures::synthetic_narrative(rng);
    corpus.originals.push_back(
        fixtures::make_document("o" + std::to_string(i), text));
  }
  const MarkerResources resources =
      fixtures::load_default_resources(corpus.originals);
  for (const Document& doc : corpus.originals) {
    const MarkerVector v = compute_marker_vector(doc, resources);
    set.original_ids.push_back(doc.id);
    set.originals.push_back(v);
    set.rewrites.push_back(v);
  }
  return set;
}

}  // namespace

TEST_CASE("default d-variant split follows marker categories") {
  CHECK(default_d_variant(Marker::FunctionWordRatio) == DVariant::Pooled);
  CHECK(default_d_variant(Marker::Mtld) == DVariant::Pooled);
  CHECK(default_d_variant(Marker::CommaPer100) == DVariant::Pooled);
  CHECK(default_d_variant(Marker::ContractionPer100) == DVariant::Paired);
  CHECK(default_d_variant(Marker::EmotionPer100) == DVariant::Paired);
  CHECK(default_d_variant(Marker::RetrospectivePerSentence) == DVariant::Paired);
}

TEST_CASE("identity pairs produce all-zero effects with nothing significant") {
  const EffectTable table = build_effect_table(identity_pair_set(12), 0.05);
  REQUIRE(table.records.size() == kMarkerCount);
  for (const EffectRecord& record : table.records) {
    CHECK(record.d == 0.0);
    CHECK(record.t_stat == 0.0);
    CHECK(record.p == 1.0);
    CHECK_FALSE(record.significant);
    CHECK(record.percent_change == 0.0);
  }
  CHECK(table.mean_abs_d == 0.0);
}

TEST_CASE("normalizer fixture reproduces the expected sign pattern") {
  const PairedCorpus corpus = fixtures::normalizer_corpus(50, 20240801);
  const MarkerResources resources =
      fixtures::load_default_resources(corpus.originals);

  MarkerPairSet set;
  set.model_id = "mock/normalizer";
  set.condition = PromptCondition::Generic;
  for (const DocumentPair& pair : corpus.pairs) {
    set.original_ids.push_back(pair.original.id);
    set.originals.push_back(compute_marker_vector(pair.original, resources));
    set.rewrites.push_back(compute_marker_vector(pair.rewrite, resources));
  }
  const EffectTable table = build_effect_table(set, 0.05);

  const auto expect_sign = [&](Marker marker, int sign) {
    const EffectRecord* record = table.find(marker);
    REQUIRE(record != nullptr);
    INFO("marker ", marker_name(marker), " d=", record->d,
         " p_adj=", record->p_adjusted);
    if (sign > 0) CHECK(record->d > 0.0);
    if (sign < 0) CHECK(record->d < 0.0);
    CHECK(record->significant);
  };
  expect_sign(Marker::ContractionPer100, -1);
  expect_sign(Marker::FirstPersonPer100, -1);
  expect_sign(Marker::CommaPer100, +1);
  expect_sign(Marker::MeanWordLength, +1);
  expect_sign(Marker::Mtld, +1);
}

TEST_CASE("FDR families are corrected separately per slice") {
  const PairedCorpus corpus = fixtures::normalizer_corpus(20, 7);
  const MarkerResources resources =
      fixtures::load_default_resources(corpus.originals);
  MarkerPairSet set;
  set.model_id = "m";
  set.condition = PromptCondition::Generic;
  for (const DocumentPair& pair : corpus.pairs) {
    set.original_ids.push_back(pair.original.id);
    set.originals.push_back(compute_marker_vector(pair.original, resources));
    set.rewrites.push_back(compute_marker_vector(pair.rewrite, resources));
  }
  const EffectTable table = build_effect_table(set, 0.05);
  for (const EffectRecord& record : table.records) {
    CHECK(record.p_adjusted >= record.p - 1e-15);
    CHECK(record.significant == (record.p_adjusted <= table.alpha));
  }
  // mean |d| is unweighted over core markers only
  double sum = 0.0;
  for (const EffectRecord& record : table.records) {
    if (is_core_marker(record.marker)) sum += std::fabs(record.d);
  }
  CHECK(table.mean_abs_d ==
        doctest::Approx(sum / static_cast<double>(kCoreMarkerCount)).epsilon(1e-12));
}

TEST_CASE("direction agreement hand cases") {
  const EffectTable base = table_with(ramp_d());
  CHECK(direction_agreement(base, base).percent == doctest::Approx(100.0));

  std::vector<double> flipped = ramp_d();
  flipped[4] = -flipped[4];
  CHECK(direction_agreement(base, table_with(flipped)).percent ==
        doctest::Approx(100.0 * 12.0 / 13.0));

  std::vector<double> all_flipped = ramp_d();
  for (double& d : all_flipped) d = -d;
  CHECK(direction_agreement(base, table_with(all_flipped)).percent ==
        doctest::Approx(0.0));
}

TEST_CASE("zero d agrees with nothing and flags the comparison") {
  std::vector<double> with_zero = ramp_d();
  with_zero[0] = 0.0;
  const EffectTable base = table_with(ramp_d());
  const DirectionAgreement agr = direction_agreement(base, table_with(with_zero));
  CHECK(agr.zero_flagged);
  CHECK(agr.percent == doctest::Approx(100.0 * 12.0 / 13.0));
}

TEST_CASE("reduction percent and effect vector correlation") {
  const EffectTable base = table_with(ramp_d());
  CHECK(reduction_percent(base, base) == doctest::Approx(0.0));
  CHECK(effect_vector_correlation(base, base) == doctest::Approx(1.0));

  std::vector<double> halved = ramp_d();
  for (double& d : halved) d *= 0.5;
  const EffectTable half = table_with(halved);
  CHECK(reduction_percent(base, half) == doctest::Approx(50.0).epsilon(1e-12));
  CHECK(effect_vector_correlation(base, half) == doctest::Approx(1.0).epsilon(1e-12));

  std::vector<double> negated = ramp_d();
  for (double& d : negated) d = -d;
  CHECK(effect_vector_correlation(base, table_with(negated)) ==
        doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("zero baseline reduction throws") {
  const EffectTable zero = table_with(std::vector<double>(kCoreMarkerCount, 0.0));
  const EffectTable other = table_with(ramp_d());
  try {
    reduction_percent(zero, other);
    FAIL("expected ZeroBaseline");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroBaseline);
  }
}

TEST_CASE("mean_abs_d is invariant under marker order permutation") {
  EffectTable table = table_with(ramp_d());
  EffectTable shuffled = table;
  std::reverse(shuffled.records.begin(), shuffled.records.end());
  double sum = 0.0;
  for (const EffectRecord& r : shuffled.records) {
    if (is_core_marker(r.marker)) sum += std::fabs(r.d);
  }
  CHECK(sum / static_cast<double>(kCoreMarkerCount) ==
        doctest::Approx(table.mean_abs_d).epsilon(1e-12));
}

TEST_CASE("marker set mismatch is rejected") {
  EffectTable base = table_with(ramp_d());
  EffectTable partial = base;
  partial.records.pop_back();
  try {
    direction_agreement(base, partial);
    FAIL("expected MarkerSetMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MarkerSetMismatch);
  }
}

TEST_CASE("replicate reliability computes per-marker ICC across passes") {
  std::mt19937_64 rng(17);
  PairedCorpus base = fixtures::normalizer_corpus(12, 555);
  const MarkerResources resources =
      fixtures::load_default_resources(base.originals);

  // three passes: identical rewrites per item -> ICC 1 on varying markers
  std::vector<MarkerPairSet> passes;
  for (int pass = 0; pass < 3; ++pass) {
    MarkerPairSet set;
    set.model_id = "m";
    set.condition = PromptCondition::Generic;
    for (const DocumentPair& pair : base.pairs) {
      set.original_ids.push_back(pair.original.id);
      set.originals.push_back(compute_marker_vector(pair.original, resources));
      set.rewrites.push_back(compute_marker_vector(pair.rewrite, resources));
    }
    passes.push_back(std::move(set));
  }
  const ReplicateReliability reliability = replicate_reliability(passes);
  REQUIRE(reliability.per_marker.size() == kMarkerCount);
  for (const MarkerIcc& entry : reliability.per_marker) {
    if (!entry.degenerate) {
      CHECK(entry.icc == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
  CHECK(reliability.median_icc == doctest::Approx(1.0).epsilon(1e-9));
}
