#include "styledrift/effects.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <unordered_map>

#include "styledrift/error.hpp"

namespace styledrift {

const EffectRecord* EffectTable::find(Marker marker) const {
  for (const EffectRecord& record : records) {
    if (record.marker == marker) return &record;
  }
  return nullptr;
}

DVariant default_d_variant(Marker marker) {
  switch (marker_category(marker)) {
    case MarkerCategory::FunctionWords:
    case MarkerCategory::Vocabulary:
    case MarkerCategory::SyntaxPunctuation:
      return DVariant::Pooled;
    case MarkerCategory::Register:
    case MarkerCategory::Stance:
      return DVariant::Paired;
  }
  return DVariant::Paired;
}

EffectTable build_effect_table(const MarkerPairSet& pairs, double alpha,
                               const DVariantOverrides* overrides) {
  const std::size_t n = pairs.originals.size();
  if (n != pairs.rewrites.size()) {
    throw Error(ErrorCode::InvalidArgument,
                "original and rewrite vectors must align");
  }
  if (n < 3) {
    throw Error(ErrorCode::InvalidArgument,
                "effect table requires at least 3 pairs per slice");
  }

  EffectTable table;
  table.model_id = pairs.model_id;
  table.condition = pairs.condition;
  table.alpha = alpha;

  for (Marker marker : all_markers()) {
    EffectRecord record;
    record.marker = marker;
    record.model_id = pairs.model_id;
    record.condition = pairs.condition;
    record.n_pairs = n;
    record.d_variant = default_d_variant(marker);
    if (overrides != nullptr) {
      if (auto it = overrides->find(marker); it != overrides->end()) {
        record.d_variant = it->second;
      }
    }

    std::vector<double> a(n);
    std::vector<double> b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = pairs.originals[i].value(marker);
      b[i] = pairs.rewrites[i].value(marker);
      record.degenerate = record.degenerate ||
                          pairs.originals[i].is_degenerate(marker) ||
                          pairs.rewrites[i].is_degenerate(marker);
    }
    record.mean_original = mean(a);
    record.mean_rewrite = mean(b);
    const double delta = record.mean_rewrite - record.mean_original;
    if (record.mean_original != 0.0) {
      record.percent_change = 100.0 * delta / record.mean_original;
    } else {
      record.percent_change =
          delta == 0.0 ? 0.0 : std::numeric_limits<double>::quiet_NaN();
    }

    try {
      const PairedTResult t = paired_t(a, b);
      record.t_stat = t.t;
      record.p = t.p;
    } catch (const Error&) {
      record.t_stat = 0.0;
      record.p = 1.0;
      record.degenerate = true;
    }
    try {
      record.d = cohens_d(a, b, record.d_variant);
    } catch (const Error&) {
      record.d = 0.0;
      record.degenerate = true;
    }
    table.records.push_back(std::move(record));
  }

  // FDR families: core markers and stance markers are corrected separately.
  for (bool core_family : {true, false}) {
    std::vector<std::size_t> indices;
    std::vector<double> ps;
    for (std::size_t i = 0; i < table.records.size(); ++i) {
      if (is_core_marker(table.records[i].marker) == core_family) {
        indices.push_back(i);
        ps.push_back(table.records[i].p);
      }
    }
    const FdrResult fdr = bh_fdr(ps, alpha);
    for (std::size_t j = 0; j < indices.size(); ++j) {
      table.records[indices[j]].p_adjusted = fdr.adjusted[j];
      table.records[indices[j]].significant = fdr.reject[j];
    }
  }

  double sum_abs = 0.0;
  for (const EffectRecord& record : table.records) {
    if (is_core_marker(record.marker)) sum_abs += std::fabs(record.d);
  }
  table.mean_abs_d = sum_abs / static_cast<double>(kCoreMarkerCount);
  return table;
}

namespace {

void require_same_markers(const EffectTable& a, const EffectTable& b) {
  auto marker_set = [](const EffectTable& t) {
    std::set<Marker> m;
    for (const EffectRecord& r : t.records) m.insert(r.marker);
    return m;
  };
  if (marker_set(a) != marker_set(b)) {
    throw Error(ErrorCode::MarkerSetMismatch,
                "effect tables cover different marker sets");
  }
}

std::vector<double> core_d_vector(const EffectTable& table) {
  std::vector<double> d;
  for (Marker marker : all_markers()) {
    if (!is_core_marker(marker)) continue;
    const EffectRecord* record = table.find(marker);
    if (record == nullptr) {
      throw Error(ErrorCode::MarkerSetMismatch,
                  "missing core marker: " + std::string(marker_name(marker)));
    }
    d.push_back(record->d);
  }
  return d;
}

}  // namespace

DirectionAgreement direction_agreement(const EffectTable& table_a,
                                       const EffectTable& table_b) {
  require_same_markers(table_a, table_b);
  const std::vector<double> da = core_d_vector(table_a);
  const std::vector<double> db = core_d_vector(table_b);
  DirectionAgreement result;
  std::size_t agree = 0;
  for (std::size_t i = 0; i < da.size(); ++i) {
    if (da[i] == 0.0 || db[i] == 0.0) {
      result.zero_flagged = true;  // zero agrees with nothing
      continue;
    }
    if ((da[i] > 0.0) == (db[i] > 0.0)) ++agree;
  }
  result.percent = 100.0 * static_cast<double>(agree) /
                   static_cast<double>(da.size());
  return result;
}

double reduction_percent(const EffectTable& baseline, const EffectTable& variant) {
  require_same_markers(baseline, variant);
  if (baseline.mean_abs_d == 0.0) {
    throw Error(ErrorCode::ZeroBaseline, "baseline mean |d| is zero");
  }
  return (1.0 - variant.mean_abs_d / baseline.mean_abs_d) * 100.0;
}

double effect_vector_correlation(const EffectTable& table_a,
                                 const EffectTable& table_b) {
  require_same_markers(table_a, table_b);
  const std::vector<double> da = core_d_vector(table_a);
  const std::vector<double> db = core_d_vector(table_b);
  const double ma = mean(da);
  const double mb = mean(db);
  double cov = 0.0;
  double va = 0.0;
  double vb = 0.0;
  for (std::size_t i = 0; i < da.size(); ++i) {
    cov += (da[i] - ma) * (db[i] - mb);
    va += (da[i] - ma) * (da[i] - ma);
    vb += (db[i] - mb) * (db[i] - mb);
  }
  if (va == 0.0 || vb == 0.0) {
    throw Error(ErrorCode::DegenerateInput,
                "effect vector has no variance across markers");
  }
  return cov / std::sqrt(va * vb);
}

ReplicateReliability replicate_reliability(const std::vector<MarkerPairSet>& passes) {
  if (passes.size() < 2) {
    throw Error(ErrorCode::InvalidArgument,
                "reliability needs at least 2 replicate passes");
  }
  for (const MarkerPairSet& pass : passes) {
    if (pass.original_ids.size() != pass.rewrites.size()) {
      throw Error(ErrorCode::InvalidArgument,
                  "replicate passes need aligned original ids");
    }
  }

  // items present in every pass, in first-pass order
  std::vector<std::string> items;
  for (std::size_t i = 0; i < passes[0].original_ids.size(); ++i) {
    const std::string& id = passes[0].original_ids[i];
    bool everywhere = true;
    for (std::size_t p = 1; p < passes.size(); ++p) {
      const auto& ids = passes[p].original_ids;
      if (std::find(ids.begin(), ids.end(), id) == ids.end()) {
        everywhere = false;
        break;
      }
    }
    if (everywhere) items.push_back(id);
  }

  std::vector<std::unordered_map<std::string, std::size_t>> index_of(passes.size());
  for (std::size_t p = 0; p < passes.size(); ++p) {
    for (std::size_t i = 0; i < passes[p].original_ids.size(); ++i) {
      index_of[p][passes[p].original_ids[i]] = i;
    }
  }

  ReplicateReliability result;
  std::vector<double> iccs;
  for (Marker marker : all_markers()) {
    MarkerIcc entry;
    entry.marker = marker;
    entry.n_items = items.size();
    entry.n_raters = passes.size();
    Eigen::MatrixXd ratings(static_cast<Eigen::Index>(items.size()),
                            static_cast<Eigen::Index>(passes.size()));
    for (std::size_t i = 0; i < items.size(); ++i) {
      for (std::size_t p = 0; p < passes.size(); ++p) {
        const std::size_t row = index_of[p].at(items[i]);
        ratings(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(p)) =
            passes[p].rewrites[row].value(marker);
      }
    }
    try {
      entry.icc = icc_2_1(ratings);
      iccs.push_back(entry.icc);
    } catch (const Error&) {
      entry.degenerate = true;
    }
    result.per_marker.push_back(entry);
  }

  if (!iccs.empty()) {
    std::sort(iccs.begin(), iccs.end());
    const std::size_t mid = iccs.size() / 2;
    result.median_icc = iccs.size() % 2 == 1
                            ? iccs[mid]
                            : 0.5 * (iccs[mid - 1] + iccs[mid]);
  }
  return result;
}

}  // namespace styledrift
