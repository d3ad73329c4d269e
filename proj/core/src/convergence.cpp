#include "styledrift/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include "styledrift/error.hpp"
#include "styledrift/stats.hpp"

namespace styledrift {

VarianceCompressionReport variance_compression(const FeatureMatrix& originals,
                                               const FeatureMatrix& rewrites,
                                               double alpha) {
  if (originals.feature_names != rewrites.feature_names) {
    throw Error(ErrorCode::InvalidArgument,
                "variance compression needs a shared feature set");
  }
  if (originals.values.rows() < 2 || rewrites.values.rows() < 2) {
    throw Error(ErrorCode::InvalidArgument, "each group needs >= 2 rows");
  }

  VarianceCompressionReport report;
  report.alpha = alpha;
  std::vector<double> reductions;

  for (std::size_t c = 0; c < originals.feature_names.size(); ++c) {
    FeatureCompression feature;
    feature.feature = originals.feature_names[c];

    const Eigen::Index col = static_cast<Eigen::Index>(c);
    std::vector<double> group_o(originals.values.col(col).data(),
                                originals.values.col(col).data() +
                                    originals.values.rows());
    std::vector<double> group_r(rewrites.values.col(col).data(),
                                rewrites.values.col(col).data() +
                                    rewrites.values.rows());

    const double var_o = sample_variance(group_o);
    const double var_r = sample_variance(group_r);
    if (var_o == 0.0) {
      feature.degenerate = true;
      feature.variance_ratio = var_r == 0.0
                                   ? 1.0
                                   : std::numeric_limits<double>::quiet_NaN();
    } else {
      feature.variance_ratio = var_r / var_o;
    }

    try {
      feature.levene_p = levene_test({group_o, group_r}).p;
    } catch (const Error&) {
      feature.degenerate = true;
      feature.levene_p = 1.0;
    }

    feature.compressed = !feature.degenerate && feature.variance_ratio < 1.0 &&
                         feature.levene_p <= alpha;
    if (feature.compressed) reductions.push_back(1.0 - feature.variance_ratio);
    report.features.push_back(std::move(feature));
  }

  report.fraction_compressed =
      report.features.empty()
          ? 0.0
          : static_cast<double>(reductions.size()) /
                static_cast<double>(report.features.size());
  if (!reductions.empty()) {
    std::sort(reductions.begin(), reductions.end());
    const std::size_t mid = reductions.size() / 2;
    report.median_reduction = reductions.size() % 2 == 1
                                  ? reductions[mid]
                                  : 0.5 * (reductions[mid - 1] + reductions[mid]);
  }
  return report;
}

MatchReport source_match(const FeatureMatrix& originals, const FeatureMatrix& rewrites,
                         const std::map<std::string, std::string>& parent_of,
                         MatchMetric metric, FeatureSpace space) {
  if (originals.feature_names != rewrites.feature_names) {
    throw Error(ErrorCode::InvalidArgument,
                "source matching needs a shared feature set");
  }
  if (originals.values.rows() == 0) {
    throw Error(ErrorCode::EmptyGroup, "no originals to match against");
  }

  std::unordered_set<std::string> original_ids(originals.row_ids.begin(),
                                               originals.row_ids.end());

  MatchReport report;
  report.feature_space = space;
  report.chance = 1.0 / static_cast<double>(originals.values.rows());

  std::size_t matched = 0;
  report.per_document.resize(rewrites.row_ids.size());
  for (std::size_t r = 0; r < rewrites.row_ids.size(); ++r) {
    MatchEntry entry;
    entry.rewrite_id = rewrites.row_ids[r];

    auto parent_it = parent_of.find(entry.rewrite_id);
    if (parent_it == parent_of.end() || original_ids.count(parent_it->second) == 0) {
      throw Error(ErrorCode::ParentMissing,
                  "rewrite '" + entry.rewrite_id + "' has no original among the rows");
    }
    entry.parent_id = parent_it->second;

    const Eigen::RowVectorXd row = rewrites.values.row(static_cast<Eigen::Index>(r));
    double best = std::numeric_limits<double>::infinity();
    std::string best_id;
    bool tie = false;
    for (std::size_t o = 0; o < originals.row_ids.size(); ++o) {
      const Eigen::RowVectorXd diff =
          row - originals.values.row(static_cast<Eigen::Index>(o));
      const double dist = metric == MatchMetric::EuclideanStandardized
                              ? diff.norm()
                              : diff.cwiseAbs().mean();
      if (dist < best) {
        best = dist;
        best_id = originals.row_ids[o];
        tie = false;
      } else if (dist == best) {
        tie = true;
        if (originals.row_ids[o] < best_id) best_id = originals.row_ids[o];
      }
    }
    entry.distance = best;
    entry.nearest_id = best_id;
    entry.tie = tie;
    entry.matched = best_id == entry.parent_id;
    if (entry.matched) ++matched;
    report.per_document[r] = std::move(entry);
  }

  report.accuracy = rewrites.row_ids.empty()
                        ? 0.0
                        : static_cast<double>(matched) /
                              static_cast<double>(rewrites.row_ids.size());
  return report;
}

MfwZscoreModel build_mfw_zscore_model(const std::vector<Document>& originals,
                                      const MfwSet& mfw) {
  if (mfw.words.empty()) {
    throw Error(ErrorCode::EmptyMfwSet, "MFW set is empty");
  }
  if (originals.size() < 2) {
    throw Error(ErrorCode::InvalidArgument,
                "z-score model needs at least 2 originals");
  }

  MfwZscoreModel model;
  model.words.assign(mfw.words.begin(), mfw.words.end());
  std::sort(model.words.begin(), model.words.end());

  const std::size_t w = model.words.size();
  std::vector<std::vector<double>> freqs(w);
  for (const Document& doc : originals) {
    const TokenStream tokens = tokenize(doc.text);
    const std::vector<double> profile = [&] {
      std::unordered_map<std::string, std::size_t> counts;
      for (const std::string& tok : tokens.word_tokens) ++counts[tok];
      std::vector<double> p(w, 0.0);
      const double n = static_cast<double>(tokens.word_count());
      for (std::size_t i = 0; i < w; ++i) {
        auto it = counts.find(model.words[i]);
        if (it != counts.end()) p[i] = static_cast<double>(it->second) / n;
      }
      return p;
    }();
    for (std::size_t i = 0; i < w; ++i) freqs[i].push_back(profile[i]);
  }

  model.mean.resize(w);
  model.sd.resize(w);
  for (std::size_t i = 0; i < w; ++i) {
    model.mean[i] = mean(freqs[i]);
    model.sd[i] = std::sqrt(sample_variance(freqs[i]));
  }
  return model;
}

std::vector<double> mfw_profile(const TokenStream& tokens,
                                const MfwZscoreModel& model) {
  if (tokens.word_tokens.empty()) {
    throw Error(ErrorCode::EmptyText, "no word tokens");
  }
  std::unordered_map<std::string, std::size_t> counts;
  for (const std::string& tok : tokens.word_tokens) ++counts[tok];
  std::vector<double> profile(model.words.size(), 0.0);
  const double n = static_cast<double>(tokens.word_count());
  for (std::size_t i = 0; i < model.words.size(); ++i) {
    auto it = counts.find(model.words[i]);
    if (it != counts.end()) profile[i] = static_cast<double>(it->second) / n;
  }
  return profile;
}

double burrows_delta(const std::vector<double>& profile_a,
                     const std::vector<double>& profile_b,
                     const MfwZscoreModel& model) {
  if (model.words.empty()) {
    throw Error(ErrorCode::EmptyMfwSet, "MFW set is empty");
  }
  if (profile_a.size() != model.words.size() ||
      profile_b.size() != model.words.size()) {
    throw Error(ErrorCode::InvalidArgument, "profile length must match the MFW set");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < model.words.size(); ++i) {
    if (model.sd[i] == 0.0) continue;  // constant word carries no signal
    const double za = (profile_a[i] - model.mean[i]) / model.sd[i];
    const double zb = (profile_b[i] - model.mean[i]) / model.sd[i];
    total += std::fabs(za - zb);
  }
  return total / static_cast<double>(model.words.size());
}

}  // namespace styledrift
