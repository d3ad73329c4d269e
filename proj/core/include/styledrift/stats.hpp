#pragma once

#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace styledrift {

struct PairedTResult {
  double t = 0.0;
  double p = 1.0;
  double df = 0.0;
};

// Paired t on differences b - a (positive t = values increase in b).
// All-zero differences return t=0, p=1; identical nonzero differences throw
// DegenerateVariance.
PairedTResult paired_t(std::span<const double> values_a, std::span<const double> values_b);

enum class DVariant { Pooled, Paired };

// Paired: mean(diff) / sd(diff). Pooled: (mean_b - mean_a) / sqrt((s_a^2 + s_b^2)/2).
// Returns 0 when both the mean difference and the spread are zero; throws
// DegenerateVariance when the spread is zero but the difference is not.
double cohens_d(std::span<const double> values_a, std::span<const double> values_b,
                DVariant variant);

struct FdrResult {
  std::vector<double> adjusted;  // same order as the input p-values
  std::vector<bool> reject;
};

// Benjamini-Hochberg step-up: adjusted p_i = min over j >= i of m*p_(j)/j in
// sorted order, capped at 1; reject when adjusted <= alpha.
FdrResult bh_fdr(std::span<const double> p_values, double alpha);

struct WilcoxonResult {
  double w_plus = 0.0;
  double w_minus = 0.0;
  double p = 1.0;  // two-sided, normal approximation with tie correction
  std::size_t n_nonzero = 0;
};

// Zero differences are dropped; ties are mid-ranked. Throws
// AllZeroDifferences when every difference is zero.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> values_a,
                                    std::span<const double> values_b);

// r_rb = (W+ - W-) / (W+ + W-) over the signed ranks.
double rank_biserial(std::span<const double> values_a, std::span<const double> values_b);

struct LeveneResult {
  double w = 0.0;
  double p = 1.0;
  double df1 = 0.0;
  double df2 = 0.0;
};

// Levene's test with group-mean centering; p from the F distribution.
// Throws DegenerateInput when the within-group spread of absolute
// deviations is zero everywhere.
LeveneResult levene_test(const std::vector<std::vector<double>>& groups);

struct MannWhitneyResult {
  double u = 0.0;  // U statistic of the first sample
  double p = 1.0;  // two-sided, normal approximation with tie correction
};

MannWhitneyResult mann_whitney_u(std::span<const double> values_a,
                                 std::span<const double> values_b);

struct DispersionResult {
  std::vector<double> distances;  // per-row Euclidean distance to the centroid
  double mean = 0.0;
};

// Mean Euclidean distance from the column-mean centroid; rows are
// observations in (standardized) feature space.
DispersionResult multivariate_dispersion(const Eigen::MatrixXd& matrix);

// ICC(2,1): two-way random effects, absolute agreement, single measure.
// ratings is items x raters. Throws DegenerateInput when the mean-squares
// denominator vanishes (no between-item variance to resolve).
double icc_2_1(const Eigen::MatrixXd& ratings);

// Small helpers shared across the statistics layer.
double mean(std::span<const double> values);
double sample_variance(std::span<const double> values);  // n-1 denominator

}  // namespace styledrift
