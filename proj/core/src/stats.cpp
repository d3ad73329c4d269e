#include "styledrift/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "styledrift/distributions.hpp"
#include "styledrift/error.hpp"

namespace styledrift {

double mean(std::span<const double> values) {
  if (values.empty()) {
    throw Error(ErrorCode::InvalidArgument, "mean of empty range");
  }
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

double sample_variance(std::span<const double> values) {
  if (values.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "variance requires at least 2 values");
  }
  const double m = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return ss / static_cast<double>(values.size() - 1);
}

namespace {

std::vector<double> differences(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::InvalidArgument, "paired samples must have equal length");
  }
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = b[i] - a[i];
  return d;
}

// Mid-ranks with ties averaged.
std::vector<double> midranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return values[i] < values[j];
  });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

std::vector<double> midranks_abs(const std::vector<double>& values) {
  std::vector<double> abs_values(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) abs_values[i] = std::fabs(values[i]);
  return midranks(abs_values);
}

}  // namespace

PairedTResult paired_t(std::span<const double> values_a,
                       std::span<const double> values_b) {
  const std::vector<double> d = differences(values_a, values_b);
  if (d.size() < 3) {
    throw Error(ErrorCode::InvalidArgument, "paired t requires n >= 3");
  }
  const double md = mean(d);
  const double var = sample_variance(d);
  const double n = static_cast<double>(d.size());

  if (var == 0.0) {
    if (md == 0.0) return {0.0, 1.0, n - 1.0};
    throw Error(ErrorCode::DegenerateVariance,
                "all differences identical and nonzero");
  }
  const double t = md / std::sqrt(var / n);
  return {t, student_t_two_sided_p(t, n - 1.0), n - 1.0};
}

double cohens_d(std::span<const double> values_a, std::span<const double> values_b,
                DVariant variant) {
  if (values_a.size() != values_b.size()) {
    throw Error(ErrorCode::InvalidArgument, "paired samples must have equal length");
  }
  if (values_a.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "Cohen's d requires n >= 2");
  }
  if (variant == DVariant::Paired) {
    const std::vector<double> d = differences(values_a, values_b);
    const double md = mean(d);
    const double sd = std::sqrt(sample_variance(d));
    if (sd == 0.0) {
      if (md == 0.0) return 0.0;
      throw Error(ErrorCode::DegenerateVariance,
                  "zero difference spread with nonzero mean difference");
    }
    return md / sd;
  }
  const double md = mean(values_b) - mean(values_a);
  const double pooled =
      std::sqrt(0.5 * (sample_variance(values_a) + sample_variance(values_b)));
  if (pooled == 0.0) {
    if (md == 0.0) return 0.0;
    throw Error(ErrorCode::DegenerateVariance,
                "zero pooled spread with nonzero mean difference");
  }
  return md / pooled;
}

FdrResult bh_fdr(std::span<const double> p_values, double alpha) {
  const std::size_t m = p_values.size();
  FdrResult result;
  result.adjusted.resize(m, 1.0);
  result.reject.resize(m, false);
  if (m == 0) return result;

  for (double p : p_values) {
    if (p < 0.0 || p > 1.0) {
      throw Error(ErrorCode::InvalidArgument, "p-values must lie in [0, 1]");
    }
  }

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return p_values[i] < p_values[j]; });

  double running = 1.0;
  for (std::size_t k = m; k-- > 0;) {
    const double scaled =
        p_values[order[k]] * static_cast<double>(m) / static_cast<double>(k + 1);
    running = std::min(running, std::min(scaled, 1.0));
    result.adjusted[order[k]] = running;
  }
  for (std::size_t i = 0; i < m; ++i) {
    result.reject[i] = result.adjusted[i] <= alpha;
  }
  return result;
}

namespace {

struct SignedRanks {
  double w_plus = 0.0;
  double w_minus = 0.0;
  std::vector<double> nonzero;  // retained differences
  std::vector<double> ranks;
};

SignedRanks signed_ranks(std::span<const double> a, std::span<const double> b) {
  std::vector<double> d;
  for (const double diff : differences(a, b)) {
    if (diff != 0.0) d.push_back(diff);
  }
  if (d.empty()) {
    throw Error(ErrorCode::AllZeroDifferences, "every paired difference is zero");
  }
  SignedRanks sr;
  sr.ranks = midranks_abs(d);
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] > 0.0) {
      sr.w_plus += sr.ranks[i];
    } else {
      sr.w_minus += sr.ranks[i];
    }
  }
  sr.nonzero = std::move(d);
  return sr;
}

}  // namespace

WilcoxonResult wilcoxon_signed_rank(std::span<const double> values_a,
                                    std::span<const double> values_b) {
  SignedRanks sr = signed_ranks(values_a, values_b);
  const std::size_t n = sr.nonzero.size();
  if (n < 6) {
    throw Error(ErrorCode::InvalidArgument,
                "normal approximation needs >= 6 nonzero differences");
  }
  const double nd = static_cast<double>(n);
  const double mean_w = nd * (nd + 1.0) / 4.0;
  double var_w = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0;

  // tie correction: subtract sum(t^3 - t)/48 over tied |difference| groups
  std::vector<double> abs_d(n);
  for (std::size_t i = 0; i < n; ++i) abs_d[i] = std::fabs(sr.nonzero[i]);
  std::sort(abs_d.begin(), abs_d.end());
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && abs_d[j + 1] == abs_d[i]) ++j;
    const double t = static_cast<double>(j - i + 1);
    if (t > 1.0) var_w -= (t * t * t - t) / 48.0;
    i = j + 1;
  }
  if (var_w <= 0.0) {
    throw Error(ErrorCode::DegenerateInput, "zero variance in signed ranks");
  }
  const double z = (sr.w_plus - mean_w) / std::sqrt(var_w);
  const double p = 2.0 * (1.0 - normal_cdf(std::fabs(z)));
  return {sr.w_plus, sr.w_minus, std::min(p, 1.0), n};
}

double rank_biserial(std::span<const double> values_a,
                     std::span<const double> values_b) {
  SignedRanks sr = signed_ranks(values_a, values_b);
  const double total = sr.w_plus + sr.w_minus;
  return (sr.w_plus - sr.w_minus) / total;
}

LeveneResult levene_test(const std::vector<std::vector<double>>& groups) {
  if (groups.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "Levene's test needs >= 2 groups");
  }
  std::size_t n_total = 0;
  for (const auto& g : groups) {
    if (g.size() < 2) {
      throw Error(ErrorCode::InvalidArgument, "each group needs >= 2 values");
    }
    n_total += g.size();
  }
  const std::size_t k = groups.size();

  // absolute deviations from each group's mean
  std::vector<std::vector<double>> z(k);
  for (std::size_t g = 0; g < k; ++g) {
    const double gm = mean(groups[g]);
    z[g].reserve(groups[g].size());
    for (double v : groups[g]) z[g].push_back(std::fabs(v - gm));
  }

  std::vector<double> z_group_mean(k);
  double z_grand = 0.0;
  for (std::size_t g = 0; g < k; ++g) {
    z_group_mean[g] = mean(z[g]);
    z_grand += z_group_mean[g] * static_cast<double>(z[g].size());
  }
  z_grand /= static_cast<double>(n_total);

  double between = 0.0;
  double within = 0.0;
  for (std::size_t g = 0; g < k; ++g) {
    const double ng = static_cast<double>(z[g].size());
    between += ng * (z_group_mean[g] - z_grand) * (z_group_mean[g] - z_grand);
    for (double zv : z[g]) within += (zv - z_group_mean[g]) * (zv - z_group_mean[g]);
  }

  const double df1 = static_cast<double>(k - 1);
  const double df2 = static_cast<double>(n_total - k);
  if (within == 0.0) {
    if (between == 0.0) {
      throw Error(ErrorCode::DegenerateInput,
                  "no spread in absolute deviations across all groups");
    }
    throw Error(ErrorCode::DegenerateInput,
                "zero within-group spread in absolute deviations");
  }
  const double w = (df2 / df1) * (between / within);
  const double p = 1.0 - f_cdf(w, df1, df2);
  return {w, std::clamp(p, 0.0, 1.0), df1, df2};
}

MannWhitneyResult mann_whitney_u(std::span<const double> values_a,
                                 std::span<const double> values_b) {
  if (values_a.empty() || values_b.empty()) {
    throw Error(ErrorCode::EmptyGroup, "Mann-Whitney U needs nonempty groups");
  }
  const std::size_t n1 = values_a.size();
  const std::size_t n2 = values_b.size();
  std::vector<double> combined(values_a.begin(), values_a.end());
  combined.insert(combined.end(), values_b.begin(), values_b.end());

  const std::vector<double> ranks = midranks(combined);

  double r1 = 0.0;
  for (std::size_t i = 0; i < n1; ++i) r1 += ranks[i];
  const double n1d = static_cast<double>(n1);
  const double n2d = static_cast<double>(n2);
  const double u = n1d * n2d + n1d * (n1d + 1.0) / 2.0 - r1;

  const double n = n1d + n2d;
  double tie_sum = 0.0;
  std::vector<double> sorted = combined;
  std::sort(sorted.begin(), sorted.end());
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i + 1);
    if (t > 1.0) tie_sum += t * t * t - t;
    i = j + 1;
  }
  const double var_u =
      n1d * n2d / 12.0 * ((n + 1.0) - tie_sum / (n * (n - 1.0)));
  if (var_u <= 0.0) {
    // every value identical in both groups: no evidence either way
    return {u, 1.0};
  }
  const double z = (u - n1d * n2d / 2.0) / std::sqrt(var_u);
  const double p = 2.0 * (1.0 - normal_cdf(std::fabs(z)));
  return {u, std::min(p, 1.0)};
}

DispersionResult multivariate_dispersion(const Eigen::MatrixXd& matrix) {
  if (matrix.rows() == 0) {
    throw Error(ErrorCode::EmptyGroup, "dispersion of empty matrix");
  }
  const Eigen::RowVectorXd centroid = matrix.colwise().mean();
  DispersionResult result;
  result.distances.resize(static_cast<std::size_t>(matrix.rows()));
  double total = 0.0;
  for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
    const double dist = (matrix.row(r) - centroid).norm();
    result.distances[static_cast<std::size_t>(r)] = dist;
    total += dist;
  }
  result.mean = total / static_cast<double>(matrix.rows());
  return result;
}

double icc_2_1(const Eigen::MatrixXd& ratings) {
  const Eigen::Index n = ratings.rows();
  const Eigen::Index k = ratings.cols();
  if (k < 2) {
    throw Error(ErrorCode::InvalidArgument, "ICC requires >= 2 raters");
  }
  if (n < 5) {
    throw Error(ErrorCode::InvalidArgument, "ICC requires >= 5 items");
  }

  const double grand = ratings.mean();
  const Eigen::VectorXd row_means = ratings.rowwise().mean();
  const Eigen::RowVectorXd col_means = ratings.colwise().mean();

  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);

  double ss_rows = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    ss_rows += kd * (row_means(i) - grand) * (row_means(i) - grand);
  }
  double ss_cols = 0.0;
  for (Eigen::Index j = 0; j < k; ++j) {
    ss_cols += nd * (col_means(j) - grand) * (col_means(j) - grand);
  }
  double ss_total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      ss_total += (ratings(i, j) - grand) * (ratings(i, j) - grand);
    }
  }
  const double ss_err = ss_total - ss_rows - ss_cols;

  const double msr = ss_rows / (nd - 1.0);
  const double msc = ss_cols / (kd - 1.0);
  const double mse = ss_err / ((nd - 1.0) * (kd - 1.0));

  const double denom = msr + (kd - 1.0) * mse + kd * (msc - mse) / nd;
  if (std::fabs(denom) < 1e-300) {
    throw Error(ErrorCode::DegenerateInput, "no variance available for ICC");
  }
  return (msr - mse) / denom;
}

}  // namespace styledrift
