#pragma once

#include <vector>

#include <Eigen/Dense>

namespace styledrift {

struct PcaModel {
  Eigen::MatrixXd components;  // features x k, orthonormal columns
  std::vector<double> explained_variance_ratio;  // nonincreasing, sums <= 1
  Eigen::RowVectorXd center;   // per-feature means of the fit data
  bool rank_deficient = false;
};

// SVD of the centered matrix. Sign convention: each component's
// largest-magnitude loading is positive. k must satisfy
// k <= min(rows - 1, features).
PcaModel pca_fit(const Eigen::MatrixXd& matrix, int k);

// (X - center) * components -> rows x k coordinates.
Eigen::MatrixXd pca_project(const PcaModel& model, const Eigen::MatrixXd& matrix);

struct CentroidShift {
  Eigen::RowVectorXd vector;
  double magnitude = 0.0;
};

// Difference of group means (rewrites minus originals) and its norm.
CentroidShift centroid_shift(const Eigen::MatrixXd& original_coords,
                             const Eigen::MatrixXd& rewrite_coords);

}  // namespace styledrift
