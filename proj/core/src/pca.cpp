#include "styledrift/pca.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "styledrift/error.hpp"

namespace styledrift {

PcaModel pca_fit(const Eigen::MatrixXd& matrix, int k) {
  const Eigen::Index rows = matrix.rows();
  const Eigen::Index cols = matrix.cols();
  if (rows < 2 || cols < 1) {
    throw Error(ErrorCode::InvalidArgument, "PCA needs >= 2 rows and >= 1 feature");
  }
  const Eigen::Index k_max = std::min<Eigen::Index>(rows - 1, cols);
  if (k < 1 || k > k_max) {
    throw Error(ErrorCode::InvalidArgument,
                "k must satisfy 1 <= k <= min(rows - 1, features)");
  }

  PcaModel model;
  model.center = matrix.colwise().mean();
  const Eigen::MatrixXd centered = matrix.rowwise() - model.center;

  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered,
                                     Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd sigma = svd.singularValues();
  const double total = sigma.squaredNorm();
  const double tol = std::max(rows, cols) *
                     std::numeric_limits<double>::epsilon() *
                     (sigma.size() > 0 ? sigma(0) : 0.0);

  model.components = svd.matrixV().leftCols(k);
  model.explained_variance_ratio.resize(static_cast<std::size_t>(k), 0.0);
  for (Eigen::Index i = 0; i < k; ++i) {
    if (sigma(i) <= tol || total <= 0.0) {
      model.rank_deficient = true;
      model.explained_variance_ratio[static_cast<std::size_t>(i)] = 0.0;
    } else {
      model.explained_variance_ratio[static_cast<std::size_t>(i)] =
          sigma(i) * sigma(i) / total;
    }
  }
  // directions beyond the data rank exist mathematically but carry nothing
  if (svd.rank() < k_max) model.rank_deficient = true;

  // sign convention: largest-magnitude loading of each component positive
  for (Eigen::Index c = 0; c < model.components.cols(); ++c) {
    Eigen::Index idx = 0;
    model.components.col(c).cwiseAbs().maxCoeff(&idx);
    if (model.components(idx, c) < 0.0) model.components.col(c) *= -1.0;
  }
  return model;
}

Eigen::MatrixXd pca_project(const PcaModel& model, const Eigen::MatrixXd& matrix) {
  if (matrix.cols() != model.center.cols()) {
    throw Error(ErrorCode::InvalidArgument,
                "matrix feature count does not match the fitted model");
  }
  return (matrix.rowwise() - model.center) * model.components;
}

CentroidShift centroid_shift(const Eigen::MatrixXd& original_coords,
                             const Eigen::MatrixXd& rewrite_coords) {
  if (original_coords.rows() == 0 || rewrite_coords.rows() == 0) {
    throw Error(ErrorCode::EmptyGroup, "centroid shift needs nonempty groups");
  }
  if (original_coords.cols() != rewrite_coords.cols()) {
    throw Error(ErrorCode::InvalidArgument, "coordinate dimensions differ");
  }
  CentroidShift shift;
  shift.vector = rewrite_coords.colwise().mean() - original_coords.colwise().mean();
  shift.magnitude = shift.vector.norm();
  return shift;
}

}  // namespace styledrift
