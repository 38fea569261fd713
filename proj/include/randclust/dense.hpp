#pragma once

#include <Eigen/Dense>

namespace randclust {

// Row-major everywhere: rows hold per-node embeddings and the sparse kernels
// stream contiguous row slices.
using DenseMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

}  // namespace randclust
