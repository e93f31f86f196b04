#pragma once

#include <Eigen/Dense>

namespace sigf {

// Row-major so per-node rows are contiguous; embeddings and spectral
// coordinates are accessed row-wise almost everywhere.
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace sigf
