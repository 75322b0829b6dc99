#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>

namespace dynsbm {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CountMat = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Column-stacked index of cell (a, b) of a k x k matrix, 0-based.
/// This is the single place fixing the matrix <-> vector convention used
/// by every module: i = b*k + a, identical to Eigen's column-major layout.
inline int cell_index(int a, int b, int k) { return b * k + a; }

/// Inverse of cell_index: (row, column) of vector entry i.
inline std::pair<int, int> cell_of(int i, int k) { return {i % k, i / k}; }

/// Flatten a k x k matrix into its column-stacked vector.
inline Vec stack_columns(const Mat& x) {
  return Eigen::Map<const Vec>(x.data(), x.size());
}

/// Reshape a length-k^2 vector back into a k x k matrix.
inline Mat unstack_columns(const Vec& v, int k) {
  return Eigen::Map<const Mat>(v.data(), k, k);
}

}  // namespace dynsbm
