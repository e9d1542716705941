#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <stdexcept>
#include <string>
#include <vector>

namespace biotms {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// 0/1 flags per degree of freedom; 1 means the DOF is unconstrained.
using DofMask = std::vector<char>;

/// Raised for malformed inputs (bad sizes, invalid indices, bad files).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a factorization or solve cannot reach the requested accuracy.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Coarse-to-fine map: columns are basis functions in fine coordinates.
/// `column_free[k] == 0` marks a column excluded by an essential condition.
struct Prolongation {
  SpMat R;
  DofMask column_free;

  [[nodiscard]] int num_columns() const { return static_cast<int>(R.cols()); }
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

}  // namespace biotms
