#pragma once

#include <Eigen/Core>

namespace stressgraph {

/// Dense row-major matrix; rows are nodes throughout the library.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

}  // namespace stressgraph
