#pragma once

#include <Eigen/Core>

namespace regio {

/// Observations in rows, variables in columns.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}
