#pragma once

#include <Eigen/Dense>

namespace dsm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

}  // namespace dsm
