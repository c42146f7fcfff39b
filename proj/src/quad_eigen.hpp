#pragma once

#include <Eigen/Dense>

namespace gadgetforge::detail {

// Ascending eigenvalues of a real symmetric matrix, computed in binary128.
Eigen::VectorXd eigvals_quad(const Eigen::MatrixXd& m);

} // namespace gadgetforge::detail
