#pragma once

#include <Eigen/Core>

namespace neseek {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Execution policy for the blockwise kernels. Both policies run the same
/// per-agent body in the same order of arithmetic, so results are
/// bit-identical; `openmp` distributes agents across threads.
enum class Exec { serial, openmp };

} // namespace neseek
