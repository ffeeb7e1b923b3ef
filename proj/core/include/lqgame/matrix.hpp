#pragma once

#include <Eigen/Dense>
#include <span>

namespace lqgame {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Returns (P + P^T)/2. Throws std::invalid_argument if P is not square.
Matrix symmetrize(const Matrix& P);

/// Pairwise (cascade) summation; deterministic and more accurate than a
/// running sum for long horizons.
double pairwise_sum(std::span<const double> terms);

}  // namespace lqgame
