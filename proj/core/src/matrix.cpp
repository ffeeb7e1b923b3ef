#include "lqgame/matrix.hpp"

#include <stdexcept>
#include <vector>

namespace lqgame {

Matrix symmetrize(const Matrix& P) {
  if (P.rows() != P.cols()) {
    throw std::invalid_argument("symmetrize: matrix must be square, got " +
                                std::to_string(P.rows()) + "x" +
                                std::to_string(P.cols()));
  }
  return 0.5 * (P + P.transpose());
}

double pairwise_sum(std::span<const double> terms) {
  const size_t n = terms.size();
  if (n == 0) return 0.0;
  if (n <= 4) {
    double s = 0.0;
    for (double t : terms) s += t;
    return s;
  }
  const size_t half = n / 2;
  return pairwise_sum(terms.first(half)) + pairwise_sum(terms.subspan(half));
}

}  // namespace lqgame
