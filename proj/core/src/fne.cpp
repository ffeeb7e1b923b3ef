#include "lqgame/fne.hpp"

#include <Eigen/SVD>
#include <limits>
#include <stdexcept>
#include <string>

namespace lqgame {
namespace {

constexpr double kSingularCondition = 1e12;

void check_gain_dims(const GameDefinition& game, int player,
                     const std::vector<Matrix>& gains, const char* what) {
  if (static_cast<int>(gains.size()) != game.horizon) {
    throw std::invalid_argument(std::string(what) + ": expected " +
                                std::to_string(game.horizon) + " gains, got " +
                                std::to_string(gains.size()));
  }
  for (const Matrix& K : gains) {
    if (K.rows() != game.input_dim(player) || K.cols() != game.state_dim()) {
      throw std::invalid_argument(std::string(what) + ": gain dimension mismatch");
    }
  }
}

}  // namespace

SingularStageSystem::SingularStageSystem(int stage, double condition)
    : std::runtime_error("stacked gain system singular at stage " +
                         std::to_string(stage) +
                         " (condition " + std::to_string(condition) + ")"),
      stage_(stage),
      condition_(condition) {}

const std::vector<Matrix>& FneSolution::K(int player) const {
  if (player == 1) return K1;
  if (player == 2) return K2;
  throw std::invalid_argument("player index must be 1 or 2");
}

const std::vector<Matrix>& FneSolution::P(int player) const {
  if (player == 1) return P1;
  if (player == 2) return P2;
  throw std::invalid_argument("player index must be 1 or 2");
}

FneSolution solve_fne(const GameDefinition& game) {
  const int N = game.horizon;
  const int n = game.state_dim();
  const int m1 = game.input_dim(1);
  const int m2 = game.input_dim(2);

  FneSolution sol;
  sol.K1.assign(N, Matrix());
  sol.K2.assign(N, Matrix());
  sol.Acl.assign(N, Matrix());
  sol.P1.assign(N + 1, Matrix());
  sol.P2.assign(N + 1, Matrix());
  sol.P1[N] = game.Q1N;
  sol.P2[N] = game.Q2N;

  Matrix S(m1 + m2, m1 + m2);
  Matrix Y(m1 + m2, n);

  for (int k = N - 1; k >= 0; --k) {
    const Matrix& P1n = sol.P1[k + 1];
    const Matrix& P2n = sol.P2[k + 1];
    const Matrix B1tP1 = game.B1.transpose() * P1n;
    const Matrix B2tP2 = game.B2.transpose() * P2n;

    // Joint stationarity of both players' gains at this stage:
    //   (R1 + B1'P1 B1) K1 + B1'P1 B2 K2 = B1'P1 A
    //   B2'P2 B1 K1 + (R2 + B2'P2 B2) K2 = B2'P2 A
    S.topLeftCorner(m1, m1) = game.R1 + B1tP1 * game.B1;
    S.topRightCorner(m1, m2) = B1tP1 * game.B2;
    S.bottomLeftCorner(m2, m1) = B2tP2 * game.B1;
    S.bottomRightCorner(m2, m2) = game.R2 + B2tP2 * game.B2;
    Y.topRows(m1) = B1tP1 * game.A;
    Y.bottomRows(m2) = B2tP2 * game.A;

    Eigen::JacobiSVD<Matrix> svd(S, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    const double cond =
        smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
    if (!std::isfinite(cond) || cond > kSingularCondition) {
      throw SingularStageSystem(k, cond);
    }

    const Matrix X = svd.solve(Y);
    sol.K1[k] = X.topRows(m1);
    sol.K2[k] = X.bottomRows(m2);
    sol.Acl[k] = game.A - game.B1 * sol.K1[k] - game.B2 * sol.K2[k];

    const Matrix Acl1 = game.A - game.B2 * sol.K2[k];
    const Matrix Acl2 = game.A - game.B1 * sol.K1[k];
    const Matrix H1 = game.R1 + B1tP1 * game.B1;
    const Matrix H2 = game.R2 + B2tP2 * game.B2;
    const Matrix W1 = B1tP1 * Acl1;
    const Matrix W2 = B2tP2 * Acl2;
    sol.P1[k] = symmetrize(game.Q1 + Acl1.transpose() * P1n * Acl1 -
                           W1.transpose() * H1.ldlt().solve(W1));
    sol.P2[k] = symmetrize(game.Q2 + Acl2.transpose() * P2n * Acl2 -
                           W2.transpose() * H2.ldlt().solve(W2));
  }
  return sol;
}

std::vector<Matrix> best_response_gains(const GameDefinition& game, int player,
                                        const std::vector<Matrix>& opponent_gains) {
  const int other = player == 1 ? 2 : 1;
  check_gain_dims(game, other, opponent_gains, "best_response_gains");

  const int N = game.horizon;
  const Matrix& Bi = game.B(player);
  const Matrix& Bo = game.B(other);
  const Matrix& Qi = game.Q(player);
  const Matrix& Ri = game.R(player);

  std::vector<Matrix> gains(N);
  Matrix P = game.QN(player);
  for (int k = N - 1; k >= 0; --k) {
    const Matrix Ak = game.A - Bo * opponent_gains[k];
    const Matrix BtP = Bi.transpose() * P;
    const Matrix H = Ri + BtP * Bi;
    const Matrix W = BtP * Ak;
    gains[k] = H.ldlt().solve(W);
    P = symmetrize(Qi + Ak.transpose() * P * Ak -
                   W.transpose() * H.ldlt().solve(W));
  }
  return gains;
}

}  // namespace lqgame
