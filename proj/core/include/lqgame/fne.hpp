#pragma once

#include <stdexcept>
#include <vector>

#include "lqgame/game.hpp"

namespace lqgame {

/// Thrown when the stacked per-stage gain system is numerically singular
/// (relative condition number above 1e12), i.e. the uniqueness conditions
/// fail at that stage.
class SingularStageSystem : public std::runtime_error {
 public:
  SingularStageSystem(int stage, double condition);
  int stage() const { return stage_; }
  double condition() const { return condition_; }

 private:
  int stage_;
  double condition_;
};

// Feedback Nash equilibrium of the game: per-stage gains, the coupled
// Riccati sequences, and the closed-loop matrices.
struct FneSolution {
  std::vector<Matrix> K1;   // N gains, m1 x n
  std::vector<Matrix> K2;   // N gains, m2 x n
  std::vector<Matrix> P1;   // N+1 matrices, P1[N] = Q1N
  std::vector<Matrix> P2;   // N+1 matrices, P2[N] = Q2N
  std::vector<Matrix> Acl;  // N matrices, A - B1 K1[k] - B2 K2[k]

  int horizon() const { return static_cast<int>(K1.size()); }
  const std::vector<Matrix>& K(int player) const;
  const std::vector<Matrix>& P(int player) const;
};

/// Backward coupled Riccati sweep. The two stage-wise stationarity
/// conditions are solved jointly as one stacked linear system in (K1, K2);
/// Riccati iterates are symmetrized every stage.
FneSolution solve_fne(const GameDefinition& game);

/// Finite-horizon LQR gains for `player` against a fixed opponent feedback
/// sequence (time-varying drift A - B_{-i} K_{-i,k}).
std::vector<Matrix> best_response_gains(const GameDefinition& game, int player,
                                        const std::vector<Matrix>& opponent_gains);

}  // namespace lqgame
