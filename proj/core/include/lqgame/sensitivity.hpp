#pragma once

#include <vector>

#include "lqgame/fne.hpp"
#include "lqgame/game.hpp"

namespace lqgame {

// Additive deviation of Player 2's input, one entry per stage.
struct DeviationSequence {
  std::vector<Vector> du2;

  int horizon() const { return static_cast<int>(du2.size()); }
};

struct SensitivityReport {
  std::vector<Vector> dx;      // N+1 state perturbations, dx[0] = 0
  std::vector<Matrix> lambda;  // N coefficient matrices
  std::vector<Matrix> Sk;      // N matrices, Q1 + K1[k]' R1 K1[k]
  double dJ1_linear = 0.0;     // first-order cost change
  double dJ1_exact = 0.0;      // simulated J1(perturbed) - J1(nominal)
};

/// Ordered closed-loop product Phi(k, j) = Acl[k-1] ... Acl[j], with
/// Phi(j, j) = I. Requires 0 <= j <= k <= N.
Matrix transition_matrix(const FneSolution& fne, int k, int j);

/// State perturbation dx_0..dx_N induced by the deviation, via the forward
/// recursion dx_{k+1} = Acl[k] dx_k + B2 du2_k from dx_0 = 0.
std::vector<Vector> state_perturbation(const FneSolution& fne,
                                       const GameDefinition& game,
                                       const DeviationSequence& dev);

/// First-order cost coefficients Lambda_j, accumulated backward in
/// O(N n^3). lambda[N-1] carries only the terminal-weight term.
std::vector<Matrix> lambda_coefficients(const FneSolution& fne,
                                        const GameDefinition& game);

/// Full sensitivity report: the linear cost term 2 sum_j x0' Lambda_j B2
/// du2_j and the exact cost difference from two rollouts.
SensitivityReport first_order_delta_j1(const FneSolution& fne,
                                       const GameDefinition& game,
                                       const Vector& x0,
                                       const DeviationSequence& dev);

}  // namespace lqgame
