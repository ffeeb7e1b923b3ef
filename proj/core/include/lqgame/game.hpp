#pragma once

#include <string>
#include <vector>

#include "lqgame/matrix.hpp"

namespace lqgame {

// Two-player finite-horizon discrete-time LQ game
//   x_{k+1} = A x_k + B1 u_{1,k} + B2 u_{2,k},   k = 0..N-1
//   J_i     = sum_k (x_k'Q_i x_k + u_{i,k}'R_i u_{i,k}) + x_N'Q_iN x_N
//
// The constructor enforces dimensional consistency only; definiteness and
// well-posedness checks are performed by validate_game().
struct GameDefinition {
  Matrix A;
  Matrix B1, B2;
  Matrix Q1, Q2;
  Matrix R1, R2;
  Matrix Q1N, Q2N;
  int horizon = 0;

  GameDefinition(Matrix A_in, Matrix B1_in, Matrix B2_in, Matrix Q1_in,
                 Matrix Q2_in, Matrix R1_in, Matrix R2_in, Matrix Q1N_in,
                 Matrix Q2N_in, int horizon_in);

  int state_dim() const { return static_cast<int>(A.rows()); }
  int input_dim(int player) const;

  const Matrix& B(int player) const;
  const Matrix& Q(int player) const;
  const Matrix& R(int player) const;
  const Matrix& QN(int player) const;
};

// Outcome of the existence/uniqueness checks. All checks always run; failed
// ones set their flag false and append a message.
struct ValidationReport {
  bool q1_psd = false;
  bool q2_psd = false;
  bool q1n_psd = false;
  bool q2n_psd = false;
  bool r1_pd = false;
  bool r2_pd = false;
  bool controllable = false;
  // Stage-k entries use the Riccati matrices P_{i,k}, k = 0..N-1.
  std::vector<bool> mk_invertible;
  std::vector<double> mk_condition;
  // Conditioning of the stacked per-stage gain system (the operative
  // solvability requirement for the coupled updates).
  std::vector<double> stage_condition;
  std::vector<std::string> messages;

  bool definiteness_ok() const {
    return q1_psd && q2_psd && q1n_psd && q2n_psd && r1_pd && r2_pd;
  }
  bool all_ok() const;
};

ValidationReport validate_game(const GameDefinition& game);

}  // namespace lqgame
