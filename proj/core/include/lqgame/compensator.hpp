#pragma once

#include <vector>

#include "lqgame/fne.hpp"
#include "lqgame/game.hpp"

namespace lqgame {

/// Value of the opponent's applied input at stage 0: zero (ColdStart) or
/// equal to its intended command (Matched).
enum class InitialInputMode { ColdStart, Matched };

// First-order actuator lag u_{k+1} = alpha u_k + (1 - alpha) u*_k with
// alpha = exp(-dt/tau).
struct LagModel {
  double tau = 0.0;
  double dt = 0.0;
  double alpha = 0.0;
  InitialInputMode initial_input_mode = InitialInputMode::ColdStart;
};

LagModel build_lag_model(double tau, double dt,
                         InitialInputMode mode = InitialInputMode::ColdStart);

enum class CompensatorMode { FullLag, SlowVarying };

/// Completion of the out-of-range stage-N opponent gain in the augmented
/// dynamics. Either choice yields identical compensator gains.
enum class TerminalGainConvention { Zero, HoldLast };

// Augmented system on z = [x; w] describing the joint evolution of the
// state and the lag-induced disturbance under the opponent's feedback.
struct AugmentedSystem {
  std::vector<Matrix> Abar;  // N matrices, 2n x 2n
  std::vector<Matrix> Bbar;  // N matrices, 2n x m1
  Matrix Qbar;               // 2n x 2n, top-left block Q1
  Matrix QbarN;              // 2n x 2n, top-left block Q1N
  CompensatorMode mode = CompensatorMode::FullLag;
  double alpha = 0.0;
};

AugmentedSystem build_augmented_system(
    const GameDefinition& game, const FneSolution& fne, const LagModel& lag,
    CompensatorMode mode,
    TerminalGainConvention convention = TerminalGainConvention::Zero);

// Optimal causal affine policy u1 = -K x - L w over the augmented horizon,
// with the Riccati sequence and the stage input Hessians H_k that define
// the gap identity.
struct CompensatorGains {
  std::vector<Matrix> K;     // N, m1 x n
  std::vector<Matrix> L;     // N, m1 x n
  std::vector<Matrix> Pbar;  // N+1, 2n x 2n
  std::vector<Matrix> Hk;    // N, m1 x m1, R1 + Bbar' Pbar Bbar
  std::vector<Matrix> Bbar;  // N, 2n x m1, kept for the stage identities
  CompensatorMode mode = CompensatorMode::FullLag;
  // SlowVarying mode only: the block recursions solved directly. Cross-checked
  // against the corresponding blocks of Pbar on construction.
  std::vector<Matrix> Pxx;  // N+1
  std::vector<Matrix> Pxw;  // N+1, Pxw[N] = 0
};

CompensatorGains solve_compensator(const GameDefinition& game,
                                   const AugmentedSystem& aug);

/// Cost excess of an alternative causal affine policy over the optimal one:
/// sum_k (u_alt - u_opt)' H_k (u_alt - u_opt), both policies evaluated on the
/// alternative rollout's augmented states. Nonnegative and equal to
/// J1(alt) - J1(optimal).
double gap_value(const CompensatorGains& gains, const std::vector<Matrix>& alt_K,
                 const std::vector<Matrix>& alt_L,
                 const std::vector<Vector>& rollout_states);

/// Leading-order estimate of J1(CF) - J1(REF) from a realized disturbance
/// trajectory: -sum_k || H_k^{-1/2} Bbar_k' Pbar_{k+1} [0; w_k] ||^2. Always
/// nonpositive.
double local_gain_estimate(const CompensatorGains& gains,
                           const std::vector<Vector>& w_trajectory);

}  // namespace lqgame
