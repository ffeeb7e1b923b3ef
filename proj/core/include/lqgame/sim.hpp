#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "lqgame/compensator.hpp"
#include "lqgame/fne.hpp"
#include "lqgame/game.hpp"

namespace lqgame {

enum class CaseKind { Fne, Ref, Cf };

// One of the three closed-loop configurations: both players at equilibrium
// (Fne), Player 2 lagged with Player 1 unchanged (Ref), or Player 2 lagged
// with Player 1 compensating (Cf).
struct PolicyCase {
  CaseKind kind = CaseKind::Fne;
  const FneSolution* fne = nullptr;
  const CompensatorGains* compensator = nullptr;  // Cf only
  std::optional<LagModel> lag;                    // Ref and Cf only
};

class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(int stage, double norm);
  int stage() const { return stage_; }

 private:
  int stage_;
};

struct SimulationResult {
  std::vector<Vector> x;            // N+1 states
  std::vector<Vector> u1;           // N inputs
  std::vector<Vector> u2_applied;   // N inputs
  std::vector<Vector> u2_intended;  // N inputs, -K2[k] x_k
  std::vector<Vector> w;            // N disturbances, B2 (u2_applied - u2_intended)
  std::vector<double> stage_cost1;  // N+1 terms, last one terminal
  std::vector<double> stage_cost2;  // N+1 terms
  double J1 = 0.0;
  double J2 = 0.0;

  int horizon() const { return static_cast<int>(u1.size()); }
};

/// Closed-loop rollout of one case on the true dynamics. Throws
/// DivergenceError if the state norm exceeds 1e12 or turns non-finite.
SimulationResult simulate(const GameDefinition& game, const PolicyCase& policy,
                          const Vector& x0);

/// Rollout with Player 2 lagged and Player 1 applying the affine law
/// u1 = -K[k] x - L[k] w. Ref is the special case (K = K1*, L = 0).
SimulationResult simulate_affine(const GameDefinition& game, const FneSolution& fne,
                                 const LagModel& lag, const std::vector<Matrix>& K,
                                 const std::vector<Matrix>& L, const Vector& x0);

/// Rollout with Player 2 applying its feedback command plus an additive
/// deviation sequence while Player 1 keeps the equilibrium law.
SimulationResult simulate_with_deviation(const GameDefinition& game,
                                         const FneSolution& fne, const Vector& x0,
                                         const std::vector<Vector>& du2);

/// Recomputes J_player from the stored trajectory.
double evaluate_cost(const GameDefinition& game, const SimulationResult& result,
                     int player);

/// Augmented states z_k = [x_k; w_k], k = 0..N-1.
std::vector<Vector> augmented_states(const SimulationResult& result);

struct CaseComparison {
  double J1_fne = 0, J2_fne = 0;
  double J1_ref = 0, J2_ref = 0;
  double J1_cf = 0, J2_cf = 0;
  double ref_vs_fne_increase_pct = 0;  // (J1_ref - J1_fne) / J1_fne
  double cf_vs_ref_improvement_pct = 0;  // (J1_ref - J1_cf) / J1_ref
  double loss_recovered_pct = 0;  // (J1_ref - J1_cf) / (J1_ref - J1_fne)
};

/// Runs the three cases from the same initial state and lag model.
CaseComparison compare_cases(const GameDefinition& game, const FneSolution& fne,
                             const CompensatorGains& cf, const LagModel& lag,
                             const Vector& x0);

}  // namespace lqgame
