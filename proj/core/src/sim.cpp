#include "lqgame/sim.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lqgame {
namespace {

constexpr double kDivergenceNorm = 1e12;

void guard_state(const Vector& x, int stage) {
  if (!x.allFinite() || x.cwiseAbs().maxCoeff() > kDivergenceNorm) {
    throw DivergenceError(stage, x.allFinite() ? x.cwiseAbs().maxCoeff()
                                               : std::nan(""));
  }
}

void check_x0(const GameDefinition& game, const Vector& x0) {
  if (x0.size() != game.state_dim()) {
    throw std::invalid_argument("x0 must have dimension " +
                                std::to_string(game.state_dim()));
  }
}

double stage_cost(const Matrix& Q, const Matrix& R, const Vector& x,
                  const Vector& u) {
  return x.dot(Q * x) + u.dot(R * u);
}

void finalize_costs(const GameDefinition& game, SimulationResult& r) {
  const Vector& xN = r.x.back();
  r.stage_cost1.push_back(xN.dot(game.Q1N * xN));
  r.stage_cost2.push_back(xN.dot(game.Q2N * xN));
  r.J1 = pairwise_sum(r.stage_cost1);
  r.J2 = pairwise_sum(r.stage_cost2);
}

// Shared rollout skeleton. Player 2 applies `applied_u2(k, x, intended)`;
// Player 1 applies `u1(k, x, w)`. Within each stage: read x_k, form the
// intended command, form the applied command, form w_k, then Player 1's
// input, then advance the state.
template <typename AppliedU2, typename U1Policy>
SimulationResult rollout(const GameDefinition& game, const FneSolution& fne,
                         const Vector& x0, AppliedU2&& applied_u2,
                         U1Policy&& u1_policy) {
  check_x0(game, x0);
  const int N = game.horizon;
  SimulationResult r;
  r.x.reserve(N + 1);
  r.u1.reserve(N);
  r.u2_applied.reserve(N);
  r.u2_intended.reserve(N);
  r.w.reserve(N);
  r.stage_cost1.reserve(N + 1);
  r.stage_cost2.reserve(N + 1);

  Vector x = x0;
  guard_state(x, 0);
  r.x.push_back(x);
  for (int k = 0; k < N; ++k) {
    const Vector intended = -(fne.K2[k] * x);
    const Vector applied = applied_u2(k, intended);
    const Vector w = game.B2 * (applied - intended);
    const Vector u1 = u1_policy(k, x, w);

    r.stage_cost1.push_back(stage_cost(game.Q1, game.R1, x, u1));
    r.stage_cost2.push_back(stage_cost(game.Q2, game.R2, x, applied));
    r.u1.push_back(u1);
    r.u2_applied.push_back(applied);
    r.u2_intended.push_back(intended);
    r.w.push_back(w);

    x = game.A * x + game.B1 * u1 + game.B2 * applied;
    guard_state(x, k + 1);
    r.x.push_back(x);
  }
  finalize_costs(game, r);
  return r;
}

}  // namespace

DivergenceError::DivergenceError(int stage, double norm)
    : std::runtime_error("state diverged at stage " + std::to_string(stage) +
                         " (|x| = " + std::to_string(norm) + ")"),
      stage_(stage) {}

SimulationResult simulate_affine(const GameDefinition& game, const FneSolution& fne,
                                 const LagModel& lag, const std::vector<Matrix>& K,
                                 const std::vector<Matrix>& L, const Vector& x0) {
  if (static_cast<int>(K.size()) != game.horizon ||
      static_cast<int>(L.size()) != game.horizon) {
    throw std::invalid_argument("affine policy must supply one (K, L) per stage");
  }
  Vector u2_state;       // applied input carried by the lag
  Vector last_intended;  // intended command at the previous stage
  auto applied_u2 = [&](int k, const Vector& intended) {
    if (k == 0) {
      u2_state = lag.initial_input_mode == InitialInputMode::Matched
                     ? intended
                     : Vector::Zero(intended.size()).eval();
    } else {
      u2_state = lag.alpha * u2_state + (1.0 - lag.alpha) * last_intended;
    }
    last_intended = intended;
    return u2_state;
  };
  auto u1_policy = [&](int k, const Vector& x, const Vector& w) {
    return (-(K[k] * x) - L[k] * w).eval();
  };
  return rollout(game, fne, x0, applied_u2, u1_policy);
}

SimulationResult simulate_with_deviation(const GameDefinition& game,
                                         const FneSolution& fne, const Vector& x0,
                                         const std::vector<Vector>& du2) {
  if (static_cast<int>(du2.size()) != game.horizon) {
    throw std::invalid_argument("deviation sequence must have one entry per stage");
  }
  auto applied_u2 = [&](int k, const Vector& intended) {
    return (intended + du2[k]).eval();
  };
  auto u1_policy = [&](int k, const Vector& x, const Vector&) {
    return (-(fne.K1[k] * x)).eval();
  };
  return rollout(game, fne, x0, applied_u2, u1_policy);
}

SimulationResult simulate(const GameDefinition& game, const PolicyCase& policy,
                          const Vector& x0) {
  if (policy.fne == nullptr) {
    throw std::invalid_argument("policy case requires an equilibrium solution");
  }
  const FneSolution& fne = *policy.fne;
  switch (policy.kind) {
    case CaseKind::Fne: {
      if (policy.lag.has_value()) {
        throw std::invalid_argument("the equilibrium case carries no lag model");
      }
      auto applied_u2 = [](int, const Vector& intended) { return intended; };
      auto u1_policy = [&](int k, const Vector& x, const Vector&) {
        return (-(fne.K1[k] * x)).eval();
      };
      return rollout(game, fne, x0, applied_u2, u1_policy);
    }
    case CaseKind::Ref: {
      if (!policy.lag.has_value()) {
        throw std::invalid_argument("the lagged reference case requires a lag model");
      }
      const std::vector<Matrix> zeros(
          game.horizon, Matrix::Zero(game.input_dim(1), game.state_dim()));
      return simulate_affine(game, fne, *policy.lag, fne.K1, zeros, x0);
    }
    case CaseKind::Cf: {
      if (!policy.lag.has_value() || policy.compensator == nullptr) {
        throw std::invalid_argument(
            "the compensated case requires a lag model and compensator gains");
      }
      return simulate_affine(game, fne, *policy.lag, policy.compensator->K,
                             policy.compensator->L, x0);
    }
  }
  throw std::logic_error("unreachable");
}

double evaluate_cost(const GameDefinition& game, const SimulationResult& result,
                     int player) {
  const int N = game.horizon;
  if (result.horizon() != N || static_cast<int>(result.x.size()) != N + 1) {
    throw std::invalid_argument("trajectory length inconsistent with the game");
  }
  const Matrix& Q = game.Q(player);
  const Matrix& R = game.R(player);
  const auto& u = player == 1 ? result.u1 : result.u2_applied;
  std::vector<double> terms;
  terms.reserve(N + 1);
  for (int k = 0; k < N; ++k) {
    terms.push_back(stage_cost(Q, R, result.x[k], u[k]));
  }
  terms.push_back(result.x[N].dot(game.QN(player) * result.x[N]));
  return pairwise_sum(terms);
}

std::vector<Vector> augmented_states(const SimulationResult& result) {
  const int N = result.horizon();
  std::vector<Vector> z(N);
  for (int k = 0; k < N; ++k) {
    const auto n = result.x[k].size();
    z[k].resize(2 * n);
    z[k] << result.x[k], result.w[k];
  }
  return z;
}

CaseComparison compare_cases(const GameDefinition& game, const FneSolution& fne,
                             const CompensatorGains& cf, const LagModel& lag,
                             const Vector& x0) {
  PolicyCase nominal{CaseKind::Fne, &fne, nullptr, std::nullopt};
  PolicyCase reference{CaseKind::Ref, &fne, nullptr, lag};
  PolicyCase compensated{CaseKind::Cf, &fne, &cf, lag};

  const SimulationResult a = simulate(game, nominal, x0);
  const SimulationResult b = simulate(game, reference, x0);
  const SimulationResult c = simulate(game, compensated, x0);

  CaseComparison out;
  out.J1_fne = a.J1;
  out.J2_fne = a.J2;
  out.J1_ref = b.J1;
  out.J2_ref = b.J2;
  out.J1_cf = c.J1;
  out.J2_cf = c.J2;
  out.ref_vs_fne_increase_pct = 100.0 * (b.J1 - a.J1) / a.J1;
  out.cf_vs_ref_improvement_pct = 100.0 * (b.J1 - c.J1) / b.J1;
  out.loss_recovered_pct = 100.0 * (b.J1 - c.J1) / (b.J1 - a.J1);
  return out;
}

}  // namespace lqgame
