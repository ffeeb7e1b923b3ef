#include "lqgame/sensitivity.hpp"

#include <stdexcept>
#include <string>

#include "lqgame/sim.hpp"

namespace lqgame {
namespace {

void check_deviation(const GameDefinition& game, const DeviationSequence& dev) {
  if (dev.horizon() != game.horizon) {
    throw std::invalid_argument("deviation sequence must have " +
                                std::to_string(game.horizon) + " entries, got " +
                                std::to_string(dev.horizon()));
  }
  for (const Vector& d : dev.du2) {
    if (d.size() != game.input_dim(2)) {
      throw std::invalid_argument("deviation entry dimension mismatch");
    }
  }
}

}  // namespace

Matrix transition_matrix(const FneSolution& fne, int k, int j) {
  const int N = fne.horizon();
  if (j > k || j < 0 || k > N) {
    throw std::domain_error("transition_matrix: need 0 <= j <= k <= N, got k=" +
                            std::to_string(k) + " j=" + std::to_string(j));
  }
  const int n = static_cast<int>(fne.Acl.empty() ? 0 : fne.Acl[0].rows());
  Matrix phi = Matrix::Identity(n, n);
  for (int i = j; i < k; ++i) {
    phi = fne.Acl[i] * phi;
  }
  return phi;
}

std::vector<Vector> state_perturbation(const FneSolution& fne,
                                       const GameDefinition& game,
                                       const DeviationSequence& dev) {
  check_deviation(game, dev);
  const int N = game.horizon;
  std::vector<Vector> dx(N + 1);
  dx[0] = Vector::Zero(game.state_dim());
  for (int k = 0; k < N; ++k) {
    dx[k + 1] = fne.Acl[k] * dx[k] + game.B2 * dev.du2[k];
  }
  return dx;
}

std::vector<Matrix> lambda_coefficients(const FneSolution& fne,
                                        const GameDefinition& game) {
  const int N = game.horizon;
  const int n = game.state_dim();

  // T_j = Phi(j,0)' S_j + T_{j+1} Acl[j], T_N = Phi(N,0)' Q1N; then
  // Lambda_j = T_{j+1}. One n^3 product per stage instead of the N^2 sums.
  std::vector<Matrix> phi_k0(N + 1);  // Phi(k, 0)
  phi_k0[0] = Matrix::Identity(n, n);
  for (int k = 0; k < N; ++k) {
    phi_k0[k + 1] = fne.Acl[k] * phi_k0[k];
  }

  std::vector<Matrix> T(N + 1);
  T[N] = phi_k0[N].transpose() * game.Q1N;
  for (int j = N - 1; j >= 1; --j) {
    const Matrix Sj =
        game.Q1 + fne.K1[j].transpose() * game.R1 * fne.K1[j];
    T[j] = phi_k0[j].transpose() * Sj + T[j + 1] * fne.Acl[j];
  }

  std::vector<Matrix> lambda(N);
  for (int j = 0; j < N; ++j) {
    lambda[j] = T[j + 1];
  }
  return lambda;
}

SensitivityReport first_order_delta_j1(const FneSolution& fne,
                                       const GameDefinition& game,
                                       const Vector& x0,
                                       const DeviationSequence& dev) {
  check_deviation(game, dev);
  if (x0.size() != game.state_dim()) {
    throw std::invalid_argument("x0 dimension mismatch");
  }
  const int N = game.horizon;

  SensitivityReport report;
  report.dx = state_perturbation(fne, game, dev);
  report.lambda = lambda_coefficients(fne, game);
  report.Sk.resize(N);
  for (int k = 0; k < N; ++k) {
    report.Sk[k] =
        symmetrize(game.Q1 + fne.K1[k].transpose() * game.R1 * fne.K1[k]);
  }

  double linear = 0.0;
  for (int j = 0; j < N; ++j) {
    linear += 2.0 * x0.dot(report.lambda[j] * (game.B2 * dev.du2[j]));
  }
  report.dJ1_linear = linear;

  PolicyCase nominal;
  nominal.kind = CaseKind::Fne;
  nominal.fne = &fne;
  const SimulationResult base = simulate(game, nominal, x0);
  const SimulationResult perturbed = simulate_with_deviation(game, fne, x0, dev.du2);
  report.dJ1_exact = perturbed.J1 - base.J1;
  return report;
}

}  // namespace lqgame
