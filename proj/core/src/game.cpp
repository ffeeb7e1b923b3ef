#include "lqgame/game.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "lqgame/fne.hpp"
#include "lqgame/log.hpp"

namespace lqgame {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("GameDefinition: " + what);
}

double min_symmetric_eigenvalue(const Matrix& S, double* spectral_norm = nullptr) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(S), Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  if (spectral_norm) *spectral_norm = ev.cwiseAbs().maxCoeff();
  return ev.minCoeff();
}

// min symmetric eigenvalue >= -1e-10 * ||Q||
bool check_psd(const Matrix& Q) {
  double norm = 0.0;
  const double min_eig = min_symmetric_eigenvalue(Q, &norm);
  return min_eig >= -1e-10 * norm;
}

// min symmetric eigenvalue > 1e-12 * max(1, ||R||)
bool check_pd(const Matrix& R) {
  double norm = 0.0;
  const double min_eig = min_symmetric_eigenvalue(R, &norm);
  return min_eig > 1e-12 * std::max(1.0, norm);
}

bool check_controllable(const Matrix& A, const Matrix& B1, const Matrix& B2) {
  const int n = static_cast<int>(A.rows());
  const int m = static_cast<int>(B1.cols() + B2.cols());
  Matrix Bt(n, m);
  Bt << B1, B2;
  Matrix ctrb(n, n * m);
  Matrix block = Bt;
  for (int i = 0; i < n; ++i) {
    ctrb.middleCols(i * m, m) = block;
    block = A * block;
  }
  Eigen::JacobiSVD<Matrix> svd(ctrb);
  const auto& sv = svd.singularValues();
  const double tol = n * std::numeric_limits<double>::epsilon() * sv(0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > tol) ++rank;
  }
  return rank == n;
}

double condition_number(const Matrix& M) {
  Eigen::JacobiSVD<Matrix> svd(M);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return sv(0) / smin;
}

}  // namespace

GameDefinition::GameDefinition(Matrix A_in, Matrix B1_in, Matrix B2_in,
                               Matrix Q1_in, Matrix Q2_in, Matrix R1_in,
                               Matrix R2_in, Matrix Q1N_in, Matrix Q2N_in,
                               int horizon_in)
    : A(std::move(A_in)),
      B1(std::move(B1_in)),
      B2(std::move(B2_in)),
      Q1(std::move(Q1_in)),
      Q2(std::move(Q2_in)),
      R1(std::move(R1_in)),
      R2(std::move(R2_in)),
      Q1N(std::move(Q1N_in)),
      Q2N(std::move(Q2N_in)),
      horizon(horizon_in) {
  const auto n = A.rows();
  require(A.cols() == n && n > 0, "A must be square and nonempty");
  require(B1.rows() == n && B1.cols() > 0, "B1 must be n x m1");
  require(B2.rows() == n && B2.cols() > 0, "B2 must be n x m2");
  require(Q1.rows() == n && Q1.cols() == n, "Q1 must be n x n");
  require(Q2.rows() == n && Q2.cols() == n, "Q2 must be n x n");
  require(Q1N.rows() == n && Q1N.cols() == n, "Q1N must be n x n");
  require(Q2N.rows() == n && Q2N.cols() == n, "Q2N must be n x n");
  require(R1.rows() == B1.cols() && R1.cols() == B1.cols(), "R1 must be m1 x m1");
  require(R2.rows() == B2.cols() && R2.cols() == B2.cols(), "R2 must be m2 x m2");
  require(horizon >= 1, "horizon must be at least 1");
}

int GameDefinition::input_dim(int player) const {
  return static_cast<int>(B(player).cols());
}

const Matrix& GameDefinition::B(int player) const {
  if (player == 1) return B1;
  if (player == 2) return B2;
  throw std::invalid_argument("player index must be 1 or 2");
}

const Matrix& GameDefinition::Q(int player) const { return player == 1 ? Q1 : Q2; }
const Matrix& GameDefinition::R(int player) const { return player == 1 ? R1 : R2; }
const Matrix& GameDefinition::QN(int player) const { return player == 1 ? Q1N : Q2N; }

bool ValidationReport::all_ok() const {
  if (!definiteness_ok() || !controllable) return false;
  for (bool ok : mk_invertible) {
    if (!ok) return false;
  }
  return true;
}

ValidationReport validate_game(const GameDefinition& game) {
  ValidationReport report;
  report.q1_psd = check_psd(game.Q1);
  report.q2_psd = check_psd(game.Q2);
  report.q1n_psd = check_psd(game.Q1N);
  report.q2n_psd = check_psd(game.Q2N);
  report.r1_pd = check_pd(game.R1);
  report.r2_pd = check_pd(game.R2);
  if (!report.definiteness_ok()) {
    report.messages.push_back(
        "definiteness condition failed: require Q_i, Q_iN >= 0 and R_i > 0");
  }

  report.controllable = check_controllable(game.A, game.B1, game.B2);
  if (!report.controllable) {
    report.messages.push_back("(A, [B1 B2]) is not controllable");
  }

  const int N = game.horizon;
  const int n = game.state_dim();
  report.mk_invertible.assign(N, false);
  report.mk_condition.assign(N, std::numeric_limits<double>::infinity());
  report.stage_condition.assign(N, std::numeric_limits<double>::infinity());
  report.messages.push_back(
      "M_k evaluated with the coupled Riccati matrices P_{i,k} of the "
      "equilibrium sweep, k = 0..N-1; stacked-gain-system conditioning "
      "reported alongside");

  if (!report.r1_pd || !report.r2_pd) {
    report.messages.push_back(
        "skipping M_k checks: R_i not invertible at the stated tolerance");
    return report;
  }

  // The M_k test needs the Riccati sequences, so run the equilibrium sweep
  // in a tolerant mode: a singular stage marks that and all earlier stages
  // non-invertible (the sweep cannot continue past it).
  std::vector<Matrix> P1s, P2s;
  int first_bad_stage = -1;
  try {
    const FneSolution fne = solve_fne(game);
    P1s = fne.P1;
    P2s = fne.P2;
  } catch (const SingularStageSystem& e) {
    first_bad_stage = e.stage();
    report.messages.push_back("coupled sweep singular at stage " +
                              std::to_string(e.stage()));
  }

  const Matrix F1 = game.B1 * game.R1.llt().solve(game.B1.transpose());
  const Matrix F2 = game.B2 * game.R2.llt().solve(game.B2.transpose());
  const Matrix I = Matrix::Identity(n, n);
  const Matrix Z = Matrix::Zero(n, n);

  for (int k = 0; k < N; ++k) {
    if (first_bad_stage >= 0 && k <= first_bad_stage) continue;
    Matrix Mk(3 * n, 3 * n);
    Mk << I, F1, F2,                     //
        P1s[k], -I, Z,                   //
        P2s[k], Z, -I;
    const double cond = condition_number(Mk);
    report.mk_condition[k] = cond;
    report.mk_invertible[k] = std::isfinite(cond) && cond < 1e12;

    const Matrix& P1n = P1s[k + 1];
    const Matrix& P2n = P2s[k + 1];
    const int m1 = game.input_dim(1);
    const int m2 = game.input_dim(2);
    Matrix S(m1 + m2, m1 + m2);
    S.topLeftCorner(m1, m1) = game.R1 + game.B1.transpose() * P1n * game.B1;
    S.topRightCorner(m1, m2) = game.B1.transpose() * P1n * game.B2;
    S.bottomLeftCorner(m2, m1) = game.B2.transpose() * P2n * game.B1;
    S.bottomRightCorner(m2, m2) = game.R2 + game.B2.transpose() * P2n * game.B2;
    report.stage_condition[k] = condition_number(S);
  }

  if (!report.all_ok()) {
    log_info("validate_game: one or more well-posedness checks failed");
  }
  return report;
}

}  // namespace lqgame
