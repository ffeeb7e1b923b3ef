#include "lqgame/compensator.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lqgame {
namespace {

void check_consistent(const GameDefinition& game, const FneSolution& fne) {
  if (fne.horizon() != game.horizon) {
    throw std::invalid_argument("equilibrium solution horizon " +
                                std::to_string(fne.horizon()) +
                                " does not match game horizon " +
                                std::to_string(game.horizon));
  }
}

// Symmetric PD inverse square root via eigendecomposition.
Matrix inverse_sqrt(const Matrix& H) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(H);
  if (es.eigenvalues().minCoeff() <= 0.0) {
    throw std::runtime_error("stage input Hessian lost positive definiteness");
  }
  return es.eigenvectors() *
         es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}

}  // namespace

LagModel build_lag_model(double tau, double dt, InitialInputMode mode) {
  if (!(tau > 0.0) || !(dt > 0.0)) {
    throw std::domain_error("lag model requires tau > 0 and dt > 0");
  }
  LagModel lag;
  lag.tau = tau;
  lag.dt = dt;
  lag.alpha = std::exp(-dt / tau);
  lag.initial_input_mode = mode;
  return lag;
}

AugmentedSystem build_augmented_system(const GameDefinition& game,
                                       const FneSolution& fne, const LagModel& lag,
                                       CompensatorMode mode,
                                       TerminalGainConvention convention) {
  check_consistent(game, fne);
  const int N = game.horizon;
  const int n = game.state_dim();
  const int m1 = game.input_dim(1);
  const Matrix I = Matrix::Identity(n, n);
  const Matrix Zn = Matrix::Zero(n, n);

  AugmentedSystem aug;
  aug.mode = mode;
  aug.alpha = lag.alpha;
  aug.Abar.resize(N);
  aug.Bbar.resize(N);
  aug.Qbar = Matrix::Zero(2 * n, 2 * n);
  aug.Qbar.topLeftCorner(n, n) = game.Q1;
  aug.QbarN = Matrix::Zero(2 * n, 2 * n);
  aug.QbarN.topLeftCorner(n, n) = game.Q1N;

  for (int k = 0; k < N; ++k) {
    const Matrix Aeff = game.A - game.B2 * fne.K2[k];
    Matrix Ab(2 * n, 2 * n);
    Matrix Bb(2 * n, m1);
    if (mode == CompensatorMode::SlowVarying) {
      Ab << Aeff, I, Zn, lag.alpha * I;
      Bb << game.B1, Matrix::Zero(n, m1);
    } else {
      // The stage-N opponent gain is out of the equilibrium index range;
      // either completion yields identical compensator gains because the
      // w-blocks of Pbar_N vanish.
      Matrix K2_next;
      if (k + 1 < N) {
        K2_next = fne.K2[k + 1];
      } else if (convention == TerminalGainConvention::HoldLast) {
        K2_next = fne.K2[N - 1];
      } else {
        K2_next = Matrix::Zero(game.input_dim(2), n);
      }
      const Matrix BK = game.B2 * K2_next;
      Ab << Aeff, I,                                   //
          BK * Aeff - game.B2 * fne.K2[k], lag.alpha * I + BK;
      Bb << game.B1, BK * game.B1;
    }
    aug.Abar[k] = Ab;
    aug.Bbar[k] = Bb;
  }
  return aug;
}

CompensatorGains solve_compensator(const GameDefinition& game,
                                   const AugmentedSystem& aug) {
  const int N = game.horizon;
  const int n = game.state_dim();
  if (static_cast<int>(aug.Abar.size()) != N) {
    throw std::invalid_argument("augmented system horizon mismatch");
  }

  CompensatorGains gains;
  gains.mode = aug.mode;
  gains.K.resize(N);
  gains.L.resize(N);
  gains.Hk.resize(N);
  gains.Bbar = aug.Bbar;
  gains.Pbar.assign(N + 1, Matrix());
  gains.Pbar[N] = aug.QbarN;

  for (int k = N - 1; k >= 0; --k) {
    const Matrix& Ab = aug.Abar[k];
    const Matrix& Bb = aug.Bbar[k];
    const Matrix& Pn = gains.Pbar[k + 1];
    const Matrix BtP = Bb.transpose() * Pn;
    const Matrix H = symmetrize(game.R1 + BtP * Bb);
    Eigen::SelfAdjointEigenSolver<Matrix> es(H, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() <= 0.0) {
      throw std::runtime_error(
          "compensator: stage input Hessian not positive definite at stage " +
          std::to_string(k));
    }
    const Matrix G = BtP * Ab;  // H [K L] = Bbar' Pbar Abar
    const Matrix KL = H.ldlt().solve(G);
    gains.K[k] = KL.leftCols(n);
    gains.L[k] = KL.rightCols(n);
    gains.Hk[k] = H;
    gains.Pbar[k] = symmetrize(aug.Qbar + Ab.transpose() * Pn * Ab -
                               G.transpose() * H.ldlt().solve(G));
  }

  if (aug.mode == CompensatorMode::SlowVarying) {
    // Solve the x- and xw-block recursions directly and require agreement
    // with the corresponding blocks of the augmented sweep.
    gains.Pxx.assign(N + 1, Matrix());
    gains.Pxw.assign(N + 1, Matrix());
    gains.Pxx[N] = game.Q1N;
    gains.Pxw[N] = Matrix::Zero(n, n);
    double pscale = 1.0;
    for (const Matrix& P : gains.Pbar) {
      pscale = std::max(pscale, P.cwiseAbs().maxCoeff());
    }
    for (int k = N - 1; k >= 0; --k) {
      const Matrix Aeff = aug.Abar[k].topLeftCorner(n, n);
      const Matrix& Pxxn = gains.Pxx[k + 1];
      const Matrix& Pxwn = gains.Pxw[k + 1];
      const Matrix BtPxx = game.B1.transpose() * Pxxn;
      const Matrix H = symmetrize(game.R1 + BtPxx * game.B1);
      const Matrix Kk = H.ldlt().solve(BtPxx * Aeff);
      const Matrix Lk =
          H.ldlt().solve(game.B1.transpose() * (Pxxn + aug.alpha * Pxwn));
      gains.Pxx[k] = symmetrize(game.Q1 + Aeff.transpose() * Pxxn * Aeff -
                                Aeff.transpose() * Pxxn * game.B1 * Kk);
      gains.Pxw[k] = Aeff.transpose() * Pxxn + aug.alpha * Aeff.transpose() * Pxwn -
                     Aeff.transpose() * Pxxn * game.B1 * Lk;
      const double tol = 1e-10 * pscale;
      if ((gains.Pbar[k].topLeftCorner(n, n) - gains.Pxx[k])
                  .cwiseAbs()
                  .maxCoeff() > tol ||
          (gains.Pbar[k].topRightCorner(n, n) - gains.Pxw[k])
                  .cwiseAbs()
                  .maxCoeff() > tol) {
        throw std::runtime_error(
            "compensator: slow-varying block recursion disagrees with the "
            "augmented sweep at stage " + std::to_string(k));
      }
    }
  }
  return gains;
}

double gap_value(const CompensatorGains& gains, const std::vector<Matrix>& alt_K,
                 const std::vector<Matrix>& alt_L,
                 const std::vector<Vector>& rollout_states) {
  const size_t N = gains.K.size();
  if (alt_K.size() != N || alt_L.size() != N || rollout_states.size() != N) {
    throw std::invalid_argument("gap_value: sequence length mismatch");
  }
  const Eigen::Index n = gains.K[0].cols();
  double gap = 0.0;
  for (size_t k = 0; k < N; ++k) {
    const Vector& z = rollout_states[k];
    if (z.size() != 2 * n) {
      throw std::invalid_argument("gap_value: augmented state dimension mismatch");
    }
    const Vector x = z.head(n);
    const Vector w = z.tail(n);
    const Vector u_alt = -(alt_K[k] * x + alt_L[k] * w);
    const Vector u_opt = -(gains.K[k] * x + gains.L[k] * w);
    const Vector d = u_alt - u_opt;
    gap += d.dot(gains.Hk[k] * d);
  }
  return gap;
}

double local_gain_estimate(const CompensatorGains& gains,
                           const std::vector<Vector>& w_trajectory) {
  const size_t N = gains.K.size();
  if (w_trajectory.size() != N) {
    throw std::invalid_argument("local_gain_estimate: trajectory length mismatch");
  }
  const Eigen::Index n = gains.K[0].cols();
  double total = 0.0;
  for (size_t k = 0; k < N; ++k) {
    if (w_trajectory[k].size() != n) {
      throw std::invalid_argument("local_gain_estimate: disturbance dimension mismatch");
    }
    // Bbar' Pbar_{k+1} applied to the w-slot injection [0; w_k].
    const Vector v = gains.Bbar[k].transpose() *
                     (gains.Pbar[k + 1].rightCols(n) * w_trajectory[k]);
    total -= (inverse_sqrt(gains.Hk[k]) * v).squaredNorm();
  }
  return total;
}

}  // namespace lqgame
