#pragma once

#include "sid/state_space.hpp"

namespace sid {

struct DiscreteStateSpace {
  Eigen::MatrixXd Ad, Bd, C, D;
  double ts{};
  int order{};  // 1..4 Taylor, or kExactOrder
  static constexpr int kExactOrder = 0;
};

// Truncated Taylor expansion of the matrix exponential:
//   Ad = sum_{i=0..p}   A^i Ts^i / i!
//   Bd = sum_{i=0..p-1} A^i B Ts^(i+1) / (i+1)!
// so that p=1 gives Ad = I + A Ts, Bd = B Ts. Low orders at coarse Ts are
// deliberately allowed to be bad models; a spectral-radius warning is logged
// once per call when |Ad| grows past 1.1.
DiscreteStateSpace taylor_discretize(const ContinuousStateSpace& space, double ts, int order);

// High-accuracy reference: Ad = expm(A Ts), Bd via the augmented-matrix
// exponential trick. Used as the truth integrator and as the test oracle.
DiscreteStateSpace exact_discretize(const ContinuousStateSpace& space, double ts);

// Raw-matrix variants for hot paths (no C/D bookkeeping, no stability check).
void taylor_discretize(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double ts,
                       int order, Eigen::MatrixXd& Ad, Eigen::MatrixXd& Bd);
void exact_discretize(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double ts,
                      Eigen::MatrixXd& Ad, Eigen::MatrixXd& Bd);

struct StepResult {
  Eigen::VectorXd x_next, y;
};

StepResult step(const DiscreteStateSpace& space, const Eigen::VectorXd& x,
                const Eigen::VectorXd& u);

}  // namespace sid
