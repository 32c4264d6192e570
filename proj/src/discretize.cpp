#include "sid/discretize.hpp"

#include <cstdio>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

namespace sid {

void taylor_discretize(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double ts,
                       int order, Eigen::MatrixXd& Ad, Eigen::MatrixXd& Bd) {
  if (order < 1 || order > 8) throw std::invalid_argument("taylor order must be in [1, 8]");
  if (!(ts > 0.0)) throw std::invalid_argument("sample time must be positive");
  const auto n = A.rows();
  Ad = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
  for (int i = 1; i <= order; ++i) {
    term = (term * A) * (ts / i);
    Ad += term;
  }
  //   Bd = sum_{i=0..order-1} A^i B ts^{i+1} / (i+1)!
  Bd = B * ts;
  Eigen::MatrixXd termB = Bd;
  for (int i = 1; i < order; ++i) {
    termB = (A * termB) * (ts / (i + 1));
    Bd += termB;
  }
}

DiscreteStateSpace taylor_discretize(const ContinuousStateSpace& space, double ts, int order) {
  DiscreteStateSpace d;
  taylor_discretize(space.A, space.B, ts, order, d.Ad, d.Bd);
  d.C = space.C;
  d.D = space.D;
  d.ts = ts;
  d.order = order;
  const double rho = d.Ad.eigenvalues().cwiseAbs().maxCoeff();
  if (rho > 1.1)
    std::fprintf(stderr, "warning: discretized transition spectral radius %.3f at Ts=%g, order %d\n",
                 rho, ts, order);
  return d;
}

void exact_discretize(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double ts,
                      Eigen::MatrixXd& Ad, Eigen::MatrixXd& Bd) {
  if (!(ts > 0.0)) throw std::invalid_argument("sample time must be positive");
  const auto n = A.rows();
  const auto m = B.cols();
  // expm of the block matrix [[A, B], [0, 0]] * ts carries both Ad and
  // Bd = integral_0^ts expm(A s) B ds in one shot.
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n + m, n + m);
  G.topLeftCorner(n, n) = A * ts;
  G.topRightCorner(n, m) = B * ts;
  const Eigen::MatrixXd E = G.exp();
  Ad = E.topLeftCorner(n, n);
  Bd = E.topRightCorner(n, m);
}

DiscreteStateSpace exact_discretize(const ContinuousStateSpace& space, double ts) {
  DiscreteStateSpace d;
  exact_discretize(space.A, space.B, ts, d.Ad, d.Bd);
  d.C = space.C;
  d.D = space.D;
  d.ts = ts;
  d.order = DiscreteStateSpace::kExactOrder;
  return d;
}

StepResult step(const DiscreteStateSpace& space, const Eigen::VectorXd& x,
                const Eigen::VectorXd& u) {
  return {space.Ad * x + space.Bd * u, space.C * x + space.D * u};
}

}  // namespace sid
