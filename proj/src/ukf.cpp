#include "sid/ukf.hpp"

#include <cmath>

namespace sid {

UtWeights ut_weights(int n, const UtParams& params) {
  if (n < 1) throw std::invalid_argument("state dimension must be positive");
  const double lambda = params.alpha * params.alpha * (n + params.kappa) - n;
  if (!(n + lambda > 0.0))
    throw std::invalid_argument("n + lambda must be positive; raise alpha or kappa");
  UtWeights w;
  w.lambda = lambda;
  w.wm = Eigen::VectorXd::Constant(2 * n + 1, 1.0 / (2.0 * (n + lambda)));
  w.wc = w.wm;
  w.wm(0) = lambda / (n + lambda);
  w.wc(0) = w.wm(0) + 1.0 - params.alpha * params.alpha + params.beta;
  return w;
}

Eigen::MatrixXd sigma_points(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                             double lambda) {
  const int n = static_cast<int>(mean.size());
  if (!mean.allFinite() || !cov.allFinite())
    throw FilterDivergence("non-finite mean or covariance in sigma point generation");
  const double scale = n + lambda;

  if (cov.isZero(0.0)) {
    // Zero spread: every point collapses onto the mean.
    return mean.replicate(1, 2 * n + 1);
  }

  Eigen::LLT<Eigen::MatrixXd> llt(scale * cov);
  if (llt.info() != Eigen::Success) {
    // Escalating jitter relative to the covariance scale; genuine divergence
    // (strongly indefinite P) still fails after the last rung.
    const double base = cov.trace() / n;
    double eps = 1e-12 * base;
    const double cap = 1e-6 * base;
    while (true) {
      llt.compute(scale * (cov + eps * Eigen::MatrixXd::Identity(n, n)));
      if (llt.info() == Eigen::Success) break;
      if (eps >= cap)
        throw FilterDivergence("covariance factorization failed after jitter escalation");
      eps *= 10.0;
    }
  }
  const Eigen::MatrixXd L = llt.matrixL();

  Eigen::MatrixXd pts(n, 2 * n + 1);
  pts.col(0) = mean;
  for (int i = 0; i < n; ++i) {
    pts.col(1 + i) = mean + L.col(i);
    pts.col(1 + n + i) = mean - L.col(i);
  }
  return pts;
}

Predicted ukf_predict(const UkfState& state, const Eigen::VectorXd& u,
                      const Eigen::MatrixXd& Q, const ProcessModel& model,
                      const UtParams& params, Exec exec) {
  const int n = model.state_dim();
  const UtWeights w = ut_weights(n, params);
  const Eigen::MatrixXd pts = sigma_points(state.x, state.P, w.lambda);
  const int np = 2 * n + 1;

  // Propagation parallelizes over points (distinct columns); the moment
  // reconstructions below stay serial and fixed-order so Serial and Parallel
  // execution give bitwise-identical results.
  Eigen::MatrixXd prop(n, np);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
#endif
  for (int j = 0; j < np; ++j) prop.col(j) = model.f(pts.col(j), u);

  if (!prop.allFinite())
    throw FilterDivergence("non-finite propagated sigma points");

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
  for (int j = 0; j < np; ++j) mean += w.wm(j) * prop.col(j);
  Eigen::MatrixXd cov = Q;
  for (int j = 0; j < np; ++j) {
    const Eigen::VectorXd d = prop.col(j) - mean;
    cov += w.wc(j) * (d * d.transpose());
  }
  cov = (0.5 * (cov + cov.transpose())).eval();  // eval: aliased transpose
  return {{std::move(mean), std::move(cov)}, std::move(prop), w};
}

std::pair<UkfState, Innovation> ukf_correct(const Predicted& predicted,
                                            const Eigen::VectorXd& y,
                                            const Eigen::VectorXd& u_next,
                                            const Eigen::MatrixXd& R,
                                            const ProcessModel& model, Exec exec) {
  const int n = model.state_dim();
  const int m = model.output_dim();
  const int np = static_cast<int>(predicted.points.cols());
  const auto& w = predicted.weights;

  Eigen::MatrixXd obs(m, np);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
#endif
  for (int j = 0; j < np; ++j) obs.col(j) = model.h(predicted.points.col(j), u_next);

  if (!obs.allFinite()) throw FilterDivergence("non-finite observed sigma points");

  Eigen::VectorXd y_hat = Eigen::VectorXd::Zero(m);
  for (int j = 0; j < np; ++j) y_hat += w.wm(j) * obs.col(j);

  Eigen::MatrixXd pyy = R;
  Eigen::MatrixXd pxy = Eigen::MatrixXd::Zero(n, m);
  for (int j = 0; j < np; ++j) {
    const Eigen::VectorXd dy = obs.col(j) - y_hat;
    pyy += w.wc(j) * (dy * dy.transpose());
    pxy += w.wc(j) * ((predicted.points.col(j) - predicted.state.x) * dy.transpose());
  }
  pyy = (0.5 * (pyy + pyy.transpose())).eval();

  Eigen::LLT<Eigen::MatrixXd> llt(pyy);
  if (llt.info() != Eigen::Success)
    throw FilterDivergence("innovation covariance not positive definite");
  const Eigen::MatrixXd gain = llt.solve(pxy.transpose()).transpose();

  Innovation innov;
  innov.e = y - y_hat;
  innov.y_hat = std::move(y_hat);
  innov.pyy = pyy;
  innov.pxy = std::move(pxy);
  innov.gain = gain;

  UkfState corrected;
  corrected.x = predicted.state.x + gain * innov.e;
  corrected.P = predicted.state.P - gain * pyy * gain.transpose();
  corrected.P = (0.5 * (corrected.P + corrected.P.transpose())).eval();
  return {std::move(corrected), std::move(innov)};
}

std::pair<UkfState, Innovation> ukf_step(const UkfState& state, const Eigen::VectorXd& u_k,
                                         const Eigen::VectorXd& y_k1,
                                         const Eigen::VectorXd& u_k1, const Eigen::MatrixXd& Q,
                                         const Eigen::MatrixXd& R, const ProcessModel& model,
                                         const UtParams& params, Exec exec) {
  const Predicted pred = ukf_predict(state, u_k, Q, model, params, exec);
  return ukf_correct(pred, y_k1, u_k1, R, model, exec);
}

}  // namespace sid
