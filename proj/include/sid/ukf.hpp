#pragma once

#include <stdexcept>

#include <Eigen/Dense>

#include "sid/parallel.hpp"

namespace sid {

struct UtParams {
  double alpha = 1e-3;
  double beta = 2.0;
  double kappa = 0.0;
};

struct UtWeights {
  Eigen::VectorXd wm, wc;  // size 2n+1
  double lambda{};
};

class FilterDivergence : public std::runtime_error {
 public:
  explicit FilterDivergence(const std::string& what, int step = -1)
      : std::runtime_error(what), step(step) {}
  int step;
};

// lambda = alpha^2 (n + kappa) - n; throws if n + lambda <= 0.
UtWeights ut_weights(int n, const UtParams& params);

// Columns: [mean, mean + S_i, mean - S_i] with S = chol((n+lambda) P).
// On factorization failure, diagonal jitter 1e-12·tr(P)/n is added and
// escalated x10 up to 1e-6·tr(P)/n before giving up with FilterDivergence.
Eigen::MatrixXd sigma_points(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                             double lambda);

// State-transition + observation pair evaluated per sigma point. f's parameter
// entries must pass through unchanged (constant-parameter dynamics); both maps
// must be safe to call concurrently.
struct ProcessModel {
  virtual ~ProcessModel() = default;
  virtual Eigen::VectorXd f(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const = 0;
  virtual Eigen::VectorXd h(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const = 0;
  virtual int state_dim() const = 0;
  virtual int output_dim() const = 0;
};

struct UkfState {
  Eigen::VectorXd x;
  Eigen::MatrixXd P;
};

struct Innovation {
  Eigen::VectorXd e, y_hat;
  Eigen::MatrixXd pyy, pxy, gain;
};

struct Predicted {
  UkfState state;
  Eigen::MatrixXd points;  // propagated sigma points, state_dim x (2n+1)
  UtWeights weights;
};

// Prediction half-step: propagate sigma points through f with input u, then
// reconstruct mean/cov and add Q. Point propagation may run in parallel;
// reductions are fixed-order so Serial and Parallel agree bitwise.
Predicted ukf_predict(const UkfState& state, const Eigen::VectorXd& u,
                      const Eigen::MatrixXd& Q, const ProcessModel& model,
                      const UtParams& params, Exec exec = Exec::Serial);

// Correction half-step: map the propagated points through h with input u_next
// (one sample ahead of the prediction input), then the standard gain update.
std::pair<UkfState, Innovation> ukf_correct(const Predicted& predicted,
                                            const Eigen::VectorXd& y,
                                            const Eigen::VectorXd& u_next,
                                            const Eigen::MatrixXd& R,
                                            const ProcessModel& model,
                                            Exec exec = Exec::Serial);

std::pair<UkfState, Innovation> ukf_step(const UkfState& state, const Eigen::VectorXd& u_k,
                                         const Eigen::VectorXd& y_k1,
                                         const Eigen::VectorXd& u_k1,
                                         const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                                         const ProcessModel& model, const UtParams& params,
                                         Exec exec = Exec::Serial);

}  // namespace sid
