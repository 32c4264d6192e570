#pragma once

#include <numbers>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "sid/filter_model.hpp"
#include "sid/ukf.hpp"

namespace sid {

// Weighted innovation magnitude e' R^-1 e.
double trigger_gamma(const Eigen::VectorXd& e, const Eigen::MatrixXd& R);

// gamma0 = delta * m * z0^2. delta counts independent noise sources per
// channel (2 for acceleration channels: input + output noise both enter the
// predicted output), m is the channel count.
double threshold_gamma0(double delta, int m, double z0);

struct AdaptationConfig {
  double delta = 2.0;
  double z0 = 3.0 * std::numbers::sqrt2;
  double p_adapt = 1.0;
  double probe_reduction = 0.05;
  int cooldown_steps = 25;
};

// delta implied by a sensor suite; mixed suites are rejected because a single
// scalar would misweight the channels.
double delta_for(const std::vector<Sensor>& sensors);

struct DetectionEvent {
  int step{};
  double time{};
  int param_index{};
  double gamma{};
  Eigen::VectorXd probe_gammas;
};

struct DetectionLog {
  std::vector<DetectionEvent> events;
};

// Re-run one filter step per stiffness parameter from the pre-step corrected
// state, with that parameter's variance opened to p_adapt and its mean nudged
// down by probe_reduction; the parameter whose probe explains the measurement
// best (smallest gamma) is blamed. Ties break to the lowest index. Probes may
// evaluate in parallel.
int localize(const UkfState& prev_corrected, const Eigen::VectorXd& u_k,
             const Eigen::VectorXd& y_k1, const Eigen::VectorXd& u_k1,
             const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
             const StiffnessFilterModel& model, const UtParams& params,
             const AdaptationConfig& cfg, Exec exec, Eigen::VectorXd* gammas_out = nullptr);

// Open the blamed parameter's variance on the post-step corrected state.
// Only the diagonal element is touched: cross terms stay, so the filter keeps
// what it knew about the other parameters.
void adapt_covariance(UkfState& state, int param_index, int param_offset, double p_adapt);

}  // namespace sid
