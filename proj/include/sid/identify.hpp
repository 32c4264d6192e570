#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "sid/adaptive.hpp"
#include "sid/filter_model.hpp"
#include "sid/signals.hpp"
#include "sid/simulate.hpp"
#include "sid/ukf.hpp"

namespace sid {

struct FilterConfig {
  UtParams ut;
  double p0 = 1e-6;   // initial covariance, diagonal
  double q = 1e-9;    // process noise, diagonal
  double r = 1e-4;    // measurement noise, diagonal
  std::optional<Eigen::MatrixXd> P0_full, Q_full, R_full;
  int taylor_order = 3;
  Eigen::VectorXd initial_stiffness;  // empty = true stiffness from the spec

  Eigen::MatrixXd P0(int n) const;
  Eigen::MatrixXd Q(int n) const;
  Eigen::MatrixXd R(int m) const;
};

struct IdentificationResult {
  Eigen::MatrixXd stiffness_history;  // N x n_param, corrected estimates
  Eigen::MatrixXd state_history;      // N x 2*n_dof
  Eigen::VectorXd gammas;             // N
  Eigen::MatrixXd innovations;        // N x m
  DetectionLog log;
  UkfState final_state;
  bool diverged = false;
  int diverged_step = -1;
  double ts{};
};

// Run the joint state/stiffness filter over a measured record. `input` is the
// ground acceleration (single channel), `measurements` the sensor outputs.
// With `adapt` set, each step's gamma is tested against gamma0; exceedances
// outside the cooldown window trigger localization and covariance adaptation.
IdentificationResult run_identification(const StructureSpec& spec,
                                        const std::vector<Sensor>& sensors,
                                        const SignalSeries& input,
                                        const SignalSeries& measurements,
                                        const FilterConfig& cfg,
                                        const std::optional<AdaptationConfig>& adapt,
                                        double gamma0 = 0.0, Exec exec = Exec::Serial);

struct EventOutcome {
  int param_index{};
  double true_time{};
  std::optional<double> detected_time;
  double latency() const { return detected_time ? *detected_time - true_time : -1.0; }
};

struct Metrics {
  Eigen::VectorXd dk_percent;  // |k_hat - k_true| / k_true * 100, final estimates
  std::vector<EventOutcome> events;
  int false_positives = 0;
  double innovation_rms = 0.0;
};

// Match detections to realized damage events within match_window seconds;
// anything unmatched counts as a false positive.
Metrics compute_metrics(const IdentificationResult& result,
                        const Eigen::VectorXd& true_final_stiffness,
                        const std::vector<RealizedEvent>& realized,
                        double match_window = 0.5);

}  // namespace sid
