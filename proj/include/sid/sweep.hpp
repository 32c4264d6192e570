#pragma once

#include <vector>

#include <Eigen/Dense>

#include "sid/identify.hpp"

namespace sid {

// Scenario shared by every cell of a sweep: one excitation / noise
// realization per variant, so cells differ only in the swept knob.
struct SweepScenario {
  StructureSpec spec;
  std::vector<Sensor> sensors;
  SignalSeries input;         // measured (noisy) ground acceleration
  SignalSeries measurements;  // measured (noisy) outputs
  Eigen::VectorXd true_stiffness;
};

SweepScenario make_sweep_scenario(const StructureSpec& spec, const std::vector<Sensor>& sensors,
                                  const SignalSeries& ground_acc, double noise_rms,
                                  std::uint64_t seed, int oversample = 20);

struct CovarianceSweepResult {
  std::vector<double> p0_values;
  std::vector<std::string> variants;       // row labels, e.g. "bare", "tmd"
  Eigen::MatrixXd dk1_percent;             // variants x p0 grid
  Eigen::MatrixXd k1_final;
};

// Final first-story stiffness error as a function of the initial parameter
// covariance, for each structural variant. Cells run independently and may be
// distributed across threads.
CovarianceSweepResult sweep_covariance(const std::vector<SweepScenario>& variants,
                                       const std::vector<std::string>& labels,
                                       const std::vector<double>& p0_values,
                                       const FilterConfig& base, Exec exec = Exec::Serial);

struct ModelSweepResult {
  std::vector<int> orders;
  std::vector<double> q_values;
  Eigen::MatrixXd dk1_percent;  // orders x q grid
};

// Final first-story stiffness error across discretization order and process
// noise, on one shared scenario.
ModelSweepResult sweep_model(const SweepScenario& scenario, const std::vector<int>& orders,
                             const std::vector<double>& q_values, const FilterConfig& base,
                             Exec exec = Exec::Serial);

}  // namespace sid
