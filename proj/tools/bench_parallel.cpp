// Compares the serial reference path against the OpenMP path: results must be
// bit-identical, timings are informational.
#include <chrono>
#include <cstdio>

#include "sid/identify.hpp"
#include "sid/parallel.hpp"
#include "sid/structure.hpp"
#include "sid/sweep.hpp"

using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

sid::StructureSpec two_story_tmd() {
  sid::StructureSpec s;
  s.masses = {1.0, 1.0};
  s.stiffnesses = {12.0, 10.0};
  s.dampings = {0.1, 0.1};
  s.tmd = sid::TmdSpec{0.1, 0.36, 0.051};
  return s;
}

bool identical(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (int j = 0; j < a.cols(); ++j)
    for (int i = 0; i < a.rows(); ++i)
      if (a(i, j) != b(i, j)) return false;
  return true;
}

}  // namespace

int main() {
  const auto spec = two_story_tmd();
  const std::vector<sid::Sensor> sensors = {{0, sid::SensorType::Acceleration},
                                            {1, sid::SensorType::Acceleration}};
  const auto ground = sid::white_noise(30.0, 0.02, 1.0, 42);
  const auto scenario = sid::make_sweep_scenario(spec, sensors, ground, 0.01, 42);

  sid::FilterConfig cfg;
  cfg.taylor_order = 3;
  std::printf("threads available: %d\n\n", sid::max_threads());

  {
    auto t0 = Clock::now();
    const auto serial = sid::run_identification(scenario.spec, sensors, scenario.input,
                                                scenario.measurements, cfg, std::nullopt, 0.0,
                                                sid::Exec::Serial);
    const double ts = seconds_since(t0);
    t0 = Clock::now();
    const auto parallel = sid::run_identification(scenario.spec, sensors, scenario.input,
                                                  scenario.measurements, cfg, std::nullopt, 0.0,
                                                  sid::Exec::Parallel);
    const double tp = seconds_since(t0);
    const bool same = identical(serial.stiffness_history, parallel.stiffness_history) &&
                      identical(serial.state_history, parallel.state_history) &&
                      identical(serial.gammas, parallel.gammas);
    std::printf("identification (%d steps): serial %.3fs, parallel %.3fs, speedup %.2fx, %s\n",
                scenario.input.samples(), ts, tp, ts / tp,
                same ? "bit-identical" : "MISMATCH");
    if (!same) return 1;
  }

  {
    const std::vector<int> orders = {1, 2, 3};
    const std::vector<double> qs = {1e-12, 1e-10, 1e-8};
    auto t0 = Clock::now();
    const auto serial = sid::sweep_model(scenario, orders, qs, cfg, sid::Exec::Serial);
    const double ts = seconds_since(t0);
    t0 = Clock::now();
    const auto parallel = sid::sweep_model(scenario, orders, qs, cfg, sid::Exec::Parallel);
    const double tp = seconds_since(t0);
    const bool same = identical(serial.dk1_percent, parallel.dk1_percent);
    std::printf("model sweep (%zux%zu cells):     serial %.3fs, parallel %.3fs, speedup %.2fx, %s\n",
                orders.size(), qs.size(), ts, tp, ts / tp, same ? "bit-identical" : "MISMATCH");
    if (!same) return 1;
  }
  return 0;
}
