#include "sid/sweep.hpp"

#include <stdexcept>

namespace sid {

SweepScenario make_sweep_scenario(const StructureSpec& spec, const std::vector<Sensor>& sensors,
                                  const SignalSeries& ground_acc, double noise_rms,
                                  std::uint64_t seed, int oversample) {
  SweepScenario sc;
  sc.spec = spec;
  sc.sensors = sensors;
  const TruthBundle truth = simulate_truth(spec, {}, ground_acc, oversample, sensors);
  sc.input = add_noise(ground_acc, noise_rms, seed + 1000);
  sc.measurements = add_noise(truth.outputs, noise_rms, seed + 2000);
  sc.true_stiffness.resize(spec.stories());
  for (int i = 0; i < spec.stories(); ++i) sc.true_stiffness(i) = spec.stiffnesses[i];
  return sc;
}

CovarianceSweepResult sweep_covariance(const std::vector<SweepScenario>& variants,
                                       const std::vector<std::string>& labels,
                                       const std::vector<double>& p0_values,
                                       const FilterConfig& base, Exec exec) {
  if (variants.size() != labels.size())
    throw std::invalid_argument("one label per variant required");
  if (variants.empty() || p0_values.empty())
    throw std::invalid_argument("sweep grid is empty");
  const int nv = static_cast<int>(variants.size());
  const int ng = static_cast<int>(p0_values.size());

  CovarianceSweepResult out;
  out.p0_values = p0_values;
  out.variants = labels;
  out.dk1_percent.resize(nv, ng);
  out.k1_final.resize(nv, ng);

#ifdef _OPENMP
#pragma omp parallel for collapse(2) schedule(dynamic) if (exec == Exec::Parallel)
#endif
  for (int v = 0; v < nv; ++v) {
    for (int j = 0; j < ng; ++j) {
      const auto& sc = variants[v];
      FilterConfig cfg = base;
      cfg.p0 = p0_values[j];
      cfg.P0_full.reset();
      const auto res = run_identification(sc.spec, sc.sensors, sc.input, sc.measurements, cfg,
                                          std::nullopt, 0.0, Exec::Serial);
      const double k1 = res.stiffness_history(res.stiffness_history.rows() - 1, 0);
      out.k1_final(v, j) = k1;
      out.dk1_percent(v, j) =
          std::abs(k1 - sc.true_stiffness(0)) / sc.true_stiffness(0) * 100.0;
    }
  }
  return out;
}

ModelSweepResult sweep_model(const SweepScenario& scenario, const std::vector<int>& orders,
                             const std::vector<double>& q_values, const FilterConfig& base,
                             Exec exec) {
  if (orders.empty() || q_values.empty()) throw std::invalid_argument("sweep grid is empty");
  const int no = static_cast<int>(orders.size());
  const int nq = static_cast<int>(q_values.size());

  ModelSweepResult out;
  out.orders = orders;
  out.q_values = q_values;
  out.dk1_percent.resize(no, nq);

#ifdef _OPENMP
#pragma omp parallel for collapse(2) schedule(dynamic) if (exec == Exec::Parallel)
#endif
  for (int i = 0; i < no; ++i) {
    for (int j = 0; j < nq; ++j) {
      FilterConfig cfg = base;
      cfg.taylor_order = orders[i];
      cfg.q = q_values[j];
      cfg.Q_full.reset();
      const auto res = run_identification(scenario.spec, scenario.sensors, scenario.input,
                                          scenario.measurements, cfg, std::nullopt, 0.0,
                                          Exec::Serial);
      const double k1 = res.stiffness_history(res.stiffness_history.rows() - 1, 0);
      out.dk1_percent(i, j) =
          std::abs(k1 - scenario.true_stiffness(0)) / scenario.true_stiffness(0) * 100.0;
    }
  }
  return out;
}

}  // namespace sid
