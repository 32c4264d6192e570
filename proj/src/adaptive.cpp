#include "sid/adaptive.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sid {

double trigger_gamma(const Eigen::VectorXd& e, const Eigen::MatrixXd& R) {
  return e.dot(R.llt().solve(e));
}

double threshold_gamma0(double delta, int m, double z0) {
  if (!(delta > 0.0) || m < 1 || !(z0 > 0.0))
    throw std::invalid_argument("threshold needs positive delta, m, z0");
  return delta * m * z0 * z0;
}

double delta_for(const std::vector<Sensor>& sensors) {
  if (sensors.empty()) throw std::invalid_argument("sensor suite is empty");
  bool acc = false, other = false;
  for (const auto& s : sensors)
    (s.type == SensorType::Acceleration ? acc : other) = true;
  if (acc && other)
    throw std::invalid_argument(
        "mixed sensor suites have no single delta; split the threshold per type");
  // Acceleration channels see the excitation noise twice: through the
  // measured output and through the feedthrough of the measured input.
  return acc ? 2.0 : 1.0;
}

int localize(const UkfState& prev_corrected, const Eigen::VectorXd& u_k,
             const Eigen::VectorXd& y_k1, const Eigen::VectorXd& u_k1,
             const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
             const StiffnessFilterModel& model, const UtParams& params,
             const AdaptationConfig& cfg, Exec exec, Eigen::VectorXd* gammas_out) {
  const int np = model.n_param();
  const int off = model.param_offset();
  Eigen::VectorXd gammas =
      Eigen::VectorXd::Constant(np, std::numeric_limits<double>::infinity());

  // One hypothesis per parameter: re-run the same step from the pre-step
  // state, with parameter i freed (variance opened, mean nudged down). The
  // hypothesis that bends the prediction toward the measurement wins.
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
#endif
  for (int i = 0; i < np; ++i) {
    UkfState probe = prev_corrected;
    probe.P(off + i, off + i) = cfg.p_adapt;
    probe.x(off + i) *= (1.0 - cfg.probe_reduction);
    try {
      auto [state, innov] = ukf_step(probe, u_k, y_k1, u_k1, Q, R, model, params, Exec::Serial);
      gammas(i) = trigger_gamma(innov.e, R);
    } catch (const FilterDivergence&) {
      // leave +inf; this hypothesis cannot win
    }
  }

  int best = 0;
  for (int i = 1; i < np; ++i)
    if (gammas(i) < gammas(best)) best = i;
  if (!std::isfinite(gammas(best)))
    throw FilterDivergence("all localization probes diverged");
  if (gammas_out) *gammas_out = gammas;
  return best;
}

void adapt_covariance(UkfState& state, int param_index, int param_offset, double p_adapt) {
  const int idx = param_offset + param_index;
  if (idx < 0 || idx >= state.P.rows()) throw std::invalid_argument("parameter index out of range");
  state.P(idx, idx) = p_adapt;
}

}  // namespace sid
