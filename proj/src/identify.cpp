#include "sid/identify.hpp"

#include <cmath>
#include <stdexcept>

namespace sid {

namespace {

Eigen::MatrixXd diag_or_full(const std::optional<Eigen::MatrixXd>& full, double scalar, int n,
                             const char* what) {
  if (full) {
    if (full->rows() != n || full->cols() != n)
      throw std::invalid_argument(std::string(what) + " matrix has wrong dimensions");
    return *full;
  }
  return scalar * Eigen::MatrixXd::Identity(n, n);
}

}  // namespace

Eigen::MatrixXd FilterConfig::P0(int n) const { return diag_or_full(P0_full, p0, n, "P0"); }
Eigen::MatrixXd FilterConfig::Q(int n) const { return diag_or_full(Q_full, q, n, "Q"); }
Eigen::MatrixXd FilterConfig::R(int m) const { return diag_or_full(R_full, r, m, "R"); }

IdentificationResult run_identification(const StructureSpec& spec,
                                        const std::vector<Sensor>& sensors,
                                        const SignalSeries& input,
                                        const SignalSeries& measurements,
                                        const FilterConfig& cfg,
                                        const std::optional<AdaptationConfig>& adapt,
                                        double gamma0, Exec exec) {
  if (input.channels() != 1)
    throw std::invalid_argument("input must be a single ground-acceleration channel");
  if (std::abs(input.ts - measurements.ts) > 1e-12)
    throw std::invalid_argument("input and measurement sampling rates differ");
  const StiffnessFilterModel model(spec, sensors, input.ts, cfg.taylor_order);
  const int n = model.state_dim();
  const int m = model.output_dim();
  const int nd = model.n_dof();
  const int np = model.n_param();
  const int off = model.param_offset();
  if (measurements.channels() != m)
    throw std::invalid_argument("measurement channel count does not match the sensor suite");
  const int N = std::min(input.samples(), measurements.samples());
  if (N < 2) throw std::invalid_argument("need at least two samples");

  Eigen::VectorXd theta0(np);
  if (cfg.initial_stiffness.size() == 0) {
    for (int i = 0; i < np; ++i) theta0(i) = spec.stiffnesses[i];
  } else if (cfg.initial_stiffness.size() == np) {
    theta0 = cfg.initial_stiffness;
  } else {
    throw std::invalid_argument("initial_stiffness length must match the story count");
  }

  UkfState state;
  state.x = Eigen::VectorXd::Zero(n);
  state.x.tail(np) = theta0;
  state.P = cfg.P0(n);
  const Eigen::MatrixXd Q = cfg.Q(n);
  const Eigen::MatrixXd R = cfg.R(m);

  double g0 = gamma0;
  if (adapt && g0 <= 0.0) g0 = threshold_gamma0(adapt->delta, m, adapt->z0);

  IdentificationResult out;
  out.ts = input.ts;
  out.stiffness_history = Eigen::MatrixXd::Zero(N, np);
  out.state_history = Eigen::MatrixXd::Zero(N, 2 * nd);
  out.gammas = Eigen::VectorXd::Zero(N);
  out.innovations = Eigen::MatrixXd::Zero(N, m);
  out.stiffness_history.row(0) = theta0.transpose();

  int last_adapt = adapt ? -(adapt->cooldown_steps + 1) : 0;
  for (int k = 0; k + 1 < N; ++k) {
    const Eigen::VectorXd u_k = model.input_vector(input.values(k, 0));
    const Eigen::VectorXd u_k1 = model.input_vector(input.values(k + 1, 0));
    const Eigen::VectorXd y_k1 = measurements.values.row(k + 1).transpose();

    UkfState corrected;
    Innovation innov;
    try {
      std::tie(corrected, innov) = ukf_step(state, u_k, y_k1, u_k1, Q, R, model, cfg.ut, exec);
    } catch (const FilterDivergence&) {
      out.diverged = true;
      out.diverged_step = k + 1;
      break;
    }
    const double gamma = trigger_gamma(innov.e, R);
    if (!std::isfinite(gamma)) {
      out.diverged = true;
      out.diverged_step = k + 1;
      break;
    }

    if (adapt && gamma > g0 && (k + 1) - last_adapt > adapt->cooldown_steps) {
      DetectionEvent ev;
      ev.step = k + 1;
      ev.time = (k + 1) * input.ts;
      ev.gamma = gamma;
      ev.param_index = localize(state, u_k, y_k1, u_k1, Q, R, model, cfg.ut, *adapt, exec,
                                &ev.probe_gammas);
      adapt_covariance(corrected, ev.param_index, off, adapt->p_adapt);
      out.log.events.push_back(std::move(ev));
      last_adapt = k + 1;
    }

    state = std::move(corrected);
    out.stiffness_history.row(k + 1) = state.x.tail(np).transpose();
    out.state_history.row(k + 1) = state.x.head(2 * nd).transpose();
    out.gammas(k + 1) = gamma;
    out.innovations.row(k + 1) = innov.e.transpose();
  }

  if (out.diverged) {
    // Freeze the histories at the last good estimate so downstream metrics
    // stay meaningful.
    for (int k = out.diverged_step; k < N; ++k) {
      out.stiffness_history.row(k) = out.stiffness_history.row(out.diverged_step - 1);
      out.state_history.row(k) = out.state_history.row(out.diverged_step - 1);
    }
  }
  out.final_state = state;
  return out;
}

Metrics compute_metrics(const IdentificationResult& result,
                        const Eigen::VectorXd& true_final_stiffness,
                        const std::vector<RealizedEvent>& realized, double match_window) {
  const int np = static_cast<int>(result.stiffness_history.cols());
  if (true_final_stiffness.size() != np)
    throw std::invalid_argument("true stiffness length mismatch");
  Metrics m;
  m.dk_percent.resize(np);
  const Eigen::RowVectorXd k_final = result.stiffness_history.bottomRows(1);
  for (int i = 0; i < np; ++i)
    m.dk_percent(i) =
        std::abs(k_final(i) - true_final_stiffness(i)) / true_final_stiffness(i) * 100.0;

  std::vector<bool> used(result.log.events.size(), false);
  for (const auto& ev : realized) {
    EventOutcome outc;
    outc.param_index = ev.param_index;
    outc.true_time = ev.time;
    for (size_t j = 0; j < result.log.events.size(); ++j) {
      const auto& det = result.log.events[j];
      if (used[j] || det.param_index != ev.param_index) continue;
      if (det.time >= ev.time - 1e-9 && det.time <= ev.time + match_window) {
        outc.detected_time = det.time;
        used[j] = true;
        break;
      }
    }
    m.events.push_back(outc);
  }
  for (size_t j = 0; j < used.size(); ++j)
    if (!used[j]) ++m.false_positives;

  m.innovation_rms = std::sqrt(result.innovations.squaredNorm() /
                               (result.innovations.rows() * result.innovations.cols()));
  return m;
}

}  // namespace sid
