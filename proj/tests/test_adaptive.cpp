#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sid/adaptive.hpp"
#include "sid/simulate.hpp"

using namespace sid;

namespace {

StructureSpec tmd_spec() {
  StructureSpec s;
  s.masses = {1.0, 1.0};
  s.stiffnesses = {12.0, 10.0};
  s.dampings = {0.1, 0.1};
  s.tmd = TmdSpec{0.1, 0.36, 0.051};
  return s;
}

struct DamagedRecord {
  SignalSeries input;  // measured (noisy) ground acceleration
  SignalSeries meas;   // noisy sensor outputs
};

DamagedRecord make_damaged(int param, double k_new) {
  const auto spec = tmd_spec();
  const std::vector<Sensor> sensors = {{0, SensorType::Acceleration},
                                       {1, SensorType::Acceleration}};
  const auto ag = white_noise(8.0, 0.02, 1.0, 2);
  DamageSchedule plan;
  plan.events.push_back({param, k_new, FixedTimeTrigger{5.0}});
  const auto truth = simulate_truth(spec, plan, ag, 20, sensors);
  return {add_noise(ag, 0.01, 1002), add_noise(truth.outputs, 0.01, 2002)};
}

}  // namespace

TEST_CASE("trigger gamma, hand case and scale invariance") {
  Eigen::VectorXd e(2);
  e << 1.0, 2.0;
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(2, 2);
  r(0, 0) = 0.5;
  r(1, 1) = 0.25;
  CHECK(trigger_gamma(e, r) == doctest::Approx(18.0).epsilon(1e-12));

  GaussianSampler g(8);
  Eigen::VectorXd e2(3);
  for (int i = 0; i < 3; ++i) e2(i) = g.next();
  Eigen::MatrixXd a(3, 3);
  for (int i = 0; i < 9; ++i) a(i / 3, i % 3) = g.next();
  const Eigen::MatrixXd r2 = a * a.transpose() + 0.5 * Eigen::MatrixXd::Identity(3, 3);
  const double c = 3.7;
  CHECK(trigger_gamma(c * e2, c * c * r2) ==
        doctest::Approx(trigger_gamma(e2, r2)).epsilon(1e-12));
}

TEST_CASE("threshold values for the standard confidence levels") {
  CHECK(threshold_gamma0(2.0, 2, 3.0 * std::numbers::sqrt2) ==
        doctest::Approx(72.0).epsilon(1e-12));
  CHECK(threshold_gamma0(2.0, 2, 2.576) == doctest::Approx(26.543104));
  CHECK(threshold_gamma0(2.0, 2, 1.645) == doctest::Approx(10.8241));
  CHECK(threshold_gamma0(1.0, 3, 2.0) == 12.0);
  CHECK_THROWS_AS(threshold_gamma0(0.0, 2, 3.0), std::invalid_argument);
  CHECK_THROWS_AS(threshold_gamma0(2.0, 0, 3.0), std::invalid_argument);
  CHECK_THROWS_AS(threshold_gamma0(2.0, 2, 0.0), std::invalid_argument);
}

TEST_CASE("delta per sensor suite") {
  CHECK(delta_for({{0, SensorType::Acceleration}, {1, SensorType::Acceleration}}) == 2.0);
  CHECK(delta_for({{0, SensorType::Displacement}}) == 1.0);
  CHECK(delta_for({{0, SensorType::Velocity}, {1, SensorType::Displacement}}) == 1.0);
  CHECK_THROWS_AS(delta_for({{0, SensorType::Acceleration}, {1, SensorType::Velocity}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(delta_for({}), std::invalid_argument);
}

TEST_CASE("null innovations stay far below the default threshold") {
  // Acceleration channels carry two unit noise sources, so under no damage
  // gamma behaves like 2 chi^2_m: mean 2m, and a 3 sigma-per-channel threshold
  // of delta*m*z0^2 = 72 is effectively never crossed.
  GaussianSampler g(404);
  const int m = 2;
  const double sigma = 0.01;
  const Eigen::MatrixXd r = sigma * sigma * Eigen::MatrixXd::Identity(m, m);
  const double gamma0 = threshold_gamma0(2.0, m, 3.0 * std::numbers::sqrt2);
  double sum = 0.0, worst = 0.0;
  const int n = 10000;
  Eigen::VectorXd e(m);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < m; ++c) e(c) = sigma * std::numbers::sqrt2 * g.next();
    const double gamma = trigger_gamma(e, r);
    sum += gamma;
    worst = std::max(worst, gamma);
  }
  CHECK(sum / n == doctest::Approx(2.0 * m).epsilon(0.05));
  CHECK(worst < gamma0);
}

TEST_CASE("adapt_covariance opens exactly one diagonal entry") {
  GaussianSampler g(6);
  Eigen::MatrixXd a(8, 8);
  for (int i = 0; i < 64; ++i) a(i / 8, i % 8) = g.next();
  UkfState state;
  state.P = a * a.transpose();
  state.x = Eigen::VectorXd::Ones(8);
  const UkfState before = state;

  adapt_covariance(state, 1, 6, 2.5);
  CHECK(state.P(7, 7) == 2.5);
  CHECK((state.x - before.x).norm() == 0.0);
  int changed = 0;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      if (state.P(i, j) != before.P(i, j)) ++changed;
  CHECK(changed == 1);

  CHECK_THROWS_AS(adapt_covariance(state, 2, 6, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(adapt_covariance(state, -7, 6, 1.0), std::invalid_argument);
}

TEST_CASE("localization blames the story that actually broke") {
  const auto spec = tmd_spec();
  const std::vector<Sensor> sensors = {{0, SensorType::Acceleration},
                                       {1, SensorType::Acceleration}};
  const StiffnessFilterModel model(spec, sensors, 0.02, 3);
  const Eigen::MatrixXd q = 1e-9 * Eigen::MatrixXd::Identity(8, 8);
  const Eigen::MatrixXd r = 1e-4 * Eigen::MatrixXd::Identity(2, 2);
  const AdaptationConfig cfg;
  const double gamma0 = threshold_gamma0(cfg.delta, 2, cfg.z0);

  for (int damaged_param : {0, 1}) {
    const auto rec = make_damaged(damaged_param, damaged_param == 0 ? 10.8 : 9.0);

    UkfState state;
    state.x = Eigen::VectorXd::Zero(8);
    state.x(6) = 12.0;
    state.x(7) = 10.0;
    state.P = 1e-6 * Eigen::MatrixXd::Identity(8, 8);

    bool triggered = false;
    for (int k = 0; k + 1 < rec.meas.samples(); ++k) {
      const UkfState prev = state;
      const Eigen::VectorXd u_k = model.input_vector(rec.input.values(k, 0));
      const Eigen::VectorXd u_k1 = model.input_vector(rec.input.values(k + 1, 0));
      const Eigen::VectorXd y_k1 = rec.meas.values.row(k + 1).transpose();
      auto [next, innov] = ukf_step(state, u_k, y_k1, u_k1, q, r, model, {});
      const double gamma = trigger_gamma(innov.e, r);
      if (gamma > gamma0) {
        Eigen::VectorXd probe_gammas;
        const int blamed =
            localize(prev, u_k, y_k1, u_k1, q, r, model, {}, cfg, Exec::Serial, &probe_gammas);
        CHECK(blamed == damaged_param);
        REQUIRE(probe_gammas.size() == 2);
        CHECK(std::isfinite(probe_gammas(0)));
        CHECK(std::isfinite(probe_gammas(1)));
        CHECK(probe_gammas(blamed) < probe_gammas(1 - blamed));
        CHECK(probe_gammas(blamed) <= gamma);  // freeing the right knob helps
        const double t = (k + 1) * 0.02;
        CHECK(t > 5.0);
        CHECK(t < 5.5);
        triggered = true;
        break;
      }
      state = next;
    }
    CHECK(triggered);
  }
}

TEST_CASE("localization reports divergence when every probe fails") {
  const auto spec = tmd_spec();
  const std::vector<Sensor> sensors = {{0, SensorType::Acceleration}};
  const StiffnessFilterModel model(spec, sensors, 0.02, 3);
  UkfState broken;
  broken.x = Eigen::VectorXd::Constant(8, std::nan(""));
  broken.P = Eigen::MatrixXd::Identity(8, 8);
  const Eigen::MatrixXd q = 1e-9 * Eigen::MatrixXd::Identity(8, 8);
  const Eigen::MatrixXd r = 1e-4 * Eigen::MatrixXd::Identity(1, 1);
  const Eigen::VectorXd u = model.input_vector(0.0);
  CHECK_THROWS_AS(
      localize(broken, u, Eigen::VectorXd::Zero(1), u, q, r, model, {}, {}, Exec::Serial),
      FilterDivergence);
}
