#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sid/signals.hpp"
#include "sid/ukf.hpp"

using namespace sid;

namespace {

struct LinearModel final : ProcessModel {
  Eigen::MatrixXd A, B, H, D;
  Eigen::VectorXd f(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const override {
    return A * x + B * u;
  }
  Eigen::VectorXd h(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const override {
    return H * x + D * u;
  }
  int state_dim() const override { return static_cast<int>(A.rows()); }
  int output_dim() const override { return static_cast<int>(H.rows()); }
};

Eigen::MatrixXd random_matrix(int r, int c, GaussianSampler& g) {
  Eigen::MatrixXd m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = g.next();
  return m;
}

Eigen::MatrixXd random_spd(int n, GaussianSampler& g) {
  const Eigen::MatrixXd a = random_matrix(n, n, g);
  return a * a.transpose() + 0.1 * Eigen::MatrixXd::Identity(n, n);
}

}  // namespace

TEST_CASE("unscented weights, hand case n=1 alpha=1") {
  const auto w = ut_weights(1, {1.0, 2.0, 0.0});
  CHECK(w.lambda == 0.0);
  CHECK(w.wm(0) == 0.0);
  CHECK(w.wm(1) == 0.5);
  CHECK(w.wm(2) == 0.5);
  CHECK(w.wc(0) == 2.0);
  CHECK(w.wc(1) == 0.5);
  CHECK(w.wc(2) == 0.5);
}

TEST_CASE("mean weights sum to one for the default tuning") {
  for (int n : {1, 2, 4, 8, 21}) {
    const auto w = ut_weights(n, {});
    CHECK(std::abs(w.wm.sum() - 1.0) < 1e-9);
    CHECK(w.wm.size() == 2 * n + 1);
  }
  CHECK_THROWS_AS(ut_weights(0, {}), std::invalid_argument);
  CHECK_THROWS_AS(ut_weights(3, {0.0, 2.0, 0.0}), std::invalid_argument);
}

TEST_CASE("zero covariance collapses every sigma point onto the mean") {
  Eigen::VectorXd mean(3);
  mean << 1.0, -2.0, 0.5;
  const auto pts = sigma_points(mean, Eigen::MatrixXd::Zero(3, 3), ut_weights(3, {}).lambda);
  REQUIRE(pts.cols() == 7);
  for (int j = 0; j < 7; ++j) CHECK((pts.col(j) - mean).norm() == 0.0);
}

TEST_CASE("sigma points reconstruct the input moments") {
  GaussianSampler g(31);
  for (int n : {2, 4, 6}) {
    const Eigen::VectorXd mean = random_matrix(n, 1, g);
    const Eigen::MatrixXd p = random_spd(n, g);

    // alpha=1 makes the reconstruction exact algebra with benign weights.
    const auto w1 = ut_weights(n, {1.0, 2.0, 0.0});
    const auto pts1 = sigma_points(mean, p, w1.lambda);
    Eigen::VectorXd m1 = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < pts1.cols(); ++j) m1 += w1.wm(j) * pts1.col(j);
    Eigen::MatrixXd c1 = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < pts1.cols(); ++j) {
      const Eigen::VectorXd d = pts1.col(j) - m1;
      c1 += w1.wc(j) * d * d.transpose();
    }
    CHECK((m1 - mean).norm() < 1e-12 * mean.norm());
    CHECK((c1 - p).norm() < 1e-12 * p.norm());

    // Default tuning concentrates the points; cancellation costs ~1e6 eps.
    const auto w2 = ut_weights(n, {});
    const auto pts2 = sigma_points(mean, p, w2.lambda);
    Eigen::VectorXd m2 = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < pts2.cols(); ++j) m2 += w2.wm(j) * pts2.col(j);
    Eigen::MatrixXd c2 = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < pts2.cols(); ++j) {
      const Eigen::VectorXd d = pts2.col(j) - m2;
      c2 += w2.wc(j) * d * d.transpose();
    }
    CHECK((m2 - mean).norm() < 1e-8 * (1.0 + mean.norm()));
    CHECK((c2 - p).norm() < 1e-8 * p.norm());
  }
}

TEST_CASE("rank-deficient covariance survives via jitter") {
  Eigen::VectorXd v(3);
  v << 1.0, 2.0, -1.0;
  const Eigen::MatrixXd p = v * v.transpose();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(3);
  const auto w = ut_weights(3, {1.0, 2.0, 0.0});
  const auto pts = sigma_points(mean, p, w.lambda);  // must not throw
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(3, 3);
  for (int j = 0; j < pts.cols(); ++j) {
    const Eigen::VectorXd d = pts.col(j) - mean;
    c += w.wc(j) * d * d.transpose();
  }
  CHECK((c - p).norm() < 1e-5);
}

TEST_CASE("hopeless covariances raise FilterDivergence") {
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(2);
  Eigen::MatrixXd indefinite(2, 2);
  indefinite << 1.0, 0.0, 0.0, -1.0;
  CHECK_THROWS_AS(sigma_points(mean, indefinite, 0.0), FilterDivergence);
  indefinite(1, 1) = -0.5;
  CHECK_THROWS_AS(sigma_points(mean, indefinite, 0.0), FilterDivergence);
  Eigen::MatrixXd nan_cov = Eigen::MatrixXd::Identity(2, 2);
  nan_cov(0, 1) = std::nan("");
  CHECK_THROWS_AS(sigma_points(mean, nan_cov, 0.0), FilterDivergence);
  Eigen::VectorXd bad_mean(2);
  bad_mean << 1.0, std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(sigma_points(bad_mean, Eigen::MatrixXd::Identity(2, 2), 0.0),
                  FilterDivergence);
}

TEST_CASE("the transform is exact for linear dynamics") {
  GaussianSampler g(77);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 4;
    LinearModel model;
    model.A = 0.3 * random_matrix(n, n, g);
    model.B = random_matrix(n, 1, g);
    model.H = random_matrix(1, n, g);
    model.D = random_matrix(1, 1, g);

    UkfState state;
    state.x = random_matrix(n, 1, g);
    state.P = random_spd(n, g);
    const Eigen::VectorXd u = random_matrix(1, 1, g);
    const Eigen::MatrixXd q = 0.01 * Eigen::MatrixXd::Identity(n, n);

    const UtParams params = (trial % 2 == 0) ? UtParams{} : UtParams{1.0, 2.0, 0.0};
    const auto pred = ukf_predict(state, u, q, model, params);

    const Eigen::VectorXd mean_ref = model.A * state.x + model.B * u;
    const Eigen::MatrixXd cov_ref = model.A * state.P * model.A.transpose() + q;
    CHECK((pred.state.x - mean_ref).norm() < 1e-8 * (1.0 + mean_ref.norm()));
    CHECK((pred.state.P - cov_ref).norm() < 1e-7 * cov_ref.norm());
    CHECK((pred.state.P - pred.state.P.transpose()).norm() == 0.0);
  }
}

TEST_CASE("filter matches a textbook linear Kalman filter") {
  LinearModel model;
  const double th = 0.35, rho = 0.995;
  model.A.resize(2, 2);
  model.A << rho * std::cos(th), -rho * std::sin(th), rho * std::sin(th), rho * std::cos(th);
  model.B.resize(2, 1);
  model.B << 0.01, 0.02;
  model.H.resize(1, 2);
  model.H << 1.0, 0.0;
  model.D.resize(1, 1);
  model.D << 0.1;

  const int n_steps = 1000;
  GaussianSampler noise(123);
  std::vector<Eigen::VectorXd> u(n_steps + 1), y(n_steps + 1);
  Eigen::VectorXd x_true(2);
  x_true << 1.0, 0.0;
  for (int k = 0; k <= n_steps; ++k) {
    u[k] = Eigen::VectorXd::Constant(1, std::sin(0.1 * k));
    y[k] = model.H * x_true + model.D * u[k] + Eigen::VectorXd::Constant(1, 0.01 * noise.next());
    x_true = model.A * x_true + model.B * u[k];
  }

  const Eigen::MatrixXd q = 1e-12 * Eigen::MatrixXd::Identity(2, 2);
  const Eigen::MatrixXd r = 1e-2 * Eigen::MatrixXd::Identity(1, 1);

  UkfState ukf;
  ukf.x.resize(2);
  ukf.x << 0.8, -0.1;
  ukf.P = 0.1 * Eigen::MatrixXd::Identity(2, 2);
  Eigen::VectorXd kf_x = ukf.x;
  Eigen::MatrixXd kf_p = ukf.P;

  double max_diff_500 = 0.0, max_diff_all = 0.0;
  for (int k = 0; k < n_steps; ++k) {
    const auto [next, innov] = ukf_step(ukf, u[k], y[k + 1], u[k + 1], q, r, model, {});

    // Symmetry and covariance contraction hold along the whole trajectory.
    CHECK((next.P - next.P.transpose()).norm() == 0.0);
    const Eigen::MatrixXd pbar =
        model.A * ukf.P * model.A.transpose() + q;  // prediction covariance
    CHECK(next.P.trace() <= pbar.trace() + 1e-9);
    ukf = next;

    kf_x = model.A * kf_x + model.B * u[k];
    kf_p = model.A * kf_p * model.A.transpose() + q;
    const Eigen::MatrixXd s = model.H * kf_p * model.H.transpose() + r;
    const Eigen::MatrixXd gain = kf_p * model.H.transpose() * s.inverse();
    kf_x += gain * (y[k + 1] - model.H * kf_x - model.D * u[k + 1]);
    kf_p = (Eigen::MatrixXd::Identity(2, 2) - gain * model.H) * kf_p;

    const double diff = (ukf.x - kf_x).cwiseAbs().maxCoeff();
    if (k < 500) max_diff_500 = std::max(max_diff_500, diff);
    max_diff_all = std::max(max_diff_all, diff);
  }
  CHECK(max_diff_500 < 1e-8);
  CHECK(max_diff_all < 1e-7);
  // Sanity: the filter actually tracks the truth scale.
  CHECK(ukf.x.norm() < 10.0);
}

TEST_CASE("huge measurement noise makes the correction a no-op") {
  LinearModel model;
  model.A = 0.9 * Eigen::MatrixXd::Identity(2, 2);
  model.B = Eigen::MatrixXd::Zero(2, 1);
  model.H = Eigen::MatrixXd::Identity(2, 2);
  model.D = Eigen::MatrixXd::Zero(2, 1);

  UkfState state;
  state.x = Eigen::VectorXd::Ones(2);
  state.P = Eigen::MatrixXd::Identity(2, 2);
  const Eigen::VectorXd u = Eigen::VectorXd::Zero(1);
  const Eigen::MatrixXd q = 1e-6 * Eigen::MatrixXd::Identity(2, 2);
  const Eigen::MatrixXd r = 1e12 * Eigen::MatrixXd::Identity(2, 2);

  const auto pred = ukf_predict(state, u, q, model, {});
  const auto [corr, innov] =
      ukf_correct(pred, Eigen::VectorXd::Constant(2, 100.0), u, r, model);
  CHECK((corr.x - pred.state.x).norm() < 1e-6);
  CHECK((corr.P - pred.state.P).norm() < 1e-6);
}

TEST_CASE("zero innovation leaves the mean untouched but still shrinks P") {
  LinearModel model;
  model.A = 0.9 * Eigen::MatrixXd::Identity(2, 2);
  model.B = Eigen::MatrixXd::Zero(2, 1);
  model.H.resize(1, 2);
  model.H << 1.0, 0.5;
  model.D = Eigen::MatrixXd::Zero(1, 1);

  UkfState state;
  state.x = Eigen::VectorXd::Ones(2);
  state.P = Eigen::MatrixXd::Identity(2, 2);
  const Eigen::VectorXd u = Eigen::VectorXd::Zero(1);
  const Eigen::MatrixXd q = 1e-6 * Eigen::MatrixXd::Identity(2, 2);
  const Eigen::MatrixXd r = 1e-2 * Eigen::MatrixXd::Identity(1, 1);

  const auto pred = ukf_predict(state, u, q, model, {});
  const auto probe = ukf_correct(pred, Eigen::VectorXd::Zero(1), u, r, model);
  const auto [corr, innov] = ukf_correct(pred, probe.second.y_hat, u, r, model);
  CHECK(innov.e.norm() == 0.0);
  CHECK((corr.x - pred.state.x).norm() == 0.0);
  CHECK(corr.P.trace() < pred.state.P.trace());
}

TEST_CASE("ukf_step composes predict and correct exactly") {
  LinearModel model;
  model.A.resize(2, 2);
  model.A << 0.9, 0.1, -0.1, 0.9;
  model.B = Eigen::MatrixXd::Ones(2, 1);
  model.H.resize(1, 2);
  model.H << 1.0, 0.0;
  model.D = Eigen::MatrixXd::Zero(1, 1);

  UkfState state;
  state.x = Eigen::VectorXd::Ones(2);
  state.P = 0.5 * Eigen::MatrixXd::Identity(2, 2);
  const Eigen::VectorXd u0 = Eigen::VectorXd::Constant(1, 0.3);
  const Eigen::VectorXd u1 = Eigen::VectorXd::Constant(1, -0.2);
  const Eigen::VectorXd y = Eigen::VectorXd::Constant(1, 1.4);
  const Eigen::MatrixXd q = 1e-4 * Eigen::MatrixXd::Identity(2, 2);
  const Eigen::MatrixXd r = 1e-2 * Eigen::MatrixXd::Identity(1, 1);

  const auto one = ukf_step(state, u0, y, u1, q, r, model, {});
  const auto pred = ukf_predict(state, u0, q, model, {});
  const auto two = ukf_correct(pred, y, u1, r, model);
  CHECK((one.first.x - two.first.x).norm() == 0.0);
  CHECK((one.first.P - two.first.P).norm() == 0.0);
  CHECK((one.second.e - two.second.e).norm() == 0.0);
  CHECK((one.second.gain - two.second.gain).norm() == 0.0);
}

TEST_CASE("non-finite propagation is reported as divergence") {
  struct BlowUp final : ProcessModel {
    Eigen::VectorXd f(const Eigen::VectorXd& x, const Eigen::VectorXd&) const override {
      return Eigen::VectorXd::Constant(x.size(), std::nan(""));
    }
    Eigen::VectorXd h(const Eigen::VectorXd& x, const Eigen::VectorXd&) const override {
      return x.head(1);
    }
    int state_dim() const override { return 2; }
    int output_dim() const override { return 1; }
  } model;

  UkfState state;
  state.x = Eigen::VectorXd::Ones(2);
  state.P = Eigen::MatrixXd::Identity(2, 2);
  const Eigen::MatrixXd q = Eigen::MatrixXd::Identity(2, 2);
  CHECK_THROWS_AS(ukf_predict(state, Eigen::VectorXd::Zero(1), q, model, {}),
                  FilterDivergence);
}
