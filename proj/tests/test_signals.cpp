#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "sid/signals.hpp"

using namespace sid;
namespace fs = std::filesystem;

TEST_CASE("gaussian sampler is deterministic per seed") {
  GaussianSampler a(12345), b(12345), c(54321);
  bool all_equal = true, any_diff = false;
  for (int i = 0; i < 100; ++i) {
    const double va = a.next();
    all_equal &= (va == b.next());
    any_diff |= (va != c.next());
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("gaussian sampler has standard-normal moments") {
  GaussianSampler g(2024);
  const int n = 200000;
  double sum = 0.0, sumsq = 0.0, sum3 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = g.next();
    sum += x;
    sumsq += x * x;
    sum3 += x * x * x;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);          // se ~ 1/sqrt(n) ~ 0.0022
  CHECK(std::abs(var - 1.0) < 0.02);     // se ~ sqrt(2/n) ~ 0.0032
  CHECK(std::abs(sum3 / n) < 0.03);      // skewness
}

TEST_CASE("white noise hits the requested rms and length") {
  const auto s = white_noise(60.0, 0.02, 0.57, 42);
  CHECK(s.samples() == 3000);
  CHECK(s.channels() == 1);
  CHECK(s.ts == 0.02);
  CHECK(std::abs(sample_rms(s) - 0.57) / 0.57 < 0.05);

  const auto t = white_noise(60.0, 0.02, 0.57, 42);
  CHECK((s.values - t.values).norm() == 0.0);
}

TEST_CASE("impulse puts one sample where asked") {
  const auto s = impulse(10.0, 0.02, 3.5, 1.0);
  CHECK(s.values(50, 0) == 3.5);
  CHECK(s.values.cwiseAbs().sum() == 3.5);
  CHECK_THROWS_AS(impulse(10.0, 0.02, 1.0, 11.0), std::invalid_argument);
}

TEST_CASE("quake envelope scales the strong phase exactly and dies out") {
  QuakeParams q;
  q.fg_hz = 1.5;
  q.zeta_g = 0.6;
  q.t_rise = 2.0;
  q.t_strong = 20.0;
  q.t_end = 30.0;
  q.rms_strong = 2.0;
  const auto s = quake_like(40.0, 0.02, q, 7);

  double sumsq = 0.0;
  int count = 0;
  for (int k = 0; k < s.samples(); ++k) {
    const double t = k * s.ts;
    if (t >= q.t_rise && t <= q.t_strong) {
      sumsq += s.values(k, 0) * s.values(k, 0);
      ++count;
    }
    if (t >= q.t_end) CHECK(s.values(k, 0) == 0.0);
  }
  CHECK(std::sqrt(sumsq / count) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(s.values(0, 0) == 0.0);  // envelope starts at zero

  CHECK_THROWS_AS(([&] {
                    QuakeParams bad = q;
                    bad.t_strong = 1.0;  // violates rise < strong
                    quake_like(40.0, 0.02, bad, 7);
                  }()),
                  std::invalid_argument);
}

TEST_CASE("quake spectrum concentrates near the filter frequency") {
  QuakeParams q;
  q.fg_hz = 1.5;
  q.zeta_g = 0.25;
  q.t_rise = 1.0;
  q.t_strong = 60.0;
  q.t_end = 60.0;
  q.rms_strong = 1.0;
  const auto s = quake_like(60.0, 0.02, q, 11);
  auto power_at = [&](double f_hz) {
    const double w = 2.0 * std::numbers::pi * f_hz;
    double re = 0.0, im = 0.0;
    for (int k = 0; k < s.samples(); ++k) {
      re += s.values(k, 0) * std::cos(w * k * s.ts);
      im += s.values(k, 0) * std::sin(w * k * s.ts);
    }
    return re * re + im * im;
  };
  // Individual bins of one realization scatter too much (chi^2 with two
  // degrees of freedom), so compare short band averages around fg and far
  // above it. The shaped spectrum separates them by >2 orders of magnitude.
  auto band_power = [&](double f0_hz) {
    double p = 0.0;
    for (int i = -2; i <= 2; ++i) p += power_at(f0_hz + 0.15 * i);
    return p / 5.0;
  };
  CHECK(band_power(1.5) > 10.0 * band_power(8.0));
}

TEST_CASE("add_noise perturbs by the stated rms, deterministically") {
  const auto clean = white_noise(20.0, 0.02, 1.0, 3);
  const auto noisy = add_noise(clean, 0.01, 99);
  const auto noisy2 = add_noise(clean, 0.01, 99);
  CHECK((noisy.values - noisy2.values).norm() == 0.0);
  const Eigen::MatrixXd diff = noisy.values - clean.values;
  const double rms = std::sqrt(diff.squaredNorm() / diff.size());
  CHECK(std::abs(rms - 0.01) / 0.01 < 0.1);
}

TEST_CASE("csv roundtrip is bit exact") {
  SignalSeries s;
  s.ts = 0.02;
  s.values.resize(5, 2);
  s.values << 0.1, -2.5e-17, 1.0 / 3.0, 4e300, -1.25, 0.0, 3.14159, 2.0, -0.5, 1e-300;
  s.labels = {"a1", "a2"};
  s.units = {"m/s^2", "m/s^2"};

  const fs::path p = fs::temp_directory_path() / "sid_roundtrip.csv";
  save_csv(s, p, "# test manifest");
  const auto r = load_record(p);
  REQUIRE(r.samples() == 5);
  REQUIRE(r.channels() == 2);
  CHECK(r.ts == s.ts);
  CHECK((r.values - s.values).norm() == 0.0);
  CHECK(r.labels == s.labels);
  fs::remove(p);
}

TEST_CASE("loader rejects malformed files") {
  const fs::path p = fs::temp_directory_path() / "sid_bad.csv";
  CHECK_THROWS(load_record(fs::temp_directory_path() / "does_not_exist.csv"));
  {
    std::ofstream f(p);
    f << "time,a1\n0,1\n0.02,2\n0.06,3\n";  // gap: non-uniform
  }
  CHECK_THROWS(load_record(p));
  {
    std::ofstream f(p);
    f << "time,a1\n0,1\n0.02\n";  // ragged
  }
  CHECK_THROWS(load_record(p));
  {
    std::ofstream f(p);
    f << "a1,time\n0,1\n0.02,2\n";  // time not first
  }
  CHECK_THROWS(load_record(p));
  fs::remove(p);
}

TEST_CASE("sample_rms matches a hand value") {
  SignalSeries s;
  s.ts = 1.0;
  s.values.resize(4, 1);
  s.values << 1.0, -1.0, 1.0, -1.0;
  CHECK(sample_rms(s) == 1.0);
  CHECK_THROWS_AS(sample_rms(s, 1), std::invalid_argument);
}
