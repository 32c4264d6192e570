#include "sid/signals.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "sid/discretize.hpp"

namespace sid {

namespace {

inline double to_unit(std::uint64_t bits) {
  // 53 top bits -> [0, 1)
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace

double GaussianSampler::next() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  do {
    u1 = to_unit(eng_());
  } while (u1 <= 0.0);
  const double u2 = to_unit(eng_());
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(t);
  have_spare_ = true;
  return r * std::cos(t);
}

SignalSeries white_noise(double duration, double ts, double rms, std::uint64_t seed) {
  if (!(duration > 0.0) || !(ts > 0.0))
    throw std::invalid_argument("duration and ts must be positive");
  const int n = static_cast<int>(std::llround(duration / ts));
  if (n < 1) throw std::invalid_argument("duration shorter than one sample");
  SignalSeries s;
  s.ts = ts;
  s.values.resize(n, 1);
  s.labels = {"ag"};
  s.units = {"m/s^2"};
  GaussianSampler g(seed);
  for (int k = 0; k < n; ++k) s.values(k, 0) = rms * g.next();
  return s;
}

SignalSeries impulse(double duration, double ts, double amplitude, double t_hit) {
  if (!(duration > 0.0) || !(ts > 0.0))
    throw std::invalid_argument("duration and ts must be positive");
  const int n = static_cast<int>(std::llround(duration / ts));
  if (n < 1) throw std::invalid_argument("duration shorter than one sample");
  SignalSeries s;
  s.ts = ts;
  s.values = Eigen::MatrixXd::Zero(n, 1);
  s.labels = {"ag"};
  s.units = {"m/s^2"};
  const int k = static_cast<int>(std::llround(t_hit / ts));
  if (k < 0 || k >= n) throw std::invalid_argument("impulse time outside the record");
  s.values(k, 0) = amplitude;
  return s;
}

SignalSeries quake_like(double duration, double ts, const QuakeParams& params,
                        std::uint64_t seed) {
  if (!(duration > 0.0) || !(ts > 0.0))
    throw std::invalid_argument("duration and ts must be positive");
  if (!(params.t_rise < params.t_strong && params.t_strong <= params.t_end))
    throw std::invalid_argument("quake envelope times must satisfy rise < strong <= end");
  const int n = static_cast<int>(std::llround(duration / ts));
  if (n < 1) throw std::invalid_argument("duration shorter than one sample");

  // Kanai-Tajimi shaping filter: SDOF driven by white noise, ground
  // acceleration read out as 2 zg wg v + wg^2 x.
  const double wg = 2.0 * std::numbers::pi * params.fg_hz;
  Eigen::MatrixXd A(2, 2), B(2, 1);
  A << 0.0, 1.0, -wg * wg, -2.0 * params.zeta_g * wg;
  B << 0.0, 1.0;
  Eigen::MatrixXd Ad, Bd;
  exact_discretize(A, B, ts, Ad, Bd);
  const Eigen::RowVector2d Cf(wg * wg, 2.0 * params.zeta_g * wg);

  SignalSeries s;
  s.ts = ts;
  s.values.resize(n, 1);
  s.labels = {"ag"};
  s.units = {"m/s^2"};
  GaussianSampler g(seed);
  Eigen::Vector2d x = Eigen::Vector2d::Zero();
  for (int k = 0; k < n; ++k) {
    s.values(k, 0) = Cf * x;
    x = Ad * x + Bd * Eigen::Matrix<double, 1, 1>(g.next());
  }

  // Trapezoidal envelope, then scale the strong phase to the requested RMS.
  double sumsq = 0.0;
  int count = 0;
  for (int k = 0; k < n; ++k) {
    const double t = k * ts;
    double env = 0.0;
    if (t < params.t_rise)
      env = t / params.t_rise;
    else if (t <= params.t_strong)
      env = 1.0;
    else if (t < params.t_end)
      env = (params.t_end - t) / (params.t_end - params.t_strong);
    s.values(k, 0) *= env;
    if (t >= params.t_rise && t <= params.t_strong) {
      sumsq += s.values(k, 0) * s.values(k, 0);
      ++count;
    }
  }
  if (count == 0 || sumsq == 0.0) throw std::invalid_argument("strong phase has no samples");
  s.values *= params.rms_strong / std::sqrt(sumsq / count);
  return s;
}

SignalSeries add_noise(const SignalSeries& clean, double rms, std::uint64_t seed) {
  SignalSeries out = clean;
  GaussianSampler g(seed);
  for (int k = 0; k < out.samples(); ++k)
    for (int c = 0; c < out.channels(); ++c) out.values(k, c) += rms * g.next();
  return out;
}

double sample_rms(const SignalSeries& series, int channel) {
  if (channel < 0 || channel >= series.channels())
    throw std::invalid_argument("channel out of range");
  return std::sqrt(series.values.col(channel).squaredNorm() / series.samples());
}

void save_csv(const SignalSeries& series, const std::filesystem::path& path,
              const std::string& manifest_line) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  if (!manifest_line.empty())
    f << (manifest_line.front() == '#' ? "" : "# ") << manifest_line << "\n";
  if (!series.units.empty()) {
    f << "# units: time=s";
    for (size_t i = 0; i < series.units.size(); ++i)
      f << "," << (i < series.labels.size() ? series.labels[i] : "ch") << "="
        << series.units[i];
    f << "\n";
  }
  f << "time";
  for (int c = 0; c < series.channels(); ++c)
    f << "," << (c < static_cast<int>(series.labels.size()) ? series.labels[c]
                                                            : "ch" + std::to_string(c));
  f << "\n";
  char buf[32];
  for (int k = 0; k < series.samples(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", series.time_at(k));
    f << buf;
    for (int c = 0; c < series.channels(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", series.values(k, c));
      f << "," << buf;
    }
    f << "\n";
  }
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

SignalSeries load_record(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  std::vector<std::string> labels;
  std::vector<std::vector<double>> rows;
  bool header_seen = false;
  while (std::getline(f, line)) {
    if (line.empty() || line.front() == '#') continue;
    std::stringstream ss(line);
    std::string cell;
    if (!header_seen) {
      while (std::getline(ss, cell, ',')) labels.push_back(cell);
      if (labels.empty() || labels.front() != "time")
        throw std::runtime_error(path.string() + ": first column must be `time`");
      header_seen = true;
      continue;
    }
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      size_t pos = 0;
      row.push_back(std::stod(cell, &pos));
    }
    if (row.size() != labels.size())
      throw std::runtime_error(path.string() + ": ragged row");
    rows.push_back(std::move(row));
  }
  if (rows.size() < 2) throw std::runtime_error(path.string() + ": need at least 2 samples");

  SignalSeries s;
  s.ts = rows[1][0] - rows[0][0];
  if (!(s.ts > 0.0)) throw std::runtime_error(path.string() + ": non-increasing time column");
  for (size_t k = 1; k + 1 < rows.size(); ++k)
    if (std::abs(rows[k + 1][0] - rows[k][0] - s.ts) > 1e-9 * std::max(1.0, s.ts))
      throw std::runtime_error(path.string() + ": non-uniform sampling");
  const int n = static_cast<int>(rows.size());
  const int ch = static_cast<int>(labels.size()) - 1;
  s.values.resize(n, ch);
  for (int k = 0; k < n; ++k)
    for (int c = 0; c < ch; ++c) s.values(k, c) = rows[k][c + 1];
  s.labels.assign(labels.begin() + 1, labels.end());
  return s;
}

}  // namespace sid
