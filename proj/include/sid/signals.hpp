#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace sid {

struct SignalSeries {
  double ts{};
  Eigen::MatrixXd values;  // rows = samples, cols = channels
  std::vector<std::string> labels;
  std::vector<std::string> units;

  int samples() const { return static_cast<int>(values.rows()); }
  int channels() const { return static_cast<int>(values.cols()); }
  double duration() const { return samples() * ts; }
  double time_at(int k) const { return k * ts; }
};

// Standard-normal sampler: mt19937_64 + Box-Muller. Written out explicitly
// (instead of std::normal_distribution) so streams are identical across
// standard libraries — seeds baked into test fixtures depend on it.
class GaussianSampler {
 public:
  explicit GaussianSampler(std::uint64_t seed) : eng_(seed) {}
  double next();

 private:
  std::mt19937_64 eng_;
  bool have_spare_{false};
  double spare_{};
};

SignalSeries white_noise(double duration, double ts, double rms, std::uint64_t seed);

SignalSeries impulse(double duration, double ts, double amplitude, double t_hit);

// Synthetic ground motion: white noise shaped by a Kanai-Tajimi style SDOF
// filter, windowed by a trapezoidal envelope (linear rise, strong phase,
// linear decay), scaled so the strong-phase RMS hits rms_strong.
struct QuakeParams {
  double fg_hz = 1.5;
  double zeta_g = 0.6;
  double t_rise = 2.0;
  double t_strong = 20.0;  // end of the flat strong phase
  double t_end = 30.0;     // envelope reaches zero here
  double rms_strong = 2.0;
};

SignalSeries quake_like(double duration, double ts, const QuakeParams& params,
                        std::uint64_t seed);

SignalSeries add_noise(const SignalSeries& clean, double rms, std::uint64_t seed);

double sample_rms(const SignalSeries& series, int channel = 0);

// CSV layout: optional '#' comment lines (units, manifest), then a header row
// `time,<ch>,...`, then one row per sample. '.' decimal, full double precision.
void save_csv(const SignalSeries& series, const std::filesystem::path& path,
              const std::string& manifest_line = {});
SignalSeries load_record(const std::filesystem::path& path);

}  // namespace sid
