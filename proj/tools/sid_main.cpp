#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "sid/identify.hpp"
#include "sid/runconfig.hpp"
#include "sid/sweep.hpp"
#include "sid/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitDivergence = 2;

sid::SignalSeries build_excitation(const sid::ScenarioConfig& sc) {
  const auto& ex = sc.excitation;
  if (ex.kind == "white_noise")
    return sid::white_noise(sc.duration, sc.ts, ex.rms, sc.seed);
  if (ex.kind == "quake") return sid::quake_like(sc.duration, sc.ts, ex.quake, sc.seed);
  if (ex.kind == "impulse") return sid::impulse(sc.duration, sc.ts, ex.amplitude, ex.at);
  if (ex.kind == "file") {
    auto rec = sid::load_record(ex.path);
    if (std::abs(rec.ts - sc.ts) > 1e-12)
      throw std::invalid_argument("excitation record sampling does not match scenario ts");
    return rec;
  }
  throw std::invalid_argument("unknown excitation kind: " + ex.kind);
}

struct Materialized {
  sid::SignalSeries excitation;      // clean ground acceleration
  sid::SignalSeries input_measured;  // + noise, what the filter sees
  sid::TruthBundle truth;
  sid::SignalSeries measurements;    // truth outputs + noise
};

Materialized materialize(const sid::ScenarioConfig& sc) {
  Materialized m;
  m.excitation = build_excitation(sc);
  m.truth = sid::simulate_truth(sc.structure, sc.schedule, m.excitation, sc.oversample,
                                sc.sensors);
  m.input_measured = sid::add_noise(m.excitation, sc.noise.rms, sc.seed + 1000);
  m.measurements = sid::add_noise(m.truth.outputs, sc.noise.rms, sc.seed + 2000);
  return m;
}

void write_manifest(const sid::RunConfig& cfg, const sid::TruthBundle& truth,
                    const fs::path& dir) {
  std::ofstream f(dir / "manifest.txt");
  if (!f) throw std::runtime_error("cannot write manifest");
  f << sid::manifest_line(cfg) << "\n";
  f << "units," << cfg.scenario.units << "\n";
  for (const auto& ev : truth.realized) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "event,%d,%.17g,%.17g", ev.param_index, ev.time,
                  ev.new_stiffness);
    f << buf << "\n";
  }
  f << "final_stiffness";
  for (double k : truth.final_stiffness) {
    char buf[32];
    std::snprintf(buf, sizeof buf, ",%.17g", k);
    f << buf;
  }
  f << "\n";
  std::ofstream c(dir / "config.json");
  c << sid::dump_run_config(cfg) << "\n";
}

struct ManifestInfo {
  std::vector<sid::RealizedEvent> realized;
  std::vector<double> final_stiffness;
};

ManifestInfo read_manifest(const fs::path& dir) {
  std::ifstream f(dir / "manifest.txt");
  if (!f) throw std::invalid_argument("missing manifest.txt in " + dir.string());
  ManifestInfo info;
  std::string line;
  while (std::getline(f, line)) {
    if (line.rfind("event,", 0) == 0) {
      sid::RealizedEvent ev;
      if (std::sscanf(line.c_str(), "event,%d,%lg,%lg", &ev.param_index, &ev.time,
                      &ev.new_stiffness) == 3)
        info.realized.push_back(ev);
    } else if (line.rfind("final_stiffness", 0) == 0) {
      std::stringstream ss(line.substr(std::string("final_stiffness").size()));
      std::string cell;
      while (std::getline(ss, cell, ','))
        if (!cell.empty()) info.final_stiffness.push_back(std::stod(cell));
    }
  }
  return info;
}

sid::SignalSeries history_series(const Eigen::MatrixXd& vals, double ts,
                                 std::vector<std::string> labels,
                                 std::vector<std::string> units) {
  sid::SignalSeries s;
  s.ts = ts;
  s.values = vals;
  s.labels = std::move(labels);
  s.units = std::move(units);
  return s;
}

void write_identify_outputs(const sid::RunConfig& cfg, const sid::IdentificationResult& res,
                            const std::optional<sid::Metrics>& metrics, double gamma0,
                            const fs::path& dir) {
  const std::string stamp = sid::manifest_line(cfg);
  const int np = static_cast<int>(res.stiffness_history.cols());
  const int nd2 = static_cast<int>(res.state_history.cols());

  std::vector<std::string> klabels, kunits;
  for (int i = 0; i < np; ++i) {
    klabels.push_back("k" + std::to_string(i + 1));
    kunits.push_back("kN/m");
  }
  sid::save_csv(history_series(res.stiffness_history, res.ts, klabels, kunits),
                dir / "estimates_stiffness.csv", stamp);

  std::vector<std::string> slabels, sunits;
  for (int i = 0; i < nd2 / 2; ++i) {
    slabels.push_back("x" + std::to_string(i + 1));
    sunits.push_back("m");
  }
  for (int i = 0; i < nd2 / 2; ++i) {
    slabels.push_back("v" + std::to_string(i + 1));
    sunits.push_back("m/s");
  }
  sid::save_csv(history_series(res.state_history, res.ts, slabels, sunits),
                dir / "estimates_state.csv", stamp);

  sid::save_csv(history_series(res.gammas, res.ts, {"gamma"}, {"1"}), dir / "gamma.csv", stamp);

  {
    std::ofstream f(dir / "detections.csv");
    f << stamp << "\n";
    f << "time,step,param_index,gamma";
    for (int i = 0; i < np; ++i) f << ",probe_gamma" << i + 1;
    f << "\n";
    char buf[64];
    for (const auto& ev : res.log.events) {
      std::snprintf(buf, sizeof buf, "%.17g,%d,%d,%.17g", ev.time, ev.step, ev.param_index,
                    ev.gamma);
      f << buf;
      for (int i = 0; i < ev.probe_gammas.size(); ++i) {
        std::snprintf(buf, sizeof buf, ",%.17g", ev.probe_gammas(i));
        f << buf;
      }
      f << "\n";
    }
  }

  json jm;
  jm["version"] = sid::kVersion;
  jm["gamma0"] = gamma0;
  jm["diverged"] = res.diverged;
  if (res.diverged) jm["diverged_step"] = res.diverged_step;
  jm["detections"] = res.log.events.size();
  if (metrics) {
    jm["dk_percent"] = std::vector<double>(metrics->dk_percent.data(),
                                           metrics->dk_percent.data() + metrics->dk_percent.size());
    jm["false_positives"] = metrics->false_positives;
    jm["innovation_rms"] = metrics->innovation_rms;
    auto& ev = jm["events"] = json::array();
    for (const auto& e : metrics->events) {
      json je = {{"param_index", e.param_index}, {"true_time", e.true_time}};
      if (e.detected_time) {
        je["detected_time"] = *e.detected_time;
        je["latency"] = e.latency();
      } else {
        je["detected_time"] = nullptr;
      }
      ev.push_back(je);
    }
  }
  std::ofstream f(dir / "metrics.json");
  f << jm.dump(2) << "\n";
}

int cmd_simulate(const sid::RunConfig& cfg) {
  const fs::path dir = sid::resolve_output_dir(cfg);
  fs::create_directories(dir);
  const Materialized m = materialize(cfg.scenario);
  const std::string stamp = sid::manifest_line(cfg);
  sid::save_csv(m.excitation, dir / "excitation.csv", stamp);
  sid::save_csv(m.input_measured, dir / "input_measured.csv", stamp);
  sid::save_csv(m.truth.states, dir / "truth_states.csv", stamp);
  sid::save_csv(m.truth.outputs, dir / "truth_outputs.csv", stamp);
  sid::save_csv(m.measurements, dir / "measurements.csv", stamp);
  write_manifest(cfg, m.truth, dir);
  std::printf("wrote %d samples to %s (%zu damage events realized)\n", m.excitation.samples(),
              dir.string().c_str(), m.truth.realized.size());
  return kExitOk;
}

int cmd_identify(const sid::RunConfig& cfg, const std::string& run_dir, sid::Exec exec) {
  const fs::path dir = sid::resolve_output_dir(cfg);
  fs::create_directories(dir);

  sid::SignalSeries input, measurements;
  std::vector<sid::RealizedEvent> realized;
  Eigen::VectorXd true_k;
  if (!run_dir.empty()) {
    const fs::path rd(run_dir);
    if (!fs::exists(rd / "measurements.csv") || !fs::exists(rd / "input_measured.csv"))
      throw std::invalid_argument("run directory lacks input_measured.csv/measurements.csv");
    input = sid::load_record(rd / "input_measured.csv");
    measurements = sid::load_record(rd / "measurements.csv");
    const ManifestInfo info = read_manifest(rd);
    realized = info.realized;
    if (!info.final_stiffness.empty()) {
      true_k.resize(static_cast<int>(info.final_stiffness.size()));
      for (size_t i = 0; i < info.final_stiffness.size(); ++i)
        true_k(static_cast<int>(i)) = info.final_stiffness[i];
    }
  } else {
    const Materialized m = materialize(cfg.scenario);
    input = m.input_measured;
    measurements = m.measurements;
    realized = m.truth.realized;
    true_k.resize(static_cast<int>(m.truth.final_stiffness.size()));
    for (size_t i = 0; i < m.truth.final_stiffness.size(); ++i)
      true_k(static_cast<int>(i)) = m.truth.final_stiffness[i];
  }

  std::optional<sid::AdaptationConfig> adapt;
  double gamma0 = 0.0;
  if (cfg.adaptation.enabled) {
    adapt = cfg.adaptation.cfg;
    gamma0 = sid::threshold_gamma0(adapt->delta, measurements.channels(), adapt->z0);
  }

  const auto res = run_identification(cfg.scenario.structure, cfg.scenario.sensors, input,
                                      measurements, cfg.filter, adapt, 0.0, exec);

  std::optional<sid::Metrics> metrics;
  if (true_k.size() == res.stiffness_history.cols())
    metrics = sid::compute_metrics(res, true_k, realized);

  write_identify_outputs(cfg, res, metrics, gamma0, dir);

  if (res.diverged) {
    std::fprintf(stderr, "filter diverged at step %d (t=%.2f s)\n", res.diverged_step,
                 res.diverged_step * res.ts);
    return kExitDivergence;
  }
  std::printf("identified %d steps, %zu detections",
              static_cast<int>(res.gammas.size()) - 1, res.log.events.size());
  if (metrics) {
    std::printf(", dk%% =");
    for (int i = 0; i < metrics->dk_percent.size(); ++i)
      std::printf(" %.3f", metrics->dk_percent(i));
  }
  std::printf(" -> %s\n", dir.string().c_str());
  return kExitOk;
}

int cmd_sweep_covariance(const sid::RunConfig& cfg, std::vector<double> p0_grid,
                         sid::Exec exec) {
  if (p0_grid.empty())
    for (int e = -8; e <= 0; ++e) p0_grid.push_back(std::pow(10.0, e));
  const fs::path dir = sid::resolve_output_dir(cfg);
  fs::create_directories(dir);

  std::vector<sid::SweepScenario> variants;
  std::vector<std::string> labels;
  const auto ground = build_excitation(cfg.scenario);
  sid::StructureSpec bare = cfg.scenario.structure;
  bare.tmd.reset();
  variants.push_back(sid::make_sweep_scenario(bare, cfg.scenario.sensors, ground,
                                              cfg.scenario.noise.rms, cfg.scenario.seed,
                                              cfg.scenario.oversample));
  labels.push_back("bare");
  if (cfg.scenario.structure.tmd) {
    variants.push_back(sid::make_sweep_scenario(cfg.scenario.structure, cfg.scenario.sensors,
                                                ground, cfg.scenario.noise.rms,
                                                cfg.scenario.seed, cfg.scenario.oversample));
    labels.push_back("tmd");
  }

  const auto res = sid::sweep_covariance(variants, labels, p0_grid, cfg.filter, exec);

  std::ofstream f(dir / "sweep_covariance.csv");
  f << sid::manifest_line(cfg) << "\n";
  f << "variant,p0,k1_final,dk1_percent\n";
  char buf[128];
  for (size_t v = 0; v < labels.size(); ++v)
    for (size_t j = 0; j < p0_grid.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g", labels[v].c_str(), p0_grid[j],
                    res.k1_final(v, j), res.dk1_percent(v, j));
      f << buf << "\n";
    }
  std::printf("swept %zu P0 values x %zu variants -> %s\n", p0_grid.size(), labels.size(),
              (dir / "sweep_covariance.csv").string().c_str());
  return kExitOk;
}

int cmd_sweep_model(const sid::RunConfig& cfg, std::vector<int> orders,
                    std::vector<double> q_grid, sid::Exec exec) {
  if (orders.empty()) orders = {1, 2, 3, 4};
  if (q_grid.empty())
    for (int e = -15; e <= -8; ++e) q_grid.push_back(std::pow(10.0, e));
  const fs::path dir = sid::resolve_output_dir(cfg);
  fs::create_directories(dir);

  const auto ground = build_excitation(cfg.scenario);
  const auto scenario =
      sid::make_sweep_scenario(cfg.scenario.structure, cfg.scenario.sensors, ground,
                               cfg.scenario.noise.rms, cfg.scenario.seed,
                               cfg.scenario.oversample);
  const auto res = sid::sweep_model(scenario, orders, q_grid, cfg.filter, exec);

  std::ofstream f(dir / "sweep_model.csv");
  f << sid::manifest_line(cfg) << "\n";
  f << "order,q,dk1_percent\n";
  char buf[96];
  for (size_t i = 0; i < orders.size(); ++i)
    for (size_t j = 0; j < q_grid.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g", orders[i], q_grid[j],
                    res.dk1_percent(i, j));
      f << buf << "\n";
    }
  std::printf("swept %zu orders x %zu Q values -> %s\n", orders.size(), q_grid.size(),
              (dir / "sweep_model.csv").string().c_str());
  return kExitOk;
}

int cmd_report(const std::string& run_dir) {
  const fs::path dir(run_dir);
  std::ifstream f(dir / "metrics.json");
  if (!f) throw std::invalid_argument("no metrics.json in " + dir.string());
  json jm = json::parse(f);
  std::printf("run: %s\n", dir.string().c_str());
  std::printf("  detections: %d\n", jm.value("detections", 0));
  if (jm.contains("dk_percent")) {
    std::printf("  final stiffness deviation [%%]:");
    for (double v : jm["dk_percent"]) std::printf(" %.4f", v);
    std::printf("\n");
  }
  if (jm.contains("events"))
    for (const auto& e : jm["events"]) {
      if (e["detected_time"].is_null())
        std::printf("  event k%d at %.2f s: MISSED\n", e["param_index"].get<int>() + 1,
                    e["true_time"].get<double>());
      else
        std::printf("  event k%d at %.2f s: detected +%.3f s\n",
                    e["param_index"].get<int>() + 1, e["true_time"].get<double>(),
                    e["latency"].get<double>());
    }
  if (jm.contains("false_positives"))
    std::printf("  false positives: %d\n", jm["false_positives"].get<int>());
  if (jm.contains("innovation_rms"))
    std::printf("  innovation rms: %.6g\n", jm["innovation_rms"].get<double>());
  if (jm.value("diverged", false)) {
    std::printf("  DIVERGED at step %d\n", jm.value("diverged_step", -1));
    return kExitDivergence;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint state/stiffness identification for shear-frame structures"};
  app.set_version_flag("--version", sid::kVersion);
  app.require_subcommand(1);

  std::string config_path, output_override, run_dir;
  std::optional<std::uint64_t> seed_override;
  std::optional<double> p0_override, q_override, r_override, duration_override;
  std::optional<int> order_override;
  bool parallel = false;
  std::vector<double> p0_grid, q_grid;
  std::vector<int> orders;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_path, "run configuration (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("-o,--output", output_override, "output directory (overrides config)");
    sub->add_option("--seed", seed_override, "scenario seed (overrides config)");
    sub->add_option("--duration", duration_override, "scenario duration [s] (overrides config)");
    sub->add_option("--p0", p0_override, "initial covariance scalar (overrides config)");
    sub->add_option("--q", q_override, "process noise scalar (overrides config)");
    sub->add_option("--r", r_override, "measurement noise scalar (overrides config)");
    sub->add_option("--taylor-order", order_override, "discretization order (overrides config)");
    sub->add_flag("--parallel", parallel, "run sigma points / sweep cells across threads");
  };

  auto* c_sim = app.add_subcommand("simulate", "generate truth, excitation and measurements");
  add_common(c_sim);
  auto* c_id = app.add_subcommand("identify", "run the identification filter");
  add_common(c_id);
  c_id->add_option("--run", run_dir, "read measurements from a simulate output directory")
      ->check(CLI::ExistingDirectory);
  auto* c_swc = app.add_subcommand("sweep-covariance", "final stiffness vs initial covariance");
  add_common(c_swc);
  c_swc->add_option("--p0-grid", p0_grid, "P0 grid values");
  auto* c_swm = app.add_subcommand("sweep-model", "final stiffness vs order and process noise");
  add_common(c_swm);
  c_swm->add_option("--orders", orders, "Taylor orders to sweep");
  c_swm->add_option("--q-grid", q_grid, "Q grid values");
  auto* c_rep = app.add_subcommand("report", "summarize an identify output directory");
  c_rep->add_option("run_dir", run_dir, "identify output directory")
      ->required()
      ->check(CLI::ExistingDirectory);

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_rep->parsed()) return cmd_report(run_dir);

    sid::RunConfig cfg = sid::load_run_config(config_path);
    if (!output_override.empty()) cfg.output_dir = output_override;
    if (seed_override) cfg.scenario.seed = *seed_override;
    if (duration_override) cfg.scenario.duration = *duration_override;
    if (p0_override) cfg.filter.p0 = *p0_override;
    if (q_override) cfg.filter.q = *q_override;
    if (r_override) cfg.filter.r = *r_override;
    if (order_override) cfg.filter.taylor_order = *order_override;
    const sid::Exec exec = parallel ? sid::Exec::Parallel : sid::Exec::Serial;

    if (c_sim->parsed()) return cmd_simulate(cfg);
    if (c_id->parsed()) return cmd_identify(cfg, run_dir, exec);
    if (c_swc->parsed()) return cmd_sweep_covariance(cfg, p0_grid, exec);
    if (c_swm->parsed()) return cmd_sweep_model(cfg, orders, q_grid, exec);
  } catch (const sid::FilterDivergence& e) {
    std::fprintf(stderr, "filter divergence: %s\n", e.what());
    return kExitDivergence;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  }
  return kExitValidation;
}
