#include "sid/runconfig.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "sid/version.hpp"

namespace sid {

using nlohmann::json;

namespace {

SensorType sensor_type_from(const std::string& s) {
  if (s == "displacement") return SensorType::Displacement;
  if (s == "velocity") return SensorType::Velocity;
  if (s == "acceleration") return SensorType::Acceleration;
  throw std::invalid_argument("unknown sensor type: " + s);
}

std::string sensor_type_name(SensorType t) {
  switch (t) {
    case SensorType::Displacement: return "displacement";
    case SensorType::Velocity: return "velocity";
    default: return "acceleration";
  }
}

template <typename T>
void maybe(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

json structure_to_json(const StructureSpec& s) {
  json j;
  j["masses"] = s.masses;
  j["stiffnesses"] = s.stiffnesses;
  j["dampings"] = s.dampings;
  if (!s.influence.empty()) j["influence"] = s.influence;
  if (s.tmd)
    j["tmd"] = {{"mass", s.tmd->mass},
                {"stiffness", s.tmd->stiffness},
                {"damping", s.tmd->damping}};
  return j;
}

StructureSpec structure_from_json(const json& j) {
  StructureSpec s;
  s.masses = j.at("masses").get<std::vector<double>>();
  s.stiffnesses = j.at("stiffnesses").get<std::vector<double>>();
  s.dampings = j.at("dampings").get<std::vector<double>>();
  maybe(j, "influence", s.influence);
  if (j.contains("tmd")) {
    const auto& t = j.at("tmd");
    s.tmd = TmdSpec{t.at("mass").get<double>(), t.at("stiffness").get<double>(),
                    t.at("damping").get<double>()};
  }
  return s;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }

  RunConfig cfg;
  const auto& sc = j.at("scenario");
  cfg.scenario.structure = structure_from_json(sc.at("structure"));
  maybe(sc, "units", cfg.scenario.units);
  for (const auto& js : sc.at("sensors")) {
    Sensor s;
    s.dof = js.at("dof").get<int>();
    s.type = sensor_type_from(js.value("type", "acceleration"));
    cfg.scenario.sensors.push_back(s);
  }
  if (sc.contains("excitation")) {
    const auto& je = sc.at("excitation");
    maybe(je, "kind", cfg.scenario.excitation.kind);
    maybe(je, "rms", cfg.scenario.excitation.rms);
    maybe(je, "amplitude", cfg.scenario.excitation.amplitude);
    maybe(je, "at", cfg.scenario.excitation.at);
    maybe(je, "path", cfg.scenario.excitation.path);
    if (je.contains("quake")) {
      const auto& q = je.at("quake");
      auto& qp = cfg.scenario.excitation.quake;
      maybe(q, "fg_hz", qp.fg_hz);
      maybe(q, "zeta_g", qp.zeta_g);
      maybe(q, "t_rise", qp.t_rise);
      maybe(q, "t_strong", qp.t_strong);
      maybe(q, "t_end", qp.t_end);
      maybe(q, "rms_strong", qp.rms_strong);
    }
  }
  maybe(sc, "duration", cfg.scenario.duration);
  maybe(sc, "ts", cfg.scenario.ts);
  maybe(sc, "oversample", cfg.scenario.oversample);
  if (sc.contains("noise")) maybe(sc.at("noise"), "rms", cfg.scenario.noise.rms);
  maybe(sc, "seed", cfg.scenario.seed);
  if (sc.contains("schedule")) {
    for (const auto& je : sc.at("schedule")) {
      DamageEvent ev;
      ev.param_index = je.at("param_index").get<int>();
      ev.new_stiffness = je.at("new_stiffness").get<double>();
      if (je.contains("time")) {
        ev.trigger = FixedTimeTrigger{je.at("time").get<double>()};
      } else if (je.contains("drift_story")) {
        ev.trigger =
            DriftTrigger{je.at("drift_story").get<int>(), je.at("drift_threshold").get<double>()};
      } else {
        throw std::invalid_argument("damage event needs `time` or `drift_story`+`drift_threshold`");
      }
      cfg.scenario.schedule.events.push_back(ev);
    }
  }

  if (j.contains("filter")) {
    const auto& jf = j.at("filter");
    maybe(jf, "alpha", cfg.filter.ut.alpha);
    maybe(jf, "beta", cfg.filter.ut.beta);
    maybe(jf, "kappa", cfg.filter.ut.kappa);
    maybe(jf, "p0", cfg.filter.p0);
    maybe(jf, "q", cfg.filter.q);
    maybe(jf, "r", cfg.filter.r);
    maybe(jf, "taylor_order", cfg.filter.taylor_order);
    if (jf.contains("initial_stiffness")) {
      const auto v = jf.at("initial_stiffness").get<std::vector<double>>();
      cfg.filter.initial_stiffness =
          Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<int>(v.size()));
    }
  }

  if (j.contains("adaptation")) {
    const auto& ja = j.at("adaptation");
    maybe(ja, "enabled", cfg.adaptation.enabled);
    maybe(ja, "delta", cfg.adaptation.cfg.delta);
    maybe(ja, "z0", cfg.adaptation.cfg.z0);
    maybe(ja, "p_adapt", cfg.adaptation.cfg.p_adapt);
    maybe(ja, "probe_reduction", cfg.adaptation.cfg.probe_reduction);
    maybe(ja, "cooldown_steps", cfg.adaptation.cfg.cooldown_steps);
  }
  maybe(j, "output_dir", cfg.output_dir);

  cfg.scenario.structure.validate();
  if (cfg.scenario.sensors.empty()) throw std::invalid_argument("at least one sensor required");
  if (!(cfg.scenario.duration > 0.0)) throw std::invalid_argument("duration must be positive");
  if (!(cfg.scenario.ts > 0.0)) throw std::invalid_argument("ts must be positive");
  if (cfg.scenario.oversample < 1) throw std::invalid_argument("oversample must be >= 1");
  cfg.scenario.schedule.validate(cfg.scenario.structure);
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot open config file: " + path);
  std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return parse_run_config(text);
}

std::string dump_run_config(const RunConfig& cfg) {
  json j;
  auto& sc = j["scenario"];
  sc["structure"] = structure_to_json(cfg.scenario.structure);
  sc["units"] = cfg.scenario.units;
  sc["sensors"] = json::array();
  for (const auto& s : cfg.scenario.sensors)
    sc["sensors"].push_back({{"dof", s.dof}, {"type", sensor_type_name(s.type)}});
  auto& je = sc["excitation"];
  je["kind"] = cfg.scenario.excitation.kind;
  if (cfg.scenario.excitation.kind == "white_noise") {
    je["rms"] = cfg.scenario.excitation.rms;
  } else if (cfg.scenario.excitation.kind == "quake") {
    const auto& qp = cfg.scenario.excitation.quake;
    je["quake"] = {{"fg_hz", qp.fg_hz},       {"zeta_g", qp.zeta_g},
                   {"t_rise", qp.t_rise},     {"t_strong", qp.t_strong},
                   {"t_end", qp.t_end},       {"rms_strong", qp.rms_strong}};
  } else if (cfg.scenario.excitation.kind == "impulse") {
    je["amplitude"] = cfg.scenario.excitation.amplitude;
    je["at"] = cfg.scenario.excitation.at;
  } else if (cfg.scenario.excitation.kind == "file") {
    je["path"] = cfg.scenario.excitation.path;
  }
  sc["duration"] = cfg.scenario.duration;
  sc["ts"] = cfg.scenario.ts;
  sc["oversample"] = cfg.scenario.oversample;
  sc["noise"] = {{"rms", cfg.scenario.noise.rms}};
  sc["seed"] = cfg.scenario.seed;
  sc["schedule"] = json::array();
  for (const auto& ev : cfg.scenario.schedule.events) {
    json e = {{"param_index", ev.param_index}, {"new_stiffness", ev.new_stiffness}};
    if (const auto* ft = std::get_if<FixedTimeTrigger>(&ev.trigger)) {
      e["time"] = ft->t_f;
    } else {
      const auto& dt = std::get<DriftTrigger>(ev.trigger);
      e["drift_story"] = dt.story;
      e["drift_threshold"] = dt.threshold;
    }
    sc["schedule"].push_back(e);
  }

  auto& jf = j["filter"];
  jf["alpha"] = cfg.filter.ut.alpha;
  jf["beta"] = cfg.filter.ut.beta;
  jf["kappa"] = cfg.filter.ut.kappa;
  jf["p0"] = cfg.filter.p0;
  jf["q"] = cfg.filter.q;
  jf["r"] = cfg.filter.r;
  jf["taylor_order"] = cfg.filter.taylor_order;
  if (cfg.filter.initial_stiffness.size() > 0) {
    std::vector<double> v(cfg.filter.initial_stiffness.data(),
                          cfg.filter.initial_stiffness.data() + cfg.filter.initial_stiffness.size());
    jf["initial_stiffness"] = v;
  }

  auto& ja = j["adaptation"];
  ja["enabled"] = cfg.adaptation.enabled;
  ja["delta"] = cfg.adaptation.cfg.delta;
  ja["z0"] = cfg.adaptation.cfg.z0;
  ja["p_adapt"] = cfg.adaptation.cfg.p_adapt;
  ja["probe_reduction"] = cfg.adaptation.cfg.probe_reduction;
  ja["cooldown_steps"] = cfg.adaptation.cfg.cooldown_steps;

  j["output_dir"] = cfg.output_dir;
  // nlohmann objects keep keys sorted, so this dump is canonical.
  return j.dump(2);
}

std::uint64_t config_hash(const RunConfig& cfg) {
  const std::string s = dump_run_config(cfg);
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a 64
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string manifest_line(const RunConfig& cfg) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "# config=%016llx seed=%llu version=%s",
                static_cast<unsigned long long>(config_hash(cfg)),
                static_cast<unsigned long long>(cfg.scenario.seed), kVersion);
  return buf;
}

std::string resolve_output_dir(const RunConfig& cfg) {
  std::filesystem::path p(cfg.output_dir);
  if (p.is_absolute()) return p.string();
  if (const char* root = std::getenv("SID_OUTPUT_ROOT"))
    return (std::filesystem::path(root) / p).string();
  return p.string();
}

}  // namespace sid
