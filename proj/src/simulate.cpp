#include "sid/simulate.hpp"

#include <cmath>
#include <stdexcept>

#include "sid/discretize.hpp"

namespace sid {

void DamageSchedule::validate(const StructureSpec& spec) const {
  for (const auto& ev : events) {
    if (ev.param_index < 0 || ev.param_index >= spec.stories())
      throw std::invalid_argument("damage event index out of range");
    if (!(ev.new_stiffness > 0.0))
      throw std::invalid_argument("damaged stiffness must stay positive");
    if (ev.new_stiffness >= spec.stiffnesses[ev.param_index])
      throw std::invalid_argument("damage must reduce the stiffness");
    if (const auto* ft = std::get_if<FixedTimeTrigger>(&ev.trigger)) {
      if (ft->t_f < 0.0) throw std::invalid_argument("damage time must be non-negative");
    } else {
      const auto& dt = std::get<DriftTrigger>(ev.trigger);
      if (dt.story < 0 || dt.story >= spec.stories())
        throw std::invalid_argument("drift trigger story out of range");
      if (!(dt.threshold > 0.0))
        throw std::invalid_argument("drift threshold must be positive");
    }
  }
}

TruthBundle simulate_truth(const StructureSpec& spec, const DamageSchedule& schedule,
                           const SignalSeries& ground_acc, int oversample,
                           const std::vector<Sensor>& sensors) {
  spec.validate();
  schedule.validate(spec);
  if (oversample < 1) throw std::invalid_argument("oversample must be >= 1");
  if (ground_acc.channels() != 1)
    throw std::invalid_argument("ground acceleration must be a single channel");

  StructureSpec current = spec;
  auto space = build_state_space(assemble_matrices(current), sensors, 0, current.influence);
  const int nd = space.n_dof;
  const double ts = ground_acc.ts;
  const double dt = ts / oversample;
  auto disc = exact_discretize(space, dt);

  const int n = ground_acc.samples();
  TruthBundle out;
  out.states.ts = ts;
  out.states.values.resize(n, 2 * nd);
  out.outputs.ts = ts;
  out.outputs.values.resize(n, static_cast<int>(sensors.size()));
  for (int i = 0; i < nd; ++i) {
    out.states.labels.push_back("x" + std::to_string(i + 1));
    out.states.units.push_back("m");
  }
  for (int i = 0; i < nd; ++i) {
    out.states.labels.push_back("v" + std::to_string(i + 1));
    out.states.units.push_back("m/s");
  }
  for (const auto& sen : sensors) {
    const char* base = sen.type == SensorType::Displacement  ? "d"
                       : sen.type == SensorType::Velocity    ? "v"
                                                             : "a";
    out.outputs.labels.push_back(base + std::to_string(sen.dof + 1));
    out.outputs.units.push_back(sen.type == SensorType::Displacement  ? "m"
                                : sen.type == SensorType::Velocity    ? "m/s"
                                                                      : "m/s^2");
  }

  std::vector<bool> fired(schedule.events.size(), false);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(2 * nd);

  auto apply_event = [&](size_t i, double t) {
    const auto& ev = schedule.events[i];
    current.stiffnesses[ev.param_index] = ev.new_stiffness;
    space = build_state_space(assemble_matrices(current), sensors, 0, current.influence);
    disc = exact_discretize(space, dt);
    out.realized.push_back({ev.param_index, t, ev.new_stiffness});
    fired[i] = true;
  };

  auto drift = [&](int story) {
    return story == 0 ? std::abs(x(0)) : std::abs(x(story) - x(story - 1));
  };

  for (int k = 0; k < n; ++k) {
    const Eigen::VectorXd u = Eigen::VectorXd::Constant(nd, ground_acc.values(k, 0));
    out.states.values.row(k) = x.transpose();
    out.outputs.values.row(k) = (space.C * x + space.D * u).transpose();
    for (int j = 0; j < oversample; ++j) {
      const double t = k * ts + j * dt;
      for (size_t i = 0; i < schedule.events.size(); ++i) {
        if (fired[i]) continue;
        const auto& ev = schedule.events[i];
        if (const auto* ft = std::get_if<FixedTimeTrigger>(&ev.trigger)) {
          if (t >= ft->t_f - 1e-12) apply_event(i, t);
        } else {
          const auto& dtr = std::get<DriftTrigger>(ev.trigger);
          if (drift(dtr.story) >= dtr.threshold) apply_event(i, t);
        }
      }
      x = disc.Ad * x + disc.Bd * u;
    }
  }
  out.final_stiffness = current.stiffnesses;
  return out;
}

}  // namespace sid
