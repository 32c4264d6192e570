#pragma once

#include <variant>

#include "sid/signals.hpp"
#include "sid/structure.hpp"
#include "sid/state_space.hpp"

namespace sid {

struct FixedTimeTrigger {
  double t_f{};  // [s]
};

// Fires once the interstory drift of `story` reaches the threshold:
// |x_story - x_{story-1}| for story > 0, |x_0| for the ground story.
struct DriftTrigger {
  int story{};
  double threshold{};  // [m]
};

struct DamageEvent {
  int param_index{};        // story stiffness to degrade
  double new_stiffness{};   // must be positive and below the current value
  std::variant<FixedTimeTrigger, DriftTrigger> trigger{FixedTimeTrigger{}};
};

struct DamageSchedule {
  std::vector<DamageEvent> events;
  void validate(const StructureSpec& spec) const;
};

struct RealizedEvent {
  int param_index{};
  double time{};  // when the swap actually happened (fine-step resolution)
  double new_stiffness{};
};

struct TruthBundle {
  SignalSeries states;   // [x; xdot], 2*n_dof channels
  SignalSeries outputs;  // noise-free sensor outputs
  std::vector<RealizedEvent> realized;
  std::vector<double> final_stiffness;
};

// Ground-truth integration: the exact discretizer at Ts/oversample with the
// input held zero-order over each coarse sample. Damage events swap the
// stiffness instantaneously between fine steps and force a re-discretization.
// Deliberately independent of the Taylor-model family used by the filter.
TruthBundle simulate_truth(const StructureSpec& spec, const DamageSchedule& schedule,
                           const SignalSeries& ground_acc, int oversample,
                           const std::vector<Sensor>& sensors);

}  // namespace sid
