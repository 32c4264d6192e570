#pragma once

#include "sid/structure.hpp"

namespace sid {

enum class SensorType { Displacement, Velocity, Acceleration };

struct Sensor {
  int dof{};
  SensorType type{SensorType::Acceleration};
};

// Continuous-time model over the augmented state [x; xdot; theta] where theta
// holds the n_param identified stiffness values. The parameter rows/columns of
// A are zero, so any discretization maps the parameter block to the identity.
//
//   A = [ 0        I        0 ]      B = [ 0         ]
//       [ -M^-1 K  -M^-1 C  0 ]          [ diag(inf) ]
//       [ 0        0        0 ]          [ 0         ]
//
// Input u is the ground acceleration replicated once per DoF. Acceleration
// outputs feed the input straight through (D row = unit entry); displacement
// and velocity outputs have zero feedthrough.
struct ContinuousStateSpace {
  Eigen::MatrixXd A, B, C, D;
  std::vector<Sensor> sensors;
  int n_dof{};
  int n_param{};
  int state_dim() const { return 2 * n_dof + n_param; }
  int input_dim() const { return n_dof; }
  int output_dim() const { return static_cast<int>(C.rows()); }
};

ContinuousStateSpace build_state_space(const SystemMatrices& mats,
                                       const std::vector<Sensor>& sensors,
                                       int n_param,
                                       const std::vector<double>& influence = {});

// Re-assembles K from new story stiffness values and refreshes the -M^-1 K
// blocks of A and C in place; everything else is untouched. Equivalent to a
// full rebuild (tested), just cheaper and clearer about what damage changes.
void update_stiffness(ContinuousStateSpace& space, const StructureSpec& spec,
                      const std::vector<double>& k_new);

}  // namespace sid
