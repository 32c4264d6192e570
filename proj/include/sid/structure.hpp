#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace sid {

struct TmdSpec {
  double mass{};       // [t] (or kg; any consistent unit system works)
  double stiffness{};  // [kN/m]
  double damping{};    // [kN·s/m]
};

// n-story shear frame, chain topology: story i is connected to story i-1,
// story 0 to the ground. An optional tuned mass damper hangs off the top
// story and adds one degree of freedom.
struct StructureSpec {
  std::vector<double> masses;
  std::vector<double> stiffnesses;
  std::vector<double> dampings;
  // Excitation influence per structural DoF; empty means all ones. The TMD
  // DoF always receives the ground input with unit influence.
  std::vector<double> influence;
  std::optional<TmdSpec> tmd;

  int stories() const { return static_cast<int>(masses.size()); }
  int dofs() const { return stories() + (tmd ? 1 : 0); }
  void validate() const;  // throws std::invalid_argument on bad input
};

struct SystemMatrices {
  Eigen::MatrixXd M, K, C;
};

// Purely algebraic: no sign checks, so transiently negative stiffness values
// (as produced by localization probes) assemble fine.
SystemMatrices assemble_matrices(const StructureSpec& spec);

struct ModalProperties {
  Eigen::VectorXd frequencies_hz;      // |lambda|/2pi of the state matrix, ascending
  Eigen::VectorXd damping_ratios;      // -Re(lambda)/|lambda|
  Eigen::MatrixXd mode_shapes;         // undamped shapes, mass-normalized, matched by frequency
  Eigen::VectorXd generalized_masses;  // phi' M phi with phi scaled to unity at the top DoF
};

ModalProperties modal_analysis(const SystemMatrices& mats);

struct TmdDesign {
  double mass_ratio{};   // mu = m_d / m1_hat
  double f_opt_hz{};
  double damping_opt{};  // optimal damping ratio (fraction)
  TmdSpec tmd;
};

// Warburton's closed-form optimum targeting the first mode. The generalized
// mass uses the mode shape normalized to unity at the attachment (top) DoF;
// mass-normalized shapes give a different, non-standard mass ratio.
TmdDesign warburton_tune(const SystemMatrices& mats, const ModalProperties& modal,
                         double tmd_mass);

StructureSpec with_tmd(StructureSpec spec, const TmdSpec& tmd);

}  // namespace sid
