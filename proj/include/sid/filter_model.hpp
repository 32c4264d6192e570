#pragma once

#include <vector>

#include <Eigen/Dense>

#include "sid/state_space.hpp"
#include "sid/structure.hpp"
#include "sid/ukf.hpp"

namespace sid {

// Process model over the augmented state [x; xdot; theta] where theta holds
// the story stiffnesses. Each f/h call rebuilds K(theta) and the augmented
// system matrix, so sigma points with different theta see different dynamics.
// The parameter block of the transition is exactly identity: the augmented
// continuous A has zero rows/columns there, and every Taylor term beyond A^0
// keeps them zero.
class StiffnessFilterModel : public ProcessModel {
 public:
  StiffnessFilterModel(StructureSpec spec, std::vector<Sensor> sensors, double ts,
                       int taylor_order);

  Eigen::VectorXd f(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const override;
  Eigen::VectorXd h(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const override;
  int state_dim() const override { return 2 * n_dof_ + n_param_; }
  int output_dim() const override { return static_cast<int>(sensors_.size()); }

  int n_dof() const { return n_dof_; }
  int n_param() const { return n_param_; }
  int param_offset() const { return 2 * n_dof_; }
  double ts() const { return ts_; }
  int taylor_order() const { return order_; }
  const StructureSpec& spec() const { return spec_; }
  const std::vector<Sensor>& sensors() const { return sensors_; }

  // Expand the scalar ground acceleration into the model input vector.
  Eigen::VectorXd input_vector(double ground_acc) const;

 private:
  // Continuous augmented matrices for the stiffness vector theta.
  void build_continuous(const Eigen::VectorXd& theta, Eigen::MatrixXd& A,
                        Eigen::MatrixXd& B) const;

  StructureSpec spec_;
  std::vector<Sensor> sensors_;
  double ts_;
  int order_;
  int n_dof_, n_param_;
  Eigen::VectorXd influence_;
};

}  // namespace sid
