#include "sid/filter_model.hpp"

#include <stdexcept>

#include "sid/discretize.hpp"

namespace sid {

StiffnessFilterModel::StiffnessFilterModel(StructureSpec spec, std::vector<Sensor> sensors,
                                           double ts, int taylor_order)
    : spec_(std::move(spec)), sensors_(std::move(sensors)), ts_(ts), order_(taylor_order) {
  spec_.validate();
  if (!(ts_ > 0.0)) throw std::invalid_argument("sample time must be positive");
  if (order_ < 1 || order_ > 8) throw std::invalid_argument("taylor order must be in [1, 8]");
  n_dof_ = spec_.dofs();
  n_param_ = spec_.stories();
  for (const auto& s : sensors_)
    if (s.dof < 0 || s.dof >= n_dof_) throw std::invalid_argument("sensor DoF out of range");

  if (spec_.influence.empty()) {
    influence_ = Eigen::VectorXd::Ones(n_dof_);
  } else if (static_cast<int>(spec_.influence.size()) == n_dof_) {
    influence_ = Eigen::Map<const Eigen::VectorXd>(spec_.influence.data(), n_dof_);
  } else {
    influence_ = Eigen::VectorXd::Ones(n_dof_);
    for (int i = 0; i < spec_.stories(); ++i) influence_(i) = spec_.influence[i];
  }
}

void StiffnessFilterModel::build_continuous(const Eigen::VectorXd& theta, Eigen::MatrixXd& A,
                                            Eigen::MatrixXd& B) const {
  StructureSpec s = spec_;
  for (int i = 0; i < n_param_; ++i) s.stiffnesses[i] = theta(i);
  const SystemMatrices mats = assemble_matrices(s);
  const int n = n_dof_;
  const int ns = state_dim();

  A.setZero(ns, ns);
  A.block(0, n, n, n).setIdentity();
  A.block(n, 0, n, n) = -mats.M.ldlt().solve(mats.K);
  A.block(n, n, n, n) = -mats.M.ldlt().solve(mats.C);

  B.setZero(ns, n);
  B.block(n, 0, n, n) = influence_.asDiagonal();
}

Eigen::VectorXd StiffnessFilterModel::f(const Eigen::VectorXd& x,
                                        const Eigen::VectorXd& u) const {
  Eigen::MatrixXd A, B, Ad, Bd;
  build_continuous(x.tail(n_param_), A, B);
  taylor_discretize(A, B, ts_, order_, Ad, Bd);
  // Parameter rows of A are zero, so Ad's parameter block is exactly the
  // identity: theta rides through unchanged.
  return Ad * x + Bd * u;
}

Eigen::VectorXd StiffnessFilterModel::h(const Eigen::VectorXd& x,
                                        const Eigen::VectorXd& u) const {
  StructureSpec s = spec_;
  for (int i = 0; i < n_param_; ++i) s.stiffnesses[i] = x(2 * n_dof_ + i);
  const SystemMatrices mats = assemble_matrices(s);
  const int n = n_dof_;
  const Eigen::MatrixXd minv_k = mats.M.ldlt().solve(mats.K);
  const Eigen::MatrixXd minv_c = mats.M.ldlt().solve(mats.C);

  Eigen::VectorXd y(sensors_.size());
  for (size_t r = 0; r < sensors_.size(); ++r) {
    const auto& sen = sensors_[r];
    switch (sen.type) {
      case SensorType::Displacement:
        y(r) = x(sen.dof);
        break;
      case SensorType::Velocity:
        y(r) = x(n + sen.dof);
        break;
      case SensorType::Acceleration:
        y(r) = -minv_k.row(sen.dof).dot(x.head(n)) - minv_c.row(sen.dof).dot(x.segment(n, n)) +
               influence_(sen.dof) * u(sen.dof);
        break;
    }
  }
  return y;
}

Eigen::VectorXd StiffnessFilterModel::input_vector(double ground_acc) const {
  return Eigen::VectorXd::Constant(n_dof_, ground_acc);
}

}  // namespace sid
