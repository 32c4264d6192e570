#include "sid/state_space.hpp"

#include <stdexcept>

namespace sid {

namespace {

Eigen::VectorXd influence_vector(int n_dof, const std::vector<double>& influence) {
  if (influence.empty()) return Eigen::VectorXd::Ones(n_dof);
  Eigen::VectorXd r(n_dof);
  if (static_cast<int>(influence.size()) == n_dof) {
    for (int i = 0; i < n_dof; ++i) r(i) = influence[i];
  } else if (static_cast<int>(influence.size()) == n_dof - 1) {
    // Per-story influence on a TMD system: the damper DoF rides along with
    // unit influence.
    for (int i = 0; i < n_dof - 1; ++i) r(i) = influence[i];
    r(n_dof - 1) = 1.0;
  } else {
    throw std::invalid_argument("influence length must match the DoF count");
  }
  return r;
}

}  // namespace

ContinuousStateSpace build_state_space(const SystemMatrices& mats,
                                       const std::vector<Sensor>& sensors, int n_param,
                                       const std::vector<double>& influence) {
  const int n = static_cast<int>(mats.M.rows());
  const int ns = 2 * n + n_param;
  const Eigen::MatrixXd minv_k = mats.M.ldlt().solve(mats.K);
  const Eigen::MatrixXd minv_c = mats.M.ldlt().solve(mats.C);
  const Eigen::VectorXd inf = influence_vector(n, influence);

  ContinuousStateSpace s;
  s.n_dof = n;
  s.n_param = n_param;
  s.sensors = sensors;
  s.A = Eigen::MatrixXd::Zero(ns, ns);
  s.A.block(0, n, n, n).setIdentity();
  s.A.block(n, 0, n, n) = -minv_k;
  s.A.block(n, n, n, n) = -minv_c;

  s.B = Eigen::MatrixXd::Zero(ns, n);
  s.B.block(n, 0, n, n) = inf.asDiagonal();

  const int m = static_cast<int>(sensors.size());
  s.C = Eigen::MatrixXd::Zero(m, ns);
  s.D = Eigen::MatrixXd::Zero(m, n);
  for (int r = 0; r < m; ++r) {
    const auto& sen = sensors[r];
    if (sen.dof < 0 || sen.dof >= n) throw std::invalid_argument("sensor DoF out of range");
    switch (sen.type) {
      case SensorType::Displacement:
        s.C(r, sen.dof) = 1.0;
        break;
      case SensorType::Velocity:
        s.C(r, n + sen.dof) = 1.0;
        break;
      case SensorType::Acceleration:
        s.C.block(r, 0, 1, n) = -minv_k.row(sen.dof);
        s.C.block(r, n, 1, n) = -minv_c.row(sen.dof);
        s.D(r, sen.dof) = inf(sen.dof);
        break;
    }
  }
  return s;
}

void update_stiffness(ContinuousStateSpace& space, const StructureSpec& spec,
                      const std::vector<double>& k_new) {
  if (k_new.size() != spec.stiffnesses.size())
    throw std::invalid_argument("k_new length must match the story count");
  StructureSpec tmp = spec;
  tmp.stiffnesses = k_new;
  const SystemMatrices mats = assemble_matrices(tmp);
  const int n = space.n_dof;
  if (mats.M.rows() != n) throw std::invalid_argument("spec DoF count mismatch");
  const Eigen::MatrixXd minv_k = mats.M.ldlt().solve(mats.K);

  space.A.block(n, 0, n, n) = -minv_k;
  for (int r = 0; r < static_cast<int>(space.sensors.size()); ++r) {
    const auto& sen = space.sensors[r];
    if (sen.type == SensorType::Acceleration)
      space.C.block(r, 0, 1, n) = -minv_k.row(sen.dof);
  }
}

}  // namespace sid
