#include "sid/structure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace sid {

void StructureSpec::validate() const {
  const auto n = masses.size();
  if (n == 0) throw std::invalid_argument("structure needs at least one story");
  if (stiffnesses.size() != n || dampings.size() != n)
    throw std::invalid_argument("masses/stiffnesses/dampings must have equal length");
  for (double m : masses)
    if (!(m > 0.0)) throw std::invalid_argument("story masses must be positive");
  for (double k : stiffnesses)
    if (!(k > 0.0)) throw std::invalid_argument("story stiffnesses must be positive");
  for (double c : dampings)
    if (c < 0.0) throw std::invalid_argument("story dampings must be non-negative");
  if (!influence.empty() && influence.size() != n &&
      influence.size() != n + (tmd ? 1u : 0u))
    throw std::invalid_argument("influence must be empty, per-story, or per-DoF");
  if (tmd) {
    if (!(tmd->mass > 0.0) || !(tmd->stiffness > 0.0))
      throw std::invalid_argument("tmd mass and stiffness must be positive");
    if (tmd->damping < 0.0) throw std::invalid_argument("tmd damping must be non-negative");
  }
}

namespace {

// Chain pattern shared by K and C: element i couples DoF i to i-1.
void add_chain(Eigen::MatrixXd& G, int i, double g) {
  G(i, i) += g;
  if (i > 0) {
    G(i - 1, i - 1) += g;
    G(i - 1, i) -= g;
    G(i, i - 1) -= g;
  }
}

}  // namespace

SystemMatrices assemble_matrices(const StructureSpec& spec) {
  const int n = spec.stories();
  const int nd = spec.dofs();
  SystemMatrices out;
  out.M = Eigen::MatrixXd::Zero(nd, nd);
  out.K = Eigen::MatrixXd::Zero(nd, nd);
  out.C = Eigen::MatrixXd::Zero(nd, nd);
  for (int i = 0; i < n; ++i) {
    out.M(i, i) = spec.masses[i];
    add_chain(out.K, i, spec.stiffnesses[i]);
    add_chain(out.C, i, spec.dampings[i]);
  }
  if (spec.tmd) {
    out.M(n, n) = spec.tmd->mass;
    // TMD hangs off the top story: same chain pattern, one more element.
    add_chain(out.K, n, spec.tmd->stiffness);
    add_chain(out.C, n, spec.tmd->damping);
  }
  return out;
}

ModalProperties modal_analysis(const SystemMatrices& mats) {
  const int n = static_cast<int>(mats.M.rows());
  const Eigen::MatrixXd minv_k = mats.M.ldlt().solve(mats.K);
  const Eigen::MatrixXd minv_c = mats.M.ldlt().solve(mats.C);

  // Damped frequencies/ratios from the first-order state matrix. Complex
  // conjugate pairs collapse to one entry each (positive imaginary part).
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  E.topRightCorner(n, n).setIdentity();
  E.bottomLeftCorner(n, n) = -minv_k;
  E.bottomRightCorner(n, n) = -minv_c;
  Eigen::EigenSolver<Eigen::MatrixXd> es(E);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigen decomposition failed");

  std::vector<std::complex<double>> picked;
  for (int i = 0; i < 2 * n; ++i) {
    const auto lam = es.eigenvalues()(i);
    if (lam.imag() > 0.0) picked.push_back(lam);
  }
  if (static_cast<int>(picked.size()) != n)
    throw std::runtime_error("expected underdamped modes (complex conjugate pairs)");
  std::sort(picked.begin(), picked.end(),
            [](auto a, auto b) { return std::abs(a) < std::abs(b); });

  ModalProperties out;
  out.frequencies_hz.resize(n);
  out.damping_ratios.resize(n);
  for (int i = 0; i < n; ++i) {
    const double mag = std::abs(picked[i]);
    out.frequencies_hz(i) = mag / (2.0 * std::numbers::pi);
    out.damping_ratios(i) = -picked[i].real() / mag;
  }

  // Undamped shapes, mass-normalized (phi' M phi = 1), ascending like the
  // damped frequencies above, so columns line up for light damping.
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(mats.K, mats.M);
  if (ges.info() != Eigen::Success) throw std::runtime_error("modal eigenproblem failed");
  out.mode_shapes = ges.eigenvectors();

  out.generalized_masses.resize(n);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd phi = out.mode_shapes.col(i);
    const double top = phi(n - 1);
    if (top == 0.0) throw std::runtime_error("mode shape vanishes at the top DoF");
    phi /= top;
    out.generalized_masses(i) = phi.dot(mats.M * phi);
  }
  return out;
}

TmdDesign warburton_tune(const SystemMatrices& mats, const ModalProperties& modal,
                         double tmd_mass) {
  if (!(tmd_mass > 0.0)) throw std::invalid_argument("tmd mass must be positive");
  const double m1 = modal.generalized_masses(0);
  const double mu = tmd_mass / m1;
  const double f1 = modal.frequencies_hz(0);

  // Warburton's optimum for random support acceleration:
  //   f_opt/f1 = sqrt(1 - mu/2) / (1 + mu)
  //   zeta_opt = sqrt( mu (1 - mu/4) / (4 (1 + mu)(1 - mu/2)) )
  const double f_ratio = std::sqrt(1.0 - mu / 2.0) / (1.0 + mu);
  const double zeta =
      std::sqrt(mu * (1.0 - mu / 4.0) / (4.0 * (1.0 + mu) * (1.0 - mu / 2.0)));

  TmdDesign d;
  d.mass_ratio = mu;
  d.f_opt_hz = f_ratio * f1;
  d.damping_opt = zeta;
  const double wd = 2.0 * std::numbers::pi * d.f_opt_hz;
  d.tmd = TmdSpec{tmd_mass, tmd_mass * wd * wd, 2.0 * zeta * tmd_mass * wd};
  return d;
}

StructureSpec with_tmd(StructureSpec spec, const TmdSpec& tmd) {
  spec.tmd = tmd;
  return spec;
}

}  // namespace sid
