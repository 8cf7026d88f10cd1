#include <linesfm/mlo.hpp>

#include <linesfm/errors.hpp>

#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>

namespace linesfm {

Mat3 omega_mp(const Vec3& measured_m, const CameraTwist& u) {
  return -u.nu.dot(measured_m) * Mat3::Identity();
}

Eigen::Matrix2d omega_sphere(double theta, double phi, const CameraTwist& u) {
  const double cp = std::cos(phi);
  if (std::abs(std::sin(phi)) > 1.0 - kPoleTolerance || std::abs(cp) < 1e-12) {
    throw SphericalSingularity("phi at +-pi/2");
  }
  const double nu_ms = u.nu.dot(sphere_basis(theta, phi).m_s);
  return nu_ms * Eigen::Vector2d(1.0 / cp, 1.0).asDiagonal();
}

Eigen::MatrixXd gain_matrix(const Eigen::MatrixXd& omega, double alpha) {
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("gain_matrix: alpha must be positive");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(omega, Eigen::ComputeFullV);
  const Eigen::VectorXd d = 2.0 * std::sqrt(alpha) * svd.singularValues();
  const Eigen::MatrixXd& v = svd.matrixV();
  Eigen::MatrixXd h = v.leftCols(d.size()) * d.asDiagonal() * v.leftCols(d.size()).transpose();
  return 0.5 * (h + h.transpose());
}

MloStateMP mlo_mp_step(const MloStateMP& state, const Vec3& measured_m, const CameraTwist& u,
                       double dt) {
  const Vec3& m = measured_m;
  const Mat3 omega = omega_mp(m, u);
  // omega is a multiple of the identity, so H reduces to 2 sqrt(alpha) |nu.m| I.
  const double h = 2.0 * std::sqrt(state.alpha) * std::abs(u.nu.dot(m));
  const Vec3 m_err = m - state.m_hat;

  const Vec3 dm_hat = u.omega.cross(m) + omega.transpose() * state.chi_hat + h * m_err;
  const Vec3 dchi_hat = mp_dynamics_chi(m, state.chi_hat, u) + state.alpha * (omega * m_err);

  const MPLine next =
      project_mp({state.m_hat + dm_hat * dt, state.chi_hat + dchi_hat * dt});
  return {next.moment, next.chi, state.alpha};
}

MloStateSphere mlo_sphere_step(const MloStateSphere& state, double theta_meas, double phi_meas,
                               const CameraTwist& u, double dt) {
  const Eigen::Matrix2d omega = omega_sphere(theta_meas, phi_meas, u);
  const Eigen::Matrix2d h = gain_matrix(omega, state.alpha);
  const Eigen::Vector2d ang_err(wrap_angle(theta_meas - state.theta_hat),
                                phi_meas - state.phi_hat);

  // Open-loop part: measured angles for the basis, estimated inverse depths.
  const SphereDerivative f =
      sphere_dynamics_at(theta_meas, phi_meas, state.eta1_hat, state.eta2_hat, u);
  const Eigen::Vector2d d_ang = Eigen::Vector2d(f.dtheta, f.dphi) + h * ang_err;
  const Eigen::Vector2d d_eta = Eigen::Vector2d(f.deta1, f.deta2) + state.alpha * omega * ang_err;

  MloStateSphere next = state;
  next.theta_hat = wrap_angle(state.theta_hat + d_ang[0] * dt);
  next.phi_hat = state.phi_hat + d_ang[1] * dt;
  next.eta1_hat = state.eta1_hat + d_eta[0] * dt;
  next.eta2_hat = state.eta2_hat + d_eta[1] * dt;
  return next;
}

}  // namespace linesfm
