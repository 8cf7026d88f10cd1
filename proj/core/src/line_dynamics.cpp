#include <linesfm/line_dynamics.hpp>

#include <linesfm/errors.hpp>

#include <cmath>

namespace linesfm {

Vec3 mp_dynamics_moment(const Vec3& m, const Vec3& chi, const CameraTwist& u) {
  return u.omega.cross(m) - u.nu.dot(m) * chi;
}

Vec3 mp_dynamics_chi(const Vec3& m, const Vec3& chi, const CameraTwist& u) {
  return u.omega.cross(chi) + u.nu.dot(m) * chi.squaredNorm() * m - u.nu.dot(chi) * chi;
}

MPDerivative mp_dynamics(const MPLine& state, const CameraTwist& u) {
  return {mp_dynamics_moment(state.moment, state.chi, u),
          mp_dynamics_chi(state.moment, state.chi, u)};
}

Vec6 mp_vector_field(const Vec6& x, const CameraTwist& u) {
  const Vec3 m = x.head<3>();
  const Vec3 chi = x.tail<3>();
  Vec6 g;
  g << mp_dynamics_moment(m, chi, u), mp_dynamics_chi(m, chi, u);
  return g;
}

SphereDerivative sphere_dynamics_at(double theta_meas, double phi_meas, double eta1, double eta2,
                                    const CameraTwist& u) {
  const double cp = std::cos(phi_meas);
  if (std::abs(std::sin(phi_meas)) > 1.0 - kPoleTolerance || std::abs(cp) < 1e-12) {
    throw SphericalSingularity("phi at +-pi/2");
  }
  const double tp = std::tan(phi_meas);
  const SphereBasis b = sphere_basis(theta_meas, phi_meas);
  const double nu_ms = u.nu.dot(b.m_s);
  const double w_tilt = u.omega.dot(b.m_p * tp + b.m_s);

  SphereDerivative out;
  out.dtheta = (-u.omega.dot(b.m_p) + nu_ms * eta1) / cp;
  out.dphi = -u.omega.dot(b.m_sxp) + nu_ms * eta2;
  out.deta1 = -w_tilt * eta2 +
              u.nu.dot((b.m_s * tp - b.m_p) * eta1 * eta2 + b.m_sxp * eta1 * eta1);
  out.deta2 = w_tilt * eta1 +
              u.nu.dot(b.m_sxp * eta1 * eta2 - b.m_s * tp * eta1 * eta1 - b.m_p * eta2 * eta2);
  return out;
}

SphereDerivative sphere_dynamics(const SphereLine& state, const CameraTwist& u) {
  return sphere_dynamics_at(state.theta, state.phi, state.eta1, state.eta2, u);
}

JacobianBlocks mp_jacobian_blocks(const MPLine& state, const CameraTwist& u) {
  const Vec3& m = state.moment;
  const Vec3& chi = state.chi;
  const double nu_m = u.nu.dot(m);
  const double nu_chi = u.nu.dot(chi);
  const double chi_sq = chi.squaredNorm();
  const Mat3 w = skew(u.omega);
  const Mat3 eye = Mat3::Identity();

  JacobianBlocks j;
  j.j1 = w - chi * u.nu.transpose();
  j.j2 = -nu_m * eye;
  j.j3 = chi_sq * (nu_m * eye + m * u.nu.transpose());
  j.j4 = w + 2.0 * nu_m * m * chi.transpose() - chi * u.nu.transpose() - nu_chi * eye;
  return j;
}

Mat6 mp_jacobian(const MPLine& state, const CameraTwist& u) {
  const JacobianBlocks j = mp_jacobian_blocks(state, u);
  Mat6 out;
  out << j.j1, j.j2, j.j3, j.j4;
  return out;
}

Vec6 euler_step_raw(const Vec6& x, const CameraTwist& u, double dt) {
  return x + mp_vector_field(x, u) * dt;
}

MPLine euler_step(const MPLine& state, const CameraTwist& u, double dt) {
  const MPDerivative g = mp_dynamics(state, u);
  return project_mp({state.moment + g.dm * dt, state.chi + g.dchi * dt});
}

SphereLine euler_step_sphere(const SphereLine& state, const CameraTwist& u, double dt) {
  const SphereDerivative g = sphere_dynamics(state, u);
  return {wrap_angle(state.theta + g.dtheta * dt), state.phi + g.dphi * dt,
          state.eta1 + g.deta1 * dt, state.eta2 + g.deta2 * dt};
}

}  // namespace linesfm
