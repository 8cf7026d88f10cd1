#pragma once

#include <linesfm/line_geometry.hpp>
#include <linesfm/types.hpp>

namespace linesfm {

struct MPDerivative {
  Vec3 dm = Vec3::Zero();
  Vec3 dchi = Vec3::Zero();
};

struct SphereDerivative {
  double dtheta = 0.0;
  double dphi = 0.0;
  double deta1 = 0.0;
  double deta2 = 0.0;
};

/// Default integration step: one frame of a 30 fps camera.
inline constexpr double kDefaultDt = 1.0 / 30.0;

/// Moment part of the M-P vector field, g_m = [w]x m - (nu.m) chi.
Vec3 mp_dynamics_moment(const Vec3& m, const Vec3& chi, const CameraTwist& u);

/// chi part, g_chi = [w]x chi + (nu.m)|chi|^2 m - (nu.chi) chi.
Vec3 mp_dynamics_chi(const Vec3& m, const Vec3& chi, const CameraTwist& u);

MPDerivative mp_dynamics(const MPLine& state, const CameraTwist& u);

/// Same vector field on an unconstrained 6-vector (m, chi).
Vec6 mp_vector_field(const Vec6& x, const CameraTwist& u);

/// Throws SphericalSingularity within 1e-9 of the poles.
SphereDerivative sphere_dynamics(const SphereLine& state, const CameraTwist& u);

/// Sphere vector field with the basis evaluated at (theta_meas, phi_meas) while the
/// inverse-depth terms use (eta1, eta2). With measured == state angles it equals
/// sphere_dynamics.
SphereDerivative sphere_dynamics_at(double theta_meas, double phi_meas, double eta1, double eta2,
                                    const CameraTwist& u);

/// Analytic Jacobian of mp_vector_field with respect to (m, chi).
Mat6 mp_jacobian(const MPLine& state, const CameraTwist& u);

struct JacobianBlocks {
  Mat3 j1, j2, j3, j4;
};
JacobianBlocks mp_jacobian_blocks(const MPLine& state, const CameraTwist& u);

/// Plain forward-Euler map x + g(x, u) dt on the unconstrained 6-vector.
Vec6 euler_step_raw(const Vec6& x, const CameraTwist& u, double dt);

/// Forward-Euler step followed by projection back onto |m| = 1, m . chi = 0.
MPLine euler_step(const MPLine& state, const CameraTwist& u, double dt);

/// Forward-Euler step of the spherical state; theta is wrapped to (-pi, pi].
SphereLine euler_step_sphere(const SphereLine& state, const CameraTwist& u, double dt);

}  // namespace linesfm
